"""Deterministic SVG timeline for a completed run.

One lane per core, one block per job colored by branch (gray for the
cross-branch tail), dashed vertical lines at branch release instants, and a
mark per edge at the consumer's start: blue circle for on-chip forwarding,
red cross for off-chip transfer. Byte output depends only on the run record.
"""

from __future__ import annotations

from .exec_model import ON_CHIP

_LANE_H = 34
_LANE_GAP = 8
_MARGIN_L = 70
_MARGIN_R = 24
_MARGIN_T = 34
_MARGIN_B = 30
_PLOT_W = 860.0

_GRAY = "#b5b5b5"
_PALETTE = (
    "#4e79a7", "#f28e2b", "#59a14f", "#edc948", "#b07aa1",
    "#76b7b2", "#ff9da7", "#9c755f", "#86bcb6", "#d37295",
)


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _branch_fill(branch_id: int) -> str:
    if branch_id == 0:
        return _GRAY
    return _PALETTE[(branch_id - 1) % len(_PALETTE)]


def render_gantt(result) -> str:
    sched = result.schedule
    pl = sched.placement
    cores = sched.cores
    span = max(sched.makespan, 1e-9)
    width = _MARGIN_L + _PLOT_W + _MARGIN_R
    height = _MARGIN_T + cores * (_LANE_H + _LANE_GAP) + _MARGIN_B

    def x(t_ms: float) -> float:
        return _MARGIN_L + _PLOT_W * (t_ms / span)

    def lane_y(core: int) -> float:
        return _MARGIN_T + core * (_LANE_H + _LANE_GAP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}" font-family="monospace" font-size="11">',
        "<style>.job{stroke:#333333;stroke-width:0.6}"
        ".lane{fill:#f2f2f2}"
        ".release{stroke:#555555;stroke-width:1;stroke-dasharray:5 3}"
        ".xfer-on{fill:none;stroke:#1a56c4;stroke-width:1.2}"
        ".xfer-off{fill:none;stroke:#c62828;stroke-width:1.2}</style>",
    ]
    for c in range(cores):
        y = lane_y(c)
        parts.append(
            f'<rect class="lane" x="{_fmt(_MARGIN_L)}" y="{_fmt(y)}" '
            f'width="{_fmt(_PLOT_W)}" height="{_fmt(_LANE_H)}"/>'
        )
        parts.append(f'<text x="8" y="{_fmt(y + _LANE_H / 2 + 4)}">core {c}</text>')

    ticks = 5
    axis_y = _MARGIN_T + cores * (_LANE_H + _LANE_GAP) + 12
    for i in range(ticks + 1):
        t = span * i / ticks
        parts.append(f'<text x="{_fmt(x(t) - 10)}" y="{_fmt(axis_y)}" fill="#444444">{t:.0f}</text>')
    parts.append(
        f'<text x="{_fmt(_MARGIN_L)}" y="{_fmt(_MARGIN_T - 12)}" fill="#222222">'
        f"makespan {sched.makespan:.3f} ms ({result.policy})</text>"
    )

    by_id = {nd.id: nd for nd in result.graph.nodes}
    for vid in sorted(pl.m):
        nd = by_id[vid]
        x0 = x(pl.s[vid])
        w = max(x(pl.f[vid]) - x0, 0.5)
        y = lane_y(pl.m[vid]) + 2
        parts.append(
            f'<rect class="job" x="{_fmt(x0)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(_LANE_H - 4)}" fill="{_branch_fill(nd.branch_id)}">'
            f"<title>{nd.label or nd.id}: {pl.s[vid]:.3f}-{pl.f[vid]:.3f} ms</title></rect>"
        )

    bottom = lane_y(cores - 1) + _LANE_H
    for k in sorted(result.releases):
        xr = x(result.releases[k])
        parts.append(
            f'<line class="release" x1="{_fmt(xr)}" y1="{_fmt(_MARGIN_T - 6)}" '
            f'x2="{_fmt(xr)}" y2="{_fmt(bottom + 6)}"/>'
        )

    for (u, v) in sorted(pl.transfer_mode):
        xm = x(pl.s[v])
        ym = lane_y(pl.m[v]) + 6
        if pl.transfer_mode[(u, v)] == ON_CHIP:
            parts.append(f'<circle class="xfer-on" cx="{_fmt(xm)}" cy="{_fmt(ym)}" r="2.6"/>')
        else:
            parts.append(
                f'<path class="xfer-off" d="M {_fmt(xm - 2.6)} {_fmt(ym - 2.6)} '
                f"L {_fmt(xm + 2.6)} {_fmt(ym + 2.6)} "
                f"M {_fmt(xm - 2.6)} {_fmt(ym + 2.6)} "
                f'L {_fmt(xm + 2.6)} {_fmt(ym - 2.6)}"/>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_gantt(result, path) -> None:
    """Write the SVG; regenerating from the same run gives identical bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_gantt(result))
