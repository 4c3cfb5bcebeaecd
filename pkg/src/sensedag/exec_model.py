"""Mapping-dependent job timing: transfer locality, data-ready, and start rules.

Data movement occupies no core time. Read/write latencies delay the consumer's
start but never extend a core's busy interval, so a job's finish is always its
start plus its pure compute time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import DagNode

ON_CHIP = "on_chip"
OFF_CHIP = "off_chip"


@dataclass
class CoreState:
    """Per-core next-idle times in ms."""

    chi: list[float]

    def __post_init__(self):
        for c, t in enumerate(self.chi):
            if not math.isfinite(t) or t < 0:
                raise ValueError(f"core {c} availability must be finite and >= 0, got {t}")

    @classmethod
    def idle(cls, num_cores: int) -> "CoreState":
        return cls([0.0] * num_cores)


def delta(u: DagNode, v: DagNode, core_u: int, core_v: int) -> int:
    """1 when the edge's data can stay on-chip: same core and same branch label."""
    return 1 if core_u == core_v and u.branch_id == v.branch_id else 0


def data_ready(u: DagNode, v: DagNode, f_u: float, d: int) -> float:
    """Instant u's output is readable by v: finish plus write+read latency."""
    if d:
        return f_u + u.w_on + v.r_on
    return f_u + u.w_off + v.r_off


def earliest_start(candidate_core: int, cores: CoreState, rho_v: float, pred_ready) -> float:
    """Earliest feasible start on the candidate core.

    Max of core availability, the job's release, and every predecessor
    data-ready time (empty predecessors contribute 0).
    """
    if not math.isfinite(rho_v) or rho_v < 0:
        raise ValueError(f"release must be finite and >= 0, got {rho_v}")
    s = cores.chi[candidate_core]
    if rho_v > s:
        s = rho_v
    for r in pred_ready:
        if r > s:
            s = r
    return s


@dataclass
class Placement:
    """Committed mapping: core, start/finish (ms), and per-edge transfer mode."""

    m: dict[int, int]
    s: dict[int, float]
    f: dict[int, float]
    transfer_mode: dict[tuple[int, int], str]
