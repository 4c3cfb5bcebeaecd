"""Greedy list scheduling of a job DAG on identical cores under release times.

Jobs are processed in a fixed topological order. For each job every core is
evaluated: its earliest feasible start is the max of core availability, the
job's release time, and predecessor data-ready times under the candidate
mapping (on-chip write+read when producer and consumer would share core and
branch, off-chip otherwise). The core with the earliest finish wins, ties to
the lowest core index. Cores are modeled by a single availability time that
only moves forward, so there is no insertion into earlier idle gaps.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .exec_model import OFF_CHIP, ON_CHIP, Placement
from .graph import DagGraph, topological_order

ORDER_MIN_ID = "min_id"
ORDER_RELEASE = "release"
ORDER_RULES = (ORDER_MIN_ID, ORDER_RELEASE)


@dataclass(frozen=True)
class ReleaseVector:
    """Release times in ms keyed by node id; absent nodes release at 0."""

    rho: dict[int, float]

    def of(self, node_id: int) -> float:
        return self.rho.get(node_id, 0.0)

    def check_finite(self) -> None:
        for nid, r in self.rho.items():
            if not math.isfinite(r) or r < 0:
                raise ValueError(f"release for node {nid} must be finite and >= 0, got {r}")

    @classmethod
    def for_entries(cls, g: DagGraph, release_ms) -> "ReleaseVector":
        """Map per-band release times onto the branch entry nodes."""
        return cls({g.entry_of_branch[k]: float(v) for k, v in release_ms.items()})


@dataclass
class Schedule:
    """A committed feasible schedule; makespan is the latest finish time."""

    placement: Placement
    makespan: float
    order: tuple[int, ...]
    cores: int


def _release_order(g: DagGraph, rho: ReleaseVector) -> list[int]:
    # Kahn variant popping the ready node with the earliest release (id ties).
    n = g.num_nodes
    indeg = [len(p) for p in g.preds]
    heap = [(rho.of(i), i) for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        _, v = heapq.heappop(heap)
        order.append(v)
        for w in g.succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (rho.of(w), w))
    if len(order) < n:
        raise ValueError("graph is cyclic")
    return order


def _place(g: DagGraph, rho: dict, cores: int, order, include):
    """Core list-scheduling loop shared by schedule() and estimate_makespan()."""
    nodes = g.nodes
    preds = g.preds
    chi = [0.0] * cores
    m = [0] * len(nodes)
    s = [0.0] * len(nodes)
    f = [0.0] * len(nodes)
    makespan = 0.0
    for vid in order:
        v = nodes[vid]
        if include is None:
            plist = preds[vid]
        else:
            plist = [u for u in preds[vid] if u in include]
        rho_v = rho.get(vid, 0.0)
        d_cmp = v.d_cmp
        vbranch = v.branch_id
        r_on = v.r_on
        r_off = v.r_off
        best_c = 0
        best_f = math.inf
        best_s = 0.0
        for c in range(cores):
            start = chi[c]
            if rho_v > start:
                start = rho_v
            for uid in plist:
                u = nodes[uid]
                if m[uid] == c and u.branch_id == vbranch:
                    phi = f[uid] + u.w_on + r_on
                else:
                    phi = f[uid] + u.w_off + r_off
                if phi > start:
                    start = phi
            fin = start + d_cmp
            if fin < best_f:
                best_f = fin
                best_s = start
                best_c = c
        m[vid] = best_c
        s[vid] = best_s
        f[vid] = best_f
        chi[best_c] = best_f
        if best_f > makespan:
            makespan = best_f
    return m, s, f, makespan


def _resolve_order(g: DagGraph, rho: ReleaseVector, order_rule: str, include):
    if order_rule == ORDER_MIN_ID:
        order = topological_order(g)
    elif order_rule == ORDER_RELEASE:
        order = _release_order(g, rho)
    else:
        raise ValueError(f"unknown order rule {order_rule!r}, expected one of {ORDER_RULES}")
    if include is not None:
        order = [v for v in order if v in include]
    return order


def schedule(
    g: DagGraph,
    rho: ReleaseVector,
    cores: int,
    order_rule: str = ORDER_MIN_ID,
    include=None,
) -> Schedule:
    """Schedule the graph (or the induced subgraph `include`) on `cores` cores.

    Releases must be finite; policies substitute surrogates for unknown
    completion times before calling. The returned schedule satisfies release,
    precedence-with-transfer, non-overlap, and single-assignment feasibility.
    """
    if cores < 1:
        raise ValueError(f"need at least one core, got {cores}")
    rho.check_finite()
    order = _resolve_order(g, rho, order_rule, include)
    m, s, f, makespan = _place(g, rho.rho, cores, order, include)
    scheduled = set(order)
    modes = {}
    for u, v in g.edges:
        if u in scheduled and v in scheduled:
            same = m[u] == m[v] and g.nodes[u].branch_id == g.nodes[v].branch_id
            modes[(u, v)] = ON_CHIP if same else OFF_CHIP
    placement = Placement(
        {vid: m[vid] for vid in order},
        {vid: s[vid] for vid in order},
        {vid: f[vid] for vid in order},
        modes,
    )
    return Schedule(placement, makespan, tuple(order), cores)


def estimate_makespan(
    g: DagGraph,
    rho: ReleaseVector,
    cores: int,
    order_rule: str = ORDER_MIN_ID,
    include=None,
) -> float:
    """Makespan of the greedy schedule without assembling placement records.

    Fast path for rollout evaluations, which only need the scalar.
    """
    if cores < 1:
        raise ValueError(f"need at least one core, got {cores}")
    rho.check_finite()
    order = _resolve_order(g, rho, order_rule, include)
    return _place(g, rho.rho, cores, order, include)[3]
