"""Exhaustive search for the minimum-makespan schedule on tiny instances.

Enumerates every core assignment crossed with every topological order and
places each job at its earliest feasible time (semi-active placement). For
this regular objective with assignment-dependent edge costs the optimum lies
inside that family, so the minimum found is exact. Ground truth for tests;
useless beyond toy sizes by design.
"""

from __future__ import annotations

import itertools
import math
from bisect import insort
from dataclasses import dataclass

from .exec_model import OFF_CHIP, ON_CHIP, Placement
from .graph import DagGraph
from .radg import ReleaseVector, Schedule


@dataclass(frozen=True)
class OracleLimit:
    max_nodes: int = 8
    max_cores: int = 2
    node_budget: int = 10_000_000

    def __post_init__(self):
        if self.max_nodes < 1 or self.max_cores < 1 or self.node_budget < 1:
            raise ValueError("oracle limits must be positive")


class OracleLimitError(RuntimeError):
    """Instance exceeds the configured enumeration limits or state budget."""


def all_topological_orders(g: DagGraph) -> list[tuple[int, ...]]:
    """Every linear extension, enumerated with ascending-id branching."""
    n = g.num_nodes
    indeg = [len(p) for p in g.preds]
    ready = sorted(i for i in range(n) if indeg[i] == 0)
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec():
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for v in list(ready):
            ready.remove(v)
            prefix.append(v)
            opened = []
            for w in g.succs[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    opened.append(w)
                    insort(ready, w)
            rec()
            for w in opened:
                ready.remove(w)
            for w in g.succs[v]:
                indeg[w] += 1
            prefix.pop()
            insort(ready, v)

    rec()
    if not out:
        raise ValueError("graph is cyclic")
    return out


def optimal_makespan(
    g: DagGraph,
    rho: ReleaseVector,
    cores: int,
    limit: OracleLimit | None = None,
) -> tuple[float, Schedule]:
    """Exact minimum makespan and one optimal schedule.

    Deterministic tie-break: assignments are enumerated in lexicographic
    order (indexed by node id) and only strict improvements are kept.
    """
    limit = limit or OracleLimit()
    n = g.num_nodes
    if n > limit.max_nodes:
        raise OracleLimitError(f"{n} nodes exceeds limit {limit.max_nodes}")
    if cores > limit.max_cores:
        raise OracleLimitError(f"{cores} cores exceeds limit {limit.max_cores}")
    if cores < 1:
        raise ValueError(f"need at least one core, got {cores}")
    rho.check_finite()

    orders = all_topological_orders(g)
    rho_l = [rho.of(i) for i in range(n)]
    d = [nd.d_cmp for nd in g.nodes]
    branch = [nd.branch_id for nd in g.nodes]
    r_on = [nd.r_on for nd in g.nodes]
    r_off = [nd.r_off for nd in g.nodes]
    w_on = [nd.w_on for nd in g.nodes]
    w_off = [nd.w_off for nd in g.nodes]
    preds = g.preds

    budget = limit.node_budget
    best = math.inf
    best_asg = None
    best_order = None
    best_s = None
    best_f = None
    s = [0.0] * n
    f = [0.0] * n
    for asg in itertools.product(range(cores), repeat=n):
        for order in orders:
            budget -= n
            if budget < 0:
                raise OracleLimitError(f"state budget {limit.node_budget} exhausted")
            chi = [0.0] * cores
            makespan = 0.0
            feasible = True
            for vid in order:
                c = asg[vid]
                start = chi[c]
                rv = rho_l[vid]
                if rv > start:
                    start = rv
                vb = branch[vid]
                for u in preds[vid]:
                    if asg[u] == c and branch[u] == vb:
                        ready = f[u] + w_on[u] + r_on[vid]
                    else:
                        ready = f[u] + w_off[u] + r_off[vid]
                    if ready > start:
                        start = ready
                fin = start + d[vid]
                if fin >= best:
                    # makespan can only grow from here; equal ties keep the
                    # earlier (lexicographically smaller) incumbent
                    feasible = False
                    break
                s[vid] = start
                f[vid] = fin
                chi[c] = fin
                if fin > makespan:
                    makespan = fin
            if feasible and makespan < best:
                best = makespan
                best_asg = asg
                best_order = order
                best_s = list(s)
                best_f = list(f)
    modes = {}
    for u, v in g.edges:
        same = best_asg[u] == best_asg[v] and branch[u] == branch[v]
        modes[(u, v)] = ON_CHIP if same else OFF_CHIP
    placement = Placement(
        {i: best_asg[i] for i in range(n)},
        {i: best_s[i] for i in range(n)},
        {i: best_f[i] for i in range(n)},
        modes,
    )
    return best, Schedule(placement, best, best_order, cores)
