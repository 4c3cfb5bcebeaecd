"""Independent feasibility validators for schedules, traces, and run records.

Every rule here is re-derived from raw node fields and recorded outputs
instead of calling the scheduler's own helpers, so a defect there cannot
mask itself. Validators report violations as strings and never raise on a
bad schedule; an empty list means clean.
"""

from __future__ import annotations

import math

from .exec_model import OFF_CHIP, ON_CHIP
from .graph import DagGraph
from .radg import ReleaseVector, Schedule
from .sensing import BandSpec, SensingParams, SensingTrace, SinrTrace


def check_schedule(g: DagGraph, rho: ReleaseVector, cores: int, sched: Schedule) -> list[str]:
    """Feasibility of a full schedule: assignment, timing identity, release,
    precedence with transfer delays, and per-core non-overlap."""
    problems: list[str] = []
    pl = sched.placement
    ids = [nd.id for nd in g.nodes]

    missing = sorted(set(ids) - set(pl.m))
    if missing:
        problems.append(f"nodes never assigned to a core: {missing}")
    for vid, core in sorted(pl.m.items()):
        if not 0 <= core < cores:
            problems.append(f"node {vid} assigned to core {core} outside 0..{cores - 1}")
        if vid not in pl.s or vid not in pl.f:
            problems.append(f"node {vid} has no recorded start/finish")

    by_id = {nd.id: nd for nd in g.nodes}
    for vid in sorted(set(pl.m) & set(pl.s) & set(pl.f)):
        nd = by_id.get(vid)
        if nd is None:
            problems.append(f"schedule places unknown node {vid}")
            continue
        if pl.f[vid] != pl.s[vid] + nd.d_cmp:
            problems.append(
                f"node {vid}: finish {pl.f[vid]} != start {pl.s[vid]} + compute {nd.d_cmp}"
            )
        if pl.s[vid] < rho.of(vid):
            problems.append(f"node {vid}: start {pl.s[vid]} before release {rho.of(vid)}")

    for u, v in g.edges:
        if u not in pl.m or v not in pl.m:
            continue
        nu, nv = by_id[u], by_id[v]
        on_chip = pl.m[u] == pl.m[v] and nu.branch_id == nv.branch_id
        mode = pl.transfer_mode.get((u, v))
        if mode != (ON_CHIP if on_chip else OFF_CHIP):
            problems.append(f"edge ({u}, {v}): recorded mode {mode} contradicts placement")
        if on_chip:
            ready = pl.f[u] + nu.w_on + nv.r_on
        else:
            ready = pl.f[u] + nu.w_off + nv.r_off
        if pl.s[v] < ready:
            problems.append(f"edge ({u}, {v}): consumer starts {pl.s[v]} before data ready {ready}")

    per_core: dict[int, list[tuple[float, float, int]]] = {}
    for vid, core in pl.m.items():
        if vid in pl.s and vid in pl.f:
            per_core.setdefault(core, []).append((pl.s[vid], pl.f[vid], vid))
    for core, jobs in sorted(per_core.items()):
        jobs.sort()
        for (s1, f1, v1), (s2, f2, v2) in zip(jobs, jobs[1:]):
            if s2 < f1:
                problems.append(f"core {core}: jobs {v1} and {v2} overlap ({s1},{f1}) vs ({s2},{f2})")

    if pl.f:
        true_makespan = max(pl.f.values())
        if sched.makespan != true_makespan:
            problems.append(f"makespan {sched.makespan} != max finish {true_makespan}")
    return problems


def check_sensing_trace(
    trace: SensingTrace,
    sinr: SinrTrace,
    bands,
    params: SensingParams,
    work_conserving: bool = True,
) -> list[str]:
    """Replay an activation sequence against the raw SINR trace.

    Verifies per-slot legality (feasible, unfinished band), first-crossing
    completion slots, conservation of accumulated bits (recomputed with
    math.fsum, tolerance 1e-9 relative), and optionally work conservation.
    """
    problems: list[str] = []
    by_id = {b.band_id: b for b in bands}
    x = {b.band_id: 0.0 for b in bands}
    gains: dict[int, list[float]] = {b.band_id: [] for b in bands}
    tau: dict[int, int] = {}
    for i, chosen in enumerate(trace.activation):
        t = i + 1
        feasible_unfinished = [
            k
            for k, b in by_id.items()
            if k not in tau and sinr.gamma_db(k, t) > b.sinr_threshold_db
        ]
        if chosen is None:
            if work_conserving and feasible_unfinished:
                problems.append(f"slot {t}: idle while bands {sorted(feasible_unfinished)} were available")
            continue
        if chosen not in by_id:
            problems.append(f"slot {t}: unknown band {chosen}")
            continue
        if chosen not in feasible_unfinished:
            problems.append(f"slot {t}: band {chosen} was not a feasible unfinished choice")
            continue
        band = by_id[chosen]
        se = math.log2(1.0 + 10.0 ** (sinr.gamma_db(chosen, t) / 10.0))
        se = min(se, params.max_spectral_eff)
        gain = band.bandwidth * (params.slot_ms / 1000.0) * se
        gains[chosen].append(gain)
        x[chosen] += gain
        if chosen not in tau and x[chosen] >= band.eta:
            tau[chosen] = t
    if tau != trace.tau:
        problems.append(f"completion slots differ: replay {tau} vs recorded {trace.tau}")
    for k in sorted(by_id):
        total = math.fsum(gains[k])
        recorded = trace.final_x.get(k)
        if recorded is None:
            problems.append(f"band {k}: no recorded final accumulation")
        elif not math.isclose(total, recorded, rel_tol=1e-9, abs_tol=1e-9):
            problems.append(f"band {k}: accumulated {recorded} but replay sums to {total}")
    return problems


def check_decision_log(result) -> list[str]:
    """Each slot's committed choice must win its own recorded candidate row:
    smallest estimate for the lookahead policy, largest residual for the
    demand-driven one, ties to the lowest band id."""
    problems: list[str] = []
    by_slot: dict[int, list] = {}
    for rec in result.decision_log:
        by_slot.setdefault(rec.t, []).append(rec)
    minimize = result.policy == "joint"
    for t, recs in sorted(by_slot.items()):
        chosen = [r for r in recs if r.chosen]
        if len(chosen) != 1:
            problems.append(f"slot {t}: {len(chosen)} chosen candidates recorded")
            continue
        if minimize:
            best = min(r.estimated_latency for r in recs)
            winners = [r.candidate_band for r in recs if r.estimated_latency == best]
        else:
            best = max(r.estimated_latency for r in recs)
            winners = [r.candidate_band for r in recs if r.estimated_latency == best]
        if chosen[0].candidate_band != min(winners):
            problems.append(
                f"slot {t}: chose band {chosen[0].candidate_band}, "
                f"recorded values argue for {min(winners)}"
            )
    return problems


def check_run_result(result, slot_ms: float) -> list[str]:
    """Cross-field invariants of a completed run record."""
    problems: list[str] = []
    if result.total_latency != result.schedule.makespan:
        problems.append(
            f"total latency {result.total_latency} != schedule makespan {result.schedule.makespan}"
        )
    tau = result.sensing.tau
    if set(result.releases) != set(tau):
        problems.append(f"release keys {sorted(result.releases)} != completed bands {sorted(tau)}")
    elif result.policy == "decoupled":
        start = max(tau.values()) * slot_ms
        for k, rel in sorted(result.releases.items()):
            if rel != start:
                problems.append(f"band {k}: decoupled release {rel} != common start {start}")
    else:
        for k, rel in sorted(result.releases.items()):
            if rel != tau[k] * slot_ms:
                problems.append(f"band {k}: release {rel} != completion {tau[k]} * {slot_ms}")
    unplaced = {nd.id for nd in result.graph.nodes} - set(result.schedule.placement.m)
    if unplaced:
        problems.append(f"final schedule misses nodes {sorted(unplaced)}")
    return problems


def on_chip_lower_bound(g: DagGraph, rho: ReleaseVector) -> float:
    """Release-respecting longest path pricing every edge at on-chip cost.

    A true makespan lower bound for any core count, since on-chip transfer
    never exceeds off-chip and contention only delays further.
    """
    finish: dict[int, float] = {}
    for vid in _id_topological(g):
        nd = g.nodes[vid]
        start = rho.of(vid)
        for u in g.preds[vid]:
            ready = finish[u] + g.nodes[u].w_on + nd.r_on
            if ready > start:
                start = ready
        finish[vid] = start + nd.d_cmp
    return max(finish.values()) if finish else 0.0


def _id_topological(g: DagGraph) -> list[int]:
    # Local Kahn pass; deliberately not the graph module's implementation.
    n = g.num_nodes
    indeg = [len(p) for p in g.preds]
    stack = sorted((i for i in range(n) if indeg[i] == 0), reverse=True)
    order = []
    while stack:
        v = stack.pop()
        order.append(v)
        for w in g.succs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
    if len(order) < n:
        raise ValueError("graph is cyclic")
    return order
