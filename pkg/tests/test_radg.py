import math

import numpy as np
import pytest

from sensedag import (
    ON_CHIP,
    CostRanges,
    DagTopologySpec,
    ReleaseVector,
    build_dag,
    check_schedule,
    on_chip_lower_bound,
    schedule,
)
from sensedag.radg import ORDER_RELEASE

from conftest import mk_graph, mk_node


def random_instances(n, seed=0, max_cores=4):
    """Generated graphs with random entry releases, for feasibility sweeps."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k = int(rng.integers(1, 6))
        counts = [int(rng.integers(1, 5)) for _ in range(k)]
        ngroups = int(rng.integers(1, k + 1))
        groups = list(range(1, ngroups + 1)) + [int(rng.integers(1, ngroups + 1)) for _ in range(k - ngroups)]
        rng.shuffle(groups)
        g = build_dag(DagTopologySpec(tuple(counts), tuple(groups), bool(rng.integers(0, 2)),
                                      CostRanges(), int(rng.integers(0, 2**32))))
        releases = {b: float(rng.uniform(0, 40)) for b in g.branches()}
        cores = int(rng.integers(1, max_cores + 1))
        yield g, ReleaseVector.for_entries(g, releases), cores


def test_worked_chain_co_locates(chain_pair):
    sched = schedule(chain_pair, ReleaseVector({}), 2)
    pl = sched.placement
    assert pl.m[1] == pl.m[0]
    assert pl.s[0] == 0.0 and pl.f[0] == 5.0
    assert pl.s[1] == 5.5 and pl.f[1] == 10.5
    assert sched.makespan == 10.5
    assert pl.transfer_mode[(0, 1)] == ON_CHIP
    # the rejected off-core candidate could not have started before 12
    other_ready = pl.f[0] + chain_pair.nodes[0].w_off + chain_pair.nodes[1].r_off
    assert other_ready == 12.0


def test_two_independent_branches_run_parallel():
    nodes = [mk_node(0, branch=1, d=5.0), mk_node(1, branch=2, d=7.0)]
    g = mk_graph(nodes, [], {1: 0, 2: 1})
    sched = schedule(g, ReleaseVector({}), 2)
    assert sched.makespan == 7.0
    assert sched.placement.m[0] != sched.placement.m[1]


def test_release_dominated_single_node():
    g = mk_graph([mk_node(0, branch=1, d=4.0)], [], {1: 0})
    sched = schedule(g, ReleaseVector({0: 12.0}), 2)
    assert sched.placement.s[0] == 12.0
    assert sched.placement.f[0] == 16.0
    assert sched.makespan == 16.0


def test_tie_goes_to_lowest_core():
    g = mk_graph([mk_node(0, branch=1, d=1.0)], [], {1: 0})
    assert schedule(g, ReleaseVector({}), 3).placement.m[0] == 0


def test_rejects_non_finite_release(chain_pair):
    with pytest.raises(ValueError):
        schedule(chain_pair, ReleaseVector({0: math.inf}), 2)
    with pytest.raises(ValueError):
        schedule(chain_pair, ReleaseVector({0: -0.5}), 2)
    with pytest.raises(ValueError):
        schedule(chain_pair, ReleaseVector({}), 0)


def test_feasibility_on_random_instances():
    for g, rho, cores in random_instances(200, seed=11):
        sched = schedule(g, rho, cores)
        assert check_schedule(g, rho, cores, sched) == []


def test_lower_bound_holds_on_random_instances():
    for g, rho, cores in random_instances(150, seed=13):
        sched = schedule(g, rho, cores)
        lb = on_chip_lower_bound(g, rho)
        assert sched.makespan >= lb - 1e-9
        assert sched.makespan >= sum(nd.d_cmp for nd in g.nodes) / cores - 1e-9


def test_single_core_makespan_at_least_total_work():
    for g, rho, _ in random_instances(50, seed=17):
        sched = schedule(g, rho, 1)
        assert sched.makespan >= sum(nd.d_cmp for nd in g.nodes)


def test_single_chain_single_core_exact():
    # consecutive same-branch jobs co-locate, so every edge pays on-chip cost
    rng = np.random.default_rng(3)
    nodes = []
    for i in range(6):
        nodes.append(
            mk_node(i, branch=1, d=float(rng.uniform(1, 5)),
                    r_on=float(rng.uniform(0.1, 0.6)), w_on=float(rng.uniform(0.1, 0.6)),
                    r_off=float(rng.uniform(2, 8)), w_off=float(rng.uniform(2, 8)))
        )
    g = mk_graph(nodes, [(i, i + 1) for i in range(5)], {1: 0})
    sched = schedule(g, ReleaseVector({}), 1)
    expected = nodes[0].d_cmp
    for i in range(1, 6):
        expected += nodes[i - 1].w_on + nodes[i].r_on + nodes[i].d_cmp
    assert sched.makespan == expected


def test_single_core_never_idles_unnecessarily():
    # On one core s_v must equal max(previous finish, release, data ready):
    # any later start would be avoidable idleness.
    for g, rho, _ in random_instances(50, seed=23):
        sched = schedule(g, rho, 1)
        pl = sched.placement
        chi = 0.0
        for vid in sched.order:
            nd = g.nodes[vid]
            ready = 0.0
            for u in g.preds[vid]:
                nu = g.nodes[u]
                if nu.branch_id == nd.branch_id:  # same core by construction
                    r = pl.f[u] + nu.w_on + nd.r_on
                else:
                    r = pl.f[u] + nu.w_off + nd.r_off
                ready = max(ready, r)
            assert pl.s[vid] == max(chi, rho.of(vid), ready)
            chi = pl.f[vid]


def _replay_fixed(g, order, assignment, rho_of):
    """Earliest-start simulation with a frozen order and core assignment."""
    chi = {}
    s, f = {}, {}
    for vid in order:
        nd = g.nodes[vid]
        c = assignment[vid]
        start = max(chi.get(c, 0.0), rho_of(vid))
        for u in g.preds[vid]:
            nu = g.nodes[u]
            if assignment[u] == c and nu.branch_id == nd.branch_id:
                r = f[u] + nu.w_on + nd.r_on
            else:
                r = f[u] + nu.w_off + nd.r_off
            start = max(start, r)
        s[vid] = start
        f[vid] = start + nd.d_cmp
        chi[c] = f[vid]
    return s, max(f.values())


def test_uniform_release_cut_never_hurts_fixed_placement():
    # with placement and order frozen, lowering every release by the same
    # amount moves no start later, moves none earlier by more than the cut,
    # and never increases the makespan
    for g, rho, cores in random_instances(60, seed=29):
        sched = schedule(g, rho, cores)
        cut = 5.0
        base_s, base_mk = _replay_fixed(g, sched.order, sched.placement.m, rho.of)
        cut_s, cut_mk = _replay_fixed(
            g, sched.order, sched.placement.m, lambda v: max(0.0, rho.of(v) - cut)
        )
        assert cut_mk <= base_mk + 1e-9
        for vid in sched.order:
            assert cut_s[vid] <= base_s[vid] + 1e-9
            assert base_s[vid] - cut_s[vid] <= cut + 1e-9


def test_release_sorted_order_rule():
    nodes = [mk_node(0, branch=1, d=2.0), mk_node(1, branch=2, d=2.0), mk_node(2, branch=2, d=2.0)]
    g = mk_graph(nodes, [(1, 2)], {1: 0, 2: 1})
    rho = ReleaseVector({0: 50.0, 1: 0.0})
    sched = schedule(g, rho, 1, order_rule=ORDER_RELEASE)
    # the late-released node is ordered last instead of first
    assert sched.order == (1, 2, 0)
    assert check_schedule(g, rho, 1, sched) == []
    position = {v: i for i, v in enumerate(sched.order)}
    assert all(position[u] < position[v] for u, v in g.edges)


def test_makespan_is_max_finish():
    for g, rho, cores in random_instances(30, seed=31):
        sched = schedule(g, rho, cores)
        assert sched.makespan == max(sched.placement.f.values())
