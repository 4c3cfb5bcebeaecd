import itertools

import numpy as np
import pytest

from sensedag import (
    OracleLimit,
    OracleLimitError,
    Placement,
    ReleaseVector,
    Schedule,
    all_topological_orders,
    check_schedule,
    optimal_makespan,
    schedule,
)

from conftest import mk_graph, mk_node


def test_single_node():
    g = mk_graph([mk_node(0, d=4.0)], [])
    opt, sched = optimal_makespan(g, ReleaseVector({}), 2)
    assert opt == 4.0
    assert check_schedule(g, ReleaseVector({}), 2, sched) == []


def test_two_independent_nodes():
    g = mk_graph([mk_node(0, d=5.0), mk_node(1, d=7.0)], [])
    assert optimal_makespan(g, ReleaseVector({}), 1)[0] == 12.0
    assert optimal_makespan(g, ReleaseVector({}), 2)[0] == 7.0


def test_worked_chain_matches_greedy(chain_pair):
    rho = ReleaseVector({})
    opt, osched = optimal_makespan(chain_pair, rho, 2)
    greedy = schedule(chain_pair, rho, 2)
    assert opt == 10.5
    assert greedy.makespan == opt
    assert check_schedule(chain_pair, rho, 2, osched) == []


def test_orders_enumeration():
    chain = mk_graph([mk_node(i) for i in range(3)], [(0, 1), (1, 2)])
    assert all_topological_orders(chain) == [(0, 1, 2)]
    diamond = mk_graph([mk_node(i) for i in range(4)], [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert all_topological_orders(diamond) == [(0, 1, 2, 3), (0, 2, 1, 3)]
    free = mk_graph([mk_node(i) for i in range(3)], [])
    assert sorted(all_topological_orders(free)) == sorted(itertools.permutations(range(3)))


def _random_tiny(rng):
    n = int(rng.integers(2, 6))
    split = int(rng.integers(0, n + 1))
    nodes = []
    for i in range(n):
        nodes.append(
            mk_node(
                i,
                branch=1 if i < split else 0,
                d=float(rng.integers(1, 10)) * 0.5,
                r_on=float(rng.integers(0, 3)) * 0.5,
                w_on=float(rng.integers(0, 3)) * 0.5,
                r_off=float(rng.integers(2, 7)) * 0.5,
                w_off=float(rng.integers(2, 7)) * 0.5,
            )
        )
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
    entries = {1: 0} if split > 0 else {}
    g = mk_graph(nodes, edges, entries)
    rho = {}
    if rng.random() < 0.5:
        for i in range(n):
            if not g.preds[i] and rng.random() < 0.5:
                rho[i] = float(rng.integers(0, 7)) * 0.5
    return g, ReleaseVector(rho)


def test_greedy_never_beats_oracle_on_random_tinies():
    rng = np.random.default_rng(101)
    for _ in range(80):
        g, rho = _random_tiny(rng)
        for cores in (1, 2):
            opt, osched = optimal_makespan(g, rho, cores)
            greedy = schedule(g, rho, cores)
            assert greedy.makespan >= opt - 1e-12
            assert check_schedule(g, rho, cores, osched) == []


def test_core_relabeling_keeps_schedule_feasible():
    rng = np.random.default_rng(55)
    for _ in range(20):
        g, rho = _random_tiny(rng)
        opt, sched = optimal_makespan(g, rho, 2)
        pl = sched.placement
        swapped = Placement(
            {v: 1 - c for v, c in pl.m.items()},
            dict(pl.s),
            dict(pl.f),
            dict(pl.transfer_mode),
        )
        mirror = Schedule(swapped, sched.makespan, sched.order, sched.cores)
        assert check_schedule(g, rho, 2, mirror) == []
        assert max(swapped.f.values()) == opt


def test_limits_enforced():
    g = mk_graph([mk_node(i) for i in range(9)], [])
    with pytest.raises(OracleLimitError):
        optimal_makespan(g, ReleaseVector({}), 2)
    small = mk_graph([mk_node(i) for i in range(4)], [])
    with pytest.raises(OracleLimitError):
        optimal_makespan(small, ReleaseVector({}), 3)
    with pytest.raises(OracleLimitError):
        optimal_makespan(small, ReleaseVector({}), 2, OracleLimit(node_budget=10))
