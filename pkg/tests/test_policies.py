import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from sensedag import (
    BandNeverCompletesError,
    PolicyConfig,
    Scenario,
    SensingExhaustedError,
    SensingParams,
    SensingState,
    SinrTrace,
    build_scenario,
    check_decision_log,
    check_run_result,
    check_schedule,
    check_sensing_trace,
    default_scenario,
    estimate_releases,
    expected_gain_per_slot,
    rollout_makespan,
    run_decoupled,
    run_joint,
    run_policy,
)
from sensedag.policies import EST_PARTIAL_MAKESPAN
from sensedag.radg import ReleaseVector

from conftest import mk_band

# Frozen from the quadrature oracle below: (14/15) * 180 * E[se | U[6,20]]
GHAT_DEFAULT = 742.5753785868002


def quad_expected_gain(bandwidth, threshold, lo, hi, slot_ms, cap):
    """Independent numerical-integration oracle for the expected slot gain."""
    if hi <= threshold:
        return 0.0
    a = max(lo, threshold)
    prob = (hi - a) / (hi - lo)
    se = lambda g: min(math.log2(1.0 + 10.0 ** (g / 10.0)), cap)
    integral, _ = integrate.quad(se, a, hi, limit=200)
    return prob * bandwidth * slot_ms / 1000.0 * (integral / (hi - a))


def test_expected_gain_matches_quadrature(params):
    band = mk_band(1, threshold_db=6.0)
    got = expected_gain_per_slot(band, params, (5.0, 20.0))
    want = quad_expected_gain(180e3, 6.0, 5.0, 20.0, 1.0, 8.0)
    assert got == pytest.approx(want, rel=1e-9)
    assert got == pytest.approx(GHAT_DEFAULT, rel=1e-12)


def test_expected_gain_with_active_cap(params):
    # high SINR range pushes spectral efficiency past the cap on part of it
    band = mk_band(1, threshold_db=6.0)
    got = expected_gain_per_slot(band, params, (20.0, 40.0))
    want = quad_expected_gain(180e3, 6.0, 20.0, 40.0, 1.0, 8.0)
    assert got == pytest.approx(want, rel=1e-9)


def test_expected_gain_degenerate_range(params):
    band = mk_band(1, threshold_db=6.0)
    assert expected_gain_per_slot(band, params, (3.0, 6.0)) == 0.0
    point = expected_gain_per_slot(band, params, (7.0, 7.0))
    assert point == pytest.approx(180.0 * math.log2(1 + 10 ** 0.7))


def test_estimate_releases_no_surrogates_when_complete(params):
    bands = [mk_band(1, eta=1000.0), mk_band(2, eta=1000.0)]
    state = SensingState(8, {1: 1200.0, 2: 1100.0}, {1: 3, 2: 7})
    rel = estimate_releases(state, 8, {1: 3, 2: 7}, bands, params, (5.0, 20.0))
    assert rel == {1: 3.0, 2: 7.0}


def test_estimate_releases_expected_rate_surrogate(params):
    band = mk_band(1, eta=80_000.0, threshold_db=6.0)
    state = SensingState(10, {1: 20_000.0}, {})
    rel = estimate_releases(state, 10, {}, [band], params, (5.0, 20.0))
    # residual 60000 bits at the expected rate takes ceil(60000/ghat) slots
    assert rel == {1: (10 + math.ceil(60_000.0 / GHAT_DEFAULT)) * 1.0}
    assert rel == {1: 91.0}


def test_estimate_releases_zero_residual_releases_now(params):
    band = mk_band(1, eta=500.0)
    state = SensingState(4, {1: 500.0}, {})
    rel = estimate_releases(state, 4, {}, [band], params, (5.0, 20.0))
    assert rel == {1: 4.0}


def test_estimate_releases_partial_sentinel(params):
    bands = [mk_band(1, eta=100.0), mk_band(2, eta=100.0)]
    state = SensingState(5, {1: 200.0, 2: 0.0}, {1: 2})
    rel = estimate_releases(state, 5, {1: 2}, bands, params, (5.0, 20.0), EST_PARTIAL_MAKESPAN)
    assert rel == {1: 2.0, 2: None}


def test_estimate_releases_never_completes(params):
    band = mk_band(1, threshold_db=25.0)
    state = SensingState(1, {1: 0.0}, {})
    with pytest.raises(BandNeverCompletesError):
        estimate_releases(state, 1, {}, [band], params, (5.0, 20.0))


def test_rollout_partial_excludes_unreleased_branches():
    cfg = default_scenario(seed=3)
    scn = build_scenario(cfg)
    g = scn.graph
    full = rollout_makespan(g, {k: 10.0 for k in g.branches()}, cfg.cores)
    nothing = rollout_makespan(g, {k: None for k in g.branches()}, cfg.cores)
    partial = rollout_makespan(g, {k: (10.0 if k == 1 else None) for k in g.branches()}, cfg.cores)
    assert nothing == 0.0
    assert 0.0 < partial < full


def test_single_band_policies_coincide():
    cfg = default_scenario(
        seed=5, num_bands=1, branch_node_counts=(4,), align_groups=(1,),
        eta_kb=(2.0,), bandwidth_hz=(180e3,), sinr_threshold_db=(6.0,),
    )
    scn = build_scenario(cfg)
    joint = run_joint(scn)
    dec = run_decoupled(scn)
    assert joint.sensing == dec.sensing
    assert joint.releases == dec.releases
    assert joint.schedule == dec.schedule
    assert joint.total_latency == dec.total_latency


def test_joint_decisions_replay_as_row_minima():
    for seed in (0, 1, 2):
        result = run_joint(build_scenario(default_scenario(seed=seed)))
        assert check_decision_log(result) == []
        slots_with_rows = {r.t for r in result.decision_log}
        chosen = [r for r in result.decision_log if r.chosen]
        assert len(chosen) == len(slots_with_rows)


def test_decoupled_picks_largest_residual(params):
    cfg = default_scenario(seed=9, policy=PolicyConfig("decoupled"))
    scn = build_scenario(cfg)
    result = run_decoupled(scn)
    assert check_decision_log(result) == []
    # slot 1: nothing accumulated, so the largest eta wins among feasible bands
    first = [r for r in result.decision_log if r.t == result.decision_log[0].t]
    winner = [r for r in first if r.chosen][0]
    assert winner.estimated_latency == max(r.estimated_latency for r in first)


def test_decoupled_releases_all_at_last_completion():
    cfg = default_scenario(seed=2, policy=PolicyConfig("decoupled"))
    result = run_decoupled(build_scenario(cfg))
    t_start = max(result.sensing.tau.values()) * cfg.slot_ms
    assert set(result.releases.values()) == {t_start}
    assert check_run_result(result, cfg.slot_ms) == []


def test_joint_releases_follow_own_completions():
    cfg = default_scenario(seed=2)
    result = run_joint(build_scenario(cfg))
    for k, tau in result.sensing.tau.items():
        assert result.releases[k] == tau * cfg.slot_ms
    # staggered completions yield staggered releases
    if len(set(result.sensing.tau.values())) > 1:
        assert min(result.releases.values()) < max(result.releases.values())
    assert check_run_result(result, cfg.slot_ms) == []


def test_policies_are_work_conserving_and_legal():
    for seed in (4, 8):
        cfg = default_scenario(seed=seed)
        scn = build_scenario(cfg)
        for result in (run_joint(scn), run_decoupled(scn)):
            assert check_sensing_trace(result.sensing, scn.sinr, scn.bands, scn.params) == []
            rho = ReleaseVector.for_entries(result.graph, result.releases)
            assert check_schedule(result.graph, rho, cfg.cores, result.schedule) == []


def test_runs_are_deterministic():
    cfg = default_scenario(seed=21)
    a = run_policy(build_scenario(cfg), cfg.policy)
    b = run_policy(build_scenario(cfg), cfg.policy)
    assert a == b
    cfg_d = replace(cfg, policy=PolicyConfig("decoupled"))
    assert run_policy(build_scenario(cfg_d), cfg_d.policy) == run_policy(
        build_scenario(cfg_d), cfg_d.policy
    )


def test_partial_makespan_estimator_runs_clean():
    cfg = default_scenario(seed=6, policy=PolicyConfig("joint", EST_PARTIAL_MAKESPAN))
    scn = build_scenario(cfg)
    result = run_policy(scn, cfg.policy)
    assert result.estimator == EST_PARTIAL_MAKESPAN
    rho = ReleaseVector.for_entries(result.graph, result.releases)
    assert check_schedule(result.graph, rho, cfg.cores, result.schedule) == []
    assert check_sensing_trace(result.sensing, scn.sinr, scn.bands, scn.params) == []
    assert check_decision_log(result) == []


def test_horizon_exhaustion_raises_with_partial_state():
    cfg = default_scenario(seed=1, t_max=40)
    scn = build_scenario(cfg)
    with pytest.raises(SensingExhaustedError) as err:
        run_joint(scn)
    assert err.value.state.t == 41
    assert len(err.value.activation) == 40
    with pytest.raises(SensingExhaustedError):
        run_decoupled(scn)


def test_joint_prefers_completion_that_lowers_makespan():
    # two bands, one slot from completion each; band 2 guards the longer
    # branch so completing it first shortens the estimated makespan
    counts = (1, 6)
    cfg = default_scenario(
        seed=12, num_bands=2, branch_node_counts=counts, align_groups=(1, 1),
        eta_kb=(0.5, 0.5), bandwidth_hz=(180e3, 180e3), sinr_threshold_db=(-100.0, -100.0),
        sinr_range_db=(19.0, 20.0),
    )
    scn = build_scenario(cfg)
    result = run_joint(scn)
    first_rows = [r for r in result.decision_log if r.t == 1]
    assert len(first_rows) == 2
    chosen = [r for r in first_rows if r.chosen][0]
    assert chosen.candidate_band == 2
    assert chosen.estimated_latency == min(r.estimated_latency for r in first_rows)
