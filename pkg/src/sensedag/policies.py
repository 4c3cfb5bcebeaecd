"""Sensing-side decision policies and the release estimator they share.

Two policies drive band activation:

* joint: per slot, a one-step lookahead scores each feasible unfinished band
  by the DAG makespan a greedy scheduling pass would yield if the slot went
  to that band; the smallest estimate wins (ties to the lowest band id).
* decoupled: per slot, the feasible unfinished band with the largest residual
  demand wins; every branch entry releases only once the last band finishes.

The lookahead needs a release time for bands that have not completed. An
unbounded placeholder would poison every candidate's makespan, so finite
surrogates are substituted:

* expected_rate (default): an unfinished band releases after the slots its
  residual demand would take at its expected per-slot gain (feasibility
  probability times mean feasible-slot gain under the SINR distribution).
* partial_makespan: an unfinished band is excluded outright, together with
  every node reachable only through it; cross-branch nodes stay whenever any
  released branch reaches them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import DagGraph
from .radg import ORDER_MIN_ID, ReleaseVector, Schedule, estimate_makespan, schedule
from .sensing import (
    BandSpec,
    SensingExhaustedError,
    SensingParams,
    SensingState,
    SensingTrace,
    SinrTrace,
    all_complete,
    apply_slot,
    feasible_set,
    gain_bits,
    initial_state,
    release_times_ms,
    residual_demand,
)

KIND_JOINT = "joint"
KIND_DECOUPLED = "decoupled"
POLICY_KINDS = (KIND_JOINT, KIND_DECOUPLED)

EST_EXPECTED_RATE = "expected_rate"
EST_PARTIAL_MAKESPAN = "partial_makespan"
ESTIMATORS = (EST_EXPECTED_RATE, EST_PARTIAL_MAKESPAN)


class BandNeverCompletesError(RuntimeError):
    """The SINR distribution lies entirely at or below the band's threshold."""


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = KIND_JOINT
    estimator: str = EST_EXPECTED_RATE

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"policy kind must be one of {POLICY_KINDS}, got {self.kind!r}")
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")


@dataclass(frozen=True)
class Scenario:
    """Everything one run needs: graph, bands, SINR realization, and cores."""

    graph: DagGraph
    bands: tuple[BandSpec, ...]
    sinr: SinrTrace
    params: SensingParams
    cores: int
    order_rule: str = ORDER_MIN_ID


@dataclass(frozen=True)
class DecisionRecord:
    """One candidate evaluation: estimated makespan under the lookahead policy,
    residual demand under the demand-driven one."""

    t: int
    candidate_band: int
    estimated_latency: float
    chosen: bool


@dataclass
class RunResult:
    """Full reproducible record of one policy run."""

    policy: str
    estimator: str | None
    graph: DagGraph
    sensing: SensingTrace
    releases: dict[int, float]
    schedule: Schedule
    total_latency: float
    decision_log: tuple[DecisionRecord, ...]


@lru_cache(maxsize=None)
def _gauss_nodes(n: int = 64):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def _expected_gain(bandwidth: float, threshold_db: float, lo_db: float, hi_db: float,
                   slot_ms: float, cap: float) -> float:
    if hi_db <= threshold_db:
        return 0.0
    scale = bandwidth * slot_ms / 1000.0
    if lo_db == hi_db:
        se = min(math.log2(1.0 + 10.0 ** (lo_db / 10.0)), cap)
        return scale * se
    a = max(lo_db, threshold_db)
    b = hi_db
    prob = (b - a) / (hi_db - lo_db)

    xs, ws = _gauss_nodes()

    def integral(lo: float, hi: float) -> float:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        gamma = mid + half * xs
        se = np.log2(1.0 + np.power(10.0, gamma / 10.0))
        return half * float(se @ ws)

    # split at the spectral-efficiency cap so each quadrature panel is smooth
    gamma_cap = 10.0 * math.log10(2.0 ** cap - 1.0)
    if gamma_cap <= a:
        area = cap * (b - a)
    elif gamma_cap >= b:
        area = integral(a, b)
    else:
        area = integral(a, gamma_cap) + cap * (b - gamma_cap)
    mean_se = area / (b - a)
    return prob * scale * mean_se


def expected_gain_per_slot(band: BandSpec, params: SensingParams, sinr_range_db) -> float:
    """Expected bits per offered slot: feasibility probability times the mean
    capped slot gain conditional on feasibility, for uniform SINR in dB."""
    lo, hi = sinr_range_db
    return _expected_gain(
        band.bandwidth, band.sinr_threshold_db, float(lo), float(hi),
        params.slot_ms, params.max_spectral_eff,
    )


def estimate_releases(
    state: SensingState,
    t: int,
    tentative_tau: dict,
    bands,
    params: SensingParams,
    sinr_range_db,
    estimator: str = EST_EXPECTED_RATE,
) -> dict:
    """Per-band release times in ms for a lookahead scheduling pass.

    Bands with a (possibly tentative) completion slot release at the end of
    it. An unfinished band gets the estimator's surrogate: a finite projected
    release under expected_rate, or None under partial_makespan to mark its
    branch excluded from the estimate.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    out: dict = {}
    for band in bands:
        k = band.band_id
        tau_k = tentative_tau.get(k)
        if tau_k is not None:
            out[k] = tau_k * params.slot_ms
        elif estimator == EST_PARTIAL_MAKESPAN:
            out[k] = None
        else:
            ghat = expected_gain_per_slot(band, params, sinr_range_db)
            if ghat <= 0.0:
                raise BandNeverCompletesError(
                    f"band {k} can never complete: SINR range {tuple(sinr_range_db)} dB "
                    f"never exceeds threshold {band.sinr_threshold_db} dB"
                )
            need = band.eta - state.x[k]
            slots = math.ceil(need / ghat) if need > 0 else 0
            out[k] = (t + slots) * params.slot_ms
    return out


def _reachable(g: DagGraph, roots) -> set[int]:
    seen = set(roots)
    stack = list(roots)
    while stack:
        v = stack.pop()
        for w in g.succs[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def rollout_makespan(g: DagGraph, band_release_ms: dict, cores: int,
                     order_rule: str = ORDER_MIN_ID) -> float:
    """Greedy-schedule makespan under per-band releases; None marks a band
    whose branch (and anything reachable only through it) is left out."""
    released = {k: v for k, v in band_release_ms.items() if v is not None}
    if len(released) == len(band_release_ms):
        return estimate_makespan(g, ReleaseVector.for_entries(g, released), cores, order_rule)
    if not released:
        return 0.0
    include = _reachable(g, [g.entry_of_branch[k] for k in released])
    rho = ReleaseVector.for_entries(g, released)
    return estimate_makespan(g, rho, cores, order_rule, include=include)


def run_joint(scn: Scenario, estimator: str = EST_EXPECTED_RATE) -> RunResult:
    """One-step lookahead joint policy.

    Every feasible unfinished band is tentatively given the current slot; the
    resulting (surrogate-completed) release vector is scheduled and the band
    with the smallest estimated makespan gets the slot. After all bands
    complete, the final schedule is built from the true completion slots.
    """
    g = scn.graph
    bands = scn.bands
    params = scn.params
    dist = scn.sinr.distribution
    by_id = {b.band_id: b for b in bands}
    state = initial_state(bands)
    activation: list = []
    log: list[DecisionRecord] = []
    while not all_complete(state, bands):
        t = state.t
        if t > params.t_max:
            raise SensingExhaustedError(state, activation)
        candidates = sorted(
            k for k in feasible_set(scn.sinr, bands, t) if state.x[k] < by_id[k].eta
        )
        if not candidates:
            state = apply_slot(state, None, scn.sinr, bands, params)
            activation.append(None)
            continue
        best_k = None
        best_l = math.inf
        rows = []
        for k in candidates:
            band = by_id[k]
            gain = gain_bits(scn.sinr.gamma_db(k, t), band, params)
            tent_x = dict(state.x)
            tent_x[k] += gain
            tent_tau = dict(state.tau)
            if k not in tent_tau and tent_x[k] >= band.eta:
                tent_tau[k] = t
            tent_state = SensingState(t, tent_x, state.tau)
            rel = estimate_releases(tent_state, t, tent_tau, bands, params, dist, estimator)
            est = rollout_makespan(g, rel, scn.cores, scn.order_rule)
            rows.append((k, est))
            if est < best_l:
                best_l = est
                best_k = k
        for k, est in rows:
            log.append(DecisionRecord(t, k, est, k == best_k))
        state = apply_slot(state, best_k, scn.sinr, bands, params)
        activation.append(best_k)
    trace = SensingTrace(tuple(activation), dict(state.tau), dict(state.x))
    releases = release_times_ms(trace, params)
    sched = schedule(g, ReleaseVector.for_entries(g, releases), scn.cores, scn.order_rule)
    return RunResult(KIND_JOINT, estimator, g, trace, releases, sched, sched.makespan, tuple(log))


def run_decoupled(scn: Scenario) -> RunResult:
    """Demand-driven baseline: sense the largest-residual feasible band each
    slot, then release every branch entry at the last completion and schedule
    the whole graph once."""
    g = scn.graph
    bands = scn.bands
    params = scn.params
    by_id = {b.band_id: b for b in bands}
    state = initial_state(bands)
    activation: list = []
    log: list[DecisionRecord] = []
    while not all_complete(state, bands):
        t = state.t
        if t > params.t_max:
            raise SensingExhaustedError(state, activation)
        candidates = sorted(
            k for k in feasible_set(scn.sinr, bands, t) if state.x[k] < by_id[k].eta
        )
        if not candidates:
            state = apply_slot(state, None, scn.sinr, bands, params)
            activation.append(None)
            continue
        best_k = None
        best_r = -math.inf
        rows = []
        for k in candidates:
            r = residual_demand(state, bands, k)
            rows.append((k, r))
            if r > best_r:  # ascending candidate ids, so ties keep the lowest
                best_r = r
                best_k = k
        for k, r in rows:
            log.append(DecisionRecord(t, k, r, k == best_k))
        state = apply_slot(state, best_k, scn.sinr, bands, params)
        activation.append(best_k)
    trace = SensingTrace(tuple(activation), dict(state.tau), dict(state.x))
    start = max(trace.tau.values()) * params.slot_ms
    releases = {b.band_id: start for b in bands}
    sched = schedule(g, ReleaseVector.for_entries(g, releases), scn.cores, scn.order_rule)
    return RunResult(KIND_DECOUPLED, None, g, trace, releases, sched, sched.makespan, tuple(log))


def run_policy(scn: Scenario, policy: PolicyConfig) -> RunResult:
    if policy.kind == KIND_JOINT:
        return run_joint(scn, policy.estimator)
    return run_decoupled(scn)
