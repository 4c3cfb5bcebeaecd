"""Scenario assembly, seeded runs, experiment sweeps, and artifact emission.

One master seed drives a run. Graph costs and the SINR trace draw from two
sub-seeds derived with fixed stream constants, so an axis that does not touch
the graph (for example the slot horizon) cannot perturb its costs.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import graph as graphmod
from .checks import check_decision_log, check_run_result, check_schedule, check_sensing_trace
from .gantt import render_gantt
from .graph import CostRanges, DagGraph, DagTopologySpec, build_dag
from .policies import (
    KIND_DECOUPLED,
    KIND_JOINT,
    PolicyConfig,
    RunResult,
    Scenario,
    run_policy,
)
from .radg import ReleaseVector
from .sensing import (
    BITS_PER_KB,
    BandSpec,
    SensingParams,
    SinrTrace,
    trace_to_csv,
    trace_to_record,
)

# Sub-seed stream constants; part of the reproducibility contract.
GRAPH_STREAM = 1
SINR_STREAM = 2

_POLICY_ORDER = (KIND_JOINT, KIND_DECOUPLED)

SWEEP_AXES = ("cores", "bandwidth", "sinr_threshold", "eta_profile", "node_profile")

_SCENARIO_KEYS = (
    "K", "C", "branch_node_counts", "align_groups", "fusion_head", "eta_kB",
    "bandwidth_hz", "sinr_range_db", "sinr_threshold_db", "T_max", "slot_ms",
    "cost_ranges", "seed", "policy",
)


class ConfigError(ValueError):
    """Malformed scenario or sweep input."""


def derive_seed(master_seed: int, stream: int) -> int:
    """Deterministic 64-bit sub-seed for one named stream of a master seed."""
    seq = np.random.SeedSequence((int(master_seed), int(stream)))
    return int(seq.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ScenarioConfig:
    """Seeded description of one experiment; everything a run needs."""

    num_bands: int
    cores: int
    branch_node_counts: tuple[int, ...]
    align_groups: tuple[int, ...]
    fusion_head: bool
    eta_kb: tuple[float, ...]
    bandwidth_hz: tuple[float, ...]
    sinr_range_db: tuple[float, float]
    sinr_threshold_db: tuple[float, ...]
    t_max: int
    slot_ms: float
    cost_ranges: CostRanges
    seed: int
    policy: PolicyConfig

    def check(self) -> None:
        k = self.num_bands
        if k < 1:
            raise ConfigError(f"K must be at least 1, got {k}")
        if self.cores < 1:
            raise ConfigError(f"C must be at least 1, got {self.cores}")
        for name in ("branch_node_counts", "align_groups", "eta_kb", "bandwidth_hz", "sinr_threshold_db"):
            seq = getattr(self, name)
            if len(seq) != k:
                raise ConfigError(f"{name} must have K={k} entries, got {len(seq)}")
        if any(c < 1 for c in self.branch_node_counts):
            raise ConfigError(f"branch node counts must be positive: {self.branch_node_counts}")
        if any(e <= 0 for e in self.eta_kb):
            raise ConfigError(f"eta_kB entries must be positive: {self.eta_kb}")
        if any(b <= 0 for b in self.bandwidth_hz):
            raise ConfigError(f"bandwidth_hz entries must be positive: {self.bandwidth_hz}")
        lo, hi = self.sinr_range_db
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ConfigError(f"bad sinr_range_db [{lo}, {hi}]")
        if self.t_max < 1:
            raise ConfigError(f"T_max must be at least 1, got {self.t_max}")
        if self.slot_ms <= 0:
            raise ConfigError(f"slot_ms must be positive, got {self.slot_ms}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        try:
            self.cost_ranges.check()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


def default_scenario(**overrides) -> ScenarioConfig:
    """Baseline configuration: 6 bands on 4 cores, heterogeneous branch depths
    [5,6,7,6,8,6] in two alignment groups, thresholds [0.2,1.5,5,2,7,10] kB,
    180 kHz bands with uniform [5,20] dB SINR against a 6 dB threshold."""
    cfg = ScenarioConfig(
        num_bands=6,
        cores=4,
        branch_node_counts=(5, 6, 7, 6, 8, 6),
        align_groups=(1, 1, 1, 2, 2, 2),
        fusion_head=True,
        eta_kb=(0.2, 1.5, 5.0, 2.0, 7.0, 10.0),
        bandwidth_hz=(180e3,) * 6,
        sinr_range_db=(5.0, 20.0),
        sinr_threshold_db=(6.0,) * 6,
        t_max=2000,
        slot_ms=1.0,
        cost_ranges=CostRanges(),
        seed=0,
        policy=PolicyConfig(),
    )
    return replace(cfg, **overrides) if overrides else cfg


def _per_band(value, k: int, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * k
    out = tuple(float(v) for v in value)
    if len(out) != k:
        raise ConfigError(f"{name} must be a scalar or a list of K={k} values")
    return out


def scenario_to_record(cfg: ScenarioConfig) -> dict:
    cr = cfg.cost_ranges
    return {
        "K": cfg.num_bands,
        "C": cfg.cores,
        "branch_node_counts": list(cfg.branch_node_counts),
        "align_groups": list(cfg.align_groups),
        "fusion_head": cfg.fusion_head,
        "eta_kB": list(cfg.eta_kb),
        "bandwidth_hz": list(cfg.bandwidth_hz),
        "sinr_range_db": list(cfg.sinr_range_db),
        "sinr_threshold_db": list(cfg.sinr_threshold_db),
        "T_max": cfg.t_max,
        "slot_ms": cfg.slot_ms,
        "cost_ranges": {
            "d_cmp": list(cr.d_cmp),
            "r_on": list(cr.r_on),
            "w_on": list(cr.w_on),
            "r_off": list(cr.r_off),
            "w_off": list(cr.w_off),
        },
        "seed": cfg.seed,
        "policy": {"kind": cfg.policy.kind, "estimator": cfg.policy.estimator},
    }


def scenario_from_record(rec: dict) -> ScenarioConfig:
    unknown = set(rec) - set(_SCENARIO_KEYS)
    if unknown:
        raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
    missing = set(_SCENARIO_KEYS) - set(rec)
    if missing:
        raise ConfigError(f"missing scenario fields: {sorted(missing)}")
    try:
        k = int(rec["K"])
        cr_rec = rec["cost_ranges"]
        if set(cr_rec) != {"d_cmp", "r_on", "w_on", "r_off", "w_off"}:
            raise ConfigError(f"cost_ranges must have exactly d_cmp/r_on/w_on/r_off/w_off, got {sorted(cr_rec)}")
        pol = rec["policy"]
        if set(pol) != {"kind", "estimator"}:
            raise ConfigError(f"policy must have exactly kind/estimator, got {sorted(pol)}")
        cfg = ScenarioConfig(
            num_bands=k,
            cores=int(rec["C"]),
            branch_node_counts=tuple(int(c) for c in rec["branch_node_counts"]),
            align_groups=tuple(int(g) for g in rec["align_groups"]),
            fusion_head=bool(rec["fusion_head"]),
            eta_kb=tuple(float(e) for e in rec["eta_kB"]),
            bandwidth_hz=_per_band(rec["bandwidth_hz"], k, "bandwidth_hz"),
            sinr_range_db=(float(rec["sinr_range_db"][0]), float(rec["sinr_range_db"][1])),
            sinr_threshold_db=_per_band(rec["sinr_threshold_db"], k, "sinr_threshold_db"),
            t_max=int(rec["T_max"]),
            slot_ms=float(rec["slot_ms"]),
            cost_ranges=CostRanges(
                tuple(cr_rec["d_cmp"]), tuple(cr_rec["r_on"]), tuple(cr_rec["w_on"]),
                tuple(cr_rec["r_off"]), tuple(cr_rec["w_off"]),
            ),
            seed=int(rec["seed"]),
            policy=PolicyConfig(str(pol["kind"]), str(pol["estimator"])),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"malformed scenario: {exc}") from exc
    cfg.check()
    return cfg


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_hash(cfg: ScenarioConfig) -> str:
    return sha256_text(canonical_json(scenario_to_record(cfg)))


def graph_fingerprint(g: DagGraph) -> str:
    return sha256_text(graphmod.dumps(g))


def trace_fingerprint(tr: SinrTrace) -> str:
    h = hashlib.sha256(tr.values.tobytes())
    h.update(repr((tr.seed, tr.distribution, tr.values.shape)).encode())
    return h.hexdigest()


def save_scenario(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(canonical_json(scenario_to_record(cfg)), encoding="utf-8")


def load_scenario(path) -> ScenarioConfig:
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    return scenario_from_record(rec)


def build_graph(cfg: ScenarioConfig) -> DagGraph:
    spec = DagTopologySpec(
        branch_node_counts=cfg.branch_node_counts,
        align_groups=cfg.align_groups,
        fusion_head=cfg.fusion_head,
        cost_ranges=cfg.cost_ranges,
        seed=derive_seed(cfg.seed, GRAPH_STREAM),
    )
    return build_dag(spec)


def build_sinr(cfg: ScenarioConfig) -> SinrTrace:
    lo, hi = cfg.sinr_range_db
    return SinrTrace.generate(derive_seed(cfg.seed, SINR_STREAM), cfg.num_bands, cfg.t_max, lo, hi)


def build_bands(cfg: ScenarioConfig, g: DagGraph) -> tuple[BandSpec, ...]:
    return tuple(
        BandSpec(
            band_id=k,
            eta=cfg.eta_kb[k - 1] * BITS_PER_KB,
            bandwidth=cfg.bandwidth_hz[k - 1],
            sinr_threshold_db=cfg.sinr_threshold_db[k - 1],
            entry_node=g.entry_of_branch[k],
        )
        for k in range(1, cfg.num_bands + 1)
    )


def build_scenario(cfg: ScenarioConfig) -> Scenario:
    g = build_graph(cfg)
    return Scenario(
        graph=g,
        bands=build_bands(cfg, g),
        sinr=build_sinr(cfg),
        params=SensingParams(slot_ms=cfg.slot_ms, t_max=cfg.t_max),
        cores=cfg.cores,
    )


def run_scenario(cfg: ScenarioConfig) -> RunResult:
    cfg.check()
    return run_policy(build_scenario(cfg), cfg.policy)


# ---------------------------------------------------------------------------
# sweeps

@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axis: str
    values: tuple
    seeds: tuple[int, ...]

    def check(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one axis value")
        if not self.seeds:
            raise ConfigError("sweep needs at least one seed")
        self.base.check()
        for v in self.values:
            apply_axis(self.base, self.axis, v).check()


def apply_axis(base: ScenarioConfig, axis: str, value) -> ScenarioConfig:
    k = base.num_bands
    if axis == "cores":
        return replace(base, cores=int(value))
    if axis == "bandwidth":
        return replace(base, bandwidth_hz=_per_band(value, k, "bandwidth"))
    if axis == "sinr_threshold":
        return replace(base, sinr_threshold_db=_per_band(value, k, "sinr_threshold"))
    if axis == "eta_profile":
        prof = tuple(float(v) for v in value)
        if len(prof) != k:
            raise ConfigError(f"eta_profile value must list K={k} thresholds")
        return replace(base, eta_kb=prof)
    if axis == "node_profile":
        prof = tuple(int(v) for v in value)
        if len(prof) != k:
            raise ConfigError(f"node_profile value must list K={k} branch sizes")
        return replace(base, branch_node_counts=prof)
    raise ConfigError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")


def sweep_spec_to_record(spec: SweepSpec) -> dict:
    values = [list(v) if isinstance(v, tuple) else v for v in spec.values]
    return {
        "base": scenario_to_record(spec.base),
        "axis": spec.axis,
        "values": values,
        "seeds": list(spec.seeds),
    }


def sweep_spec_from_record(rec: dict) -> SweepSpec:
    if set(rec) != {"base", "axis", "values", "seeds"}:
        raise ConfigError(f"sweep spec must have exactly base/axis/values/seeds, got {sorted(rec)}")
    values = tuple(tuple(v) if isinstance(v, list) else v for v in rec["values"])
    spec = SweepSpec(
        base=scenario_from_record(rec["base"]),
        axis=str(rec["axis"]),
        values=values,
        seeds=tuple(int(s) for s in rec["seeds"]),
    )
    spec.check()
    return spec


def load_sweep_spec(path) -> SweepSpec:
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    return sweep_spec_from_record(rec)


@dataclass(frozen=True)
class SweepCell:
    axis_value: object
    seed: int
    policy: str
    t_total_ms: float
    release_min_ms: float
    release_max_ms: float


@dataclass(frozen=True)
class SweepRow:
    axis_value: object
    policy: str
    mean_t: float
    std_t: float
    per_seed: tuple[float, ...]


@dataclass(frozen=True)
class GainRow:
    axis_value: object
    mean_gain_pct: float
    std_gain_pct: float
    n_seeds: int


@dataclass
class SweepResult:
    axis: str
    cells: list[SweepCell]
    gains: list[GainRow]
    missing: list[tuple]

    def rows(self) -> list[SweepRow]:
        grouped: dict[tuple, list[float]] = {}
        order: list[tuple] = []
        for c in self.cells:
            key = (_value_key(c.axis_value), c.policy)
            if key not in grouped:
                grouped[key] = []
                order.append((c.axis_value, c.policy, key))
            grouped[key].append(c.t_total_ms)
        out = []
        for axis_value, policy, key in order:
            ts = grouped[key]
            out.append(SweepRow(axis_value, policy, _mean(ts), _std(ts), tuple(ts)))
        return out


def _value_key(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def _mean(xs) -> float:
    return float(np.mean(xs)) if xs else math.nan


def _std(xs) -> float:
    # sample std; a single seed has no spread to estimate
    return float(np.std(xs, ddof=1)) if len(xs) > 1 else 0.0


def _sweep_task(task):
    axis, value, seed, base = task
    cfg = replace(apply_axis(base, axis, value), seed=seed)
    cells = []
    fingerprints = []
    try:
        for kind in _POLICY_ORDER:
            run_cfg = replace(cfg, policy=PolicyConfig(kind, base.policy.estimator))
            scn = build_scenario(run_cfg)
            fingerprints.append((graph_fingerprint(scn.graph), trace_fingerprint(scn.sinr)))
            result = run_policy(scn, run_cfg.policy)
            rels = result.releases.values()
            cells.append(
                SweepCell(value, seed, kind, result.total_latency, min(rels), max(rels))
            )
    except Exception as exc:  # noqa: BLE001 - cell failures are data, not crashes
        return ("error", value, seed, f"{type(exc).__name__}: {exc}")
    if fingerprints[0] != fingerprints[1]:
        return ("error", value, seed, "policies saw different graph/SINR realizations")
    return ("ok", value, seed, cells)


def run_sweep(spec: SweepSpec, jobs: int | None = 1, out_dir=None) -> SweepResult:
    """Run both policies on the identical realization for every (value, seed).

    Cells that raise are recorded as missing with the reason and excluded
    from aggregates. With jobs != 1 cells run in parallel processes; results
    merge in deterministic (value, seed) order either way.
    """
    spec.check()
    tasks = [(spec.axis, v, s, spec.base) for v in spec.values for s in spec.seeds]
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs == 1:
        outcomes = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_sweep_task, tasks))

    cells: list[SweepCell] = []
    missing: list[tuple] = []
    per_value: dict[str, dict[int, dict[str, float]]] = {}
    value_order: list = []
    for outcome in outcomes:
        tag, value, seed = outcome[0], outcome[1], outcome[2]
        key = _value_key(value)
        if key not in per_value:
            per_value[key] = {}
            value_order.append(value)
        if tag == "error":
            missing.append((value, seed, outcome[3]))
            continue
        cells.extend(outcome[3])
        per_value[key][seed] = {c.policy: c.t_total_ms for c in outcome[3]}

    gains: list[GainRow] = []
    for value in value_order:
        rows = per_value[_value_key(value)]
        gs = []
        for seed in sorted(rows):
            t_joint = rows[seed][KIND_JOINT]
            t_dec = rows[seed][KIND_DECOUPLED]
            gs.append(100.0 * (t_dec - t_joint) / t_dec)
        if gs:
            gains.append(GainRow(value, _mean(gs), _std(gs), len(gs)))

    result = SweepResult(spec.axis, cells, gains, missing)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.csv").write_text(sweep_to_csv(result), encoding="utf-8")
        (out / "gains.csv").write_text(gains_to_csv(result), encoding="utf-8")
        if missing:
            lines = ["axis,value,seed,reason"]
            for value, seed, reason in missing:
                lines.append(_csv_row([spec.axis, _value_key(value), seed, reason]))
            (out / "missing.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return result


def _csv_row(fields) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="").writerow(fields)
    return buf.getvalue()


def sweep_to_csv(res: SweepResult) -> str:
    lines = ["axis,value,seed,policy,T_total_ms,release_min_ms,release_max_ms"]
    for c in res.cells:
        lines.append(
            _csv_row([res.axis, _value_key(c.axis_value), c.seed, c.policy,
                      repr(c.t_total_ms), repr(c.release_min_ms), repr(c.release_max_ms)])
        )
    return "\n".join(lines) + "\n"


def gains_to_csv(res: SweepResult) -> str:
    lines = ["axis,value,mean_gain_pct,std_gain_pct,n_seeds"]
    for gr in res.gains:
        lines.append(
            _csv_row([res.axis, _value_key(gr.axis_value),
                      repr(gr.mean_gain_pct), repr(gr.std_gain_pct), gr.n_seeds])
        )
    return "\n".join(lines) + "\n"


def _parse_value(text: str):
    value = json.loads(text)
    return tuple(value) if isinstance(value, list) else value


def sweep_from_csv(results_text: str, gains_text: str) -> SweepResult:
    """Inverse of sweep_to_csv/gains_to_csv for complete sweeps."""
    rrows = list(csv.reader(io.StringIO(results_text)))
    grows = list(csv.reader(io.StringIO(gains_text)))
    if rrows[0] != ["axis", "value", "seed", "policy", "T_total_ms", "release_min_ms", "release_max_ms"]:
        raise ConfigError(f"unexpected results header: {rrows[0]}")
    if grows[0] != ["axis", "value", "mean_gain_pct", "std_gain_pct", "n_seeds"]:
        raise ConfigError(f"unexpected gains header: {grows[0]}")
    axis = rrows[1][0] if len(rrows) > 1 else (grows[1][0] if len(grows) > 1 else "")
    cells = [
        SweepCell(_parse_value(v), int(seed), policy, float(t), float(rmin), float(rmax))
        for _, v, seed, policy, t, rmin, rmax in rrows[1:]
    ]
    gains = [
        GainRow(_parse_value(v), float(mg), float(sg), int(n))
        for _, v, mg, sg, n in grows[1:]
    ]
    return SweepResult(axis, cells, gains, [])


# ---------------------------------------------------------------------------
# run bundles

def decisions_to_csv(result: RunResult) -> str:
    lines = ["t,candidate_band,estimated_L,chosen"]
    for rec in result.decision_log:
        lines.append(f"{rec.t},{rec.candidate_band},{rec.estimated_latency!r},{int(rec.chosen)}")
    return "\n".join(lines) + "\n"


def result_to_record(cfg: ScenarioConfig, result: RunResult) -> dict:
    scn_sinr = build_sinr(cfg)
    bands = build_bands(cfg, result.graph)
    params = SensingParams(slot_ms=cfg.slot_ms, t_max=cfg.t_max)
    sched = result.schedule
    pl = sched.placement
    return {
        "metadata": {
            "policy": result.policy,
            "estimator": result.estimator,
            "seed": cfg.seed,
            "config_sha256": config_hash(cfg),
            "graph_sha256": graph_fingerprint(result.graph),
            "sinr_sha256": trace_fingerprint(scn_sinr),
        },
        "total_latency_ms": result.total_latency,
        "releases_ms": {str(k): v for k, v in sorted(result.releases.items())},
        "sensing": trace_to_record(result.sensing, scn_sinr, bands, params),
        "schedule": {
            "cores": sched.cores,
            "makespan_ms": sched.makespan,
            "order": list(sched.order),
            "nodes": [
                {"id": vid, "core": pl.m[vid], "start_ms": pl.s[vid], "finish_ms": pl.f[vid]}
                for vid in sorted(pl.m)
            ],
            "edges": [
                {"u": u, "v": v, "mode": pl.transfer_mode[(u, v)]}
                for u, v in sorted(pl.transfer_mode)
            ],
        },
        "decision_log": [
            {"t": r.t, "candidate_band": r.candidate_band,
             "estimated_L": r.estimated_latency, "chosen": r.chosen}
            for r in result.decision_log
        ],
    }


def render_bundle(cfg: ScenarioConfig, result: RunResult, gantt: bool = False) -> dict[str, str]:
    """All bundle files as name -> text; deterministic for a given run."""
    sinr = build_sinr(cfg)
    bands = build_bands(cfg, result.graph)
    params = SensingParams(slot_ms=cfg.slot_ms, t_max=cfg.t_max)
    files = {
        "scenario.json": canonical_json(scenario_to_record(cfg)),
        "graph.json": graphmod.dumps(result.graph),
        "result.json": canonical_json(result_to_record(cfg, result)),
        "sensing.csv": trace_to_csv(result.sensing, sinr, bands, params),
        "decisions.csv": decisions_to_csv(result),
    }
    if gantt:
        files["gantt.svg"] = render_gantt(result)
    return files


def write_bundle(cfg: ScenarioConfig, result: RunResult, out_dir, gantt: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in render_bundle(cfg, result, gantt).items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def validate_bundle(bundle_dir) -> list[str]:
    """Re-run the bundled scenario and re-check every invariant.

    Returns problems (empty means clean): file-level byte differences against
    a fresh deterministic re-run, plus schedule/sensing/decision/record
    violations found by the independent validators.
    """
    root = Path(bundle_dir)
    if not (root / "scenario.json").is_file():
        raise ConfigError(f"{root}: no scenario.json")
    cfg = load_scenario(root / "scenario.json")
    has_gantt = (root / "gantt.svg").is_file()
    result = run_scenario(cfg)
    regen = render_bundle(cfg, result, gantt=has_gantt)
    problems: list[str] = []
    for name, text in regen.items():
        stored = root / name
        if not stored.is_file():
            problems.append(f"{name}: missing from bundle")
        elif stored.read_text(encoding="utf-8") != text:
            problems.append(f"{name}: differs from deterministic re-run")

    scn = build_scenario(cfg)
    rho = ReleaseVector.for_entries(result.graph, result.releases)
    for msg in check_schedule(result.graph, rho, cfg.cores, result.schedule):
        problems.append(f"schedule: {msg}")
    for msg in check_sensing_trace(result.sensing, scn.sinr, scn.bands, scn.params):
        problems.append(f"sensing: {msg}")
    for msg in check_decision_log(result):
        problems.append(f"decisions: {msg}")
    for msg in check_run_result(result, cfg.slot_ms):
        problems.append(f"result: {msg}")
    return problems
