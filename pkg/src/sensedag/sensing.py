"""Slot-based multi-band sensing: SINR traces, feasibility, information accumulation.

One band at most senses per slot. A band is feasible in a slot when its
instantaneous SINR strictly exceeds its threshold; sensing it accumulates
bits proportional to bandwidth and (capped) spectral efficiency. A band
completes at the first slot its accumulated bits reach its threshold, and
its inference branch releases at the end of that slot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Information thresholds are configured in kB; accumulation runs in bits.
BITS_PER_KB = 8000.0


class InvalidBandChoiceError(ValueError):
    """A slot was assigned to a band that is infeasible or already complete."""


class IncompleteSensingError(RuntimeError):
    def __init__(self, missing):
        self.missing = tuple(sorted(missing))
        super().__init__(f"bands not completed: {list(self.missing)}")


class SensingExhaustedError(RuntimeError):
    """The slot horizon ran out before every band met its threshold."""

    def __init__(self, state: "SensingState", activation):
        self.state = state
        self.activation = tuple(activation)
        super().__init__(f"sensing horizon exhausted at slot {state.t - 1}")


@dataclass(frozen=True)
class BandSpec:
    """Per-band sensing parameters; `eta` is the required information in bits."""

    band_id: int
    eta: float
    bandwidth: float  # Hz
    sinr_threshold_db: float
    entry_node: int

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"band {self.band_id}: eta must be positive, got {self.eta}")
        if self.bandwidth <= 0:
            raise ValueError(f"band {self.band_id}: bandwidth must be positive, got {self.bandwidth}")


@dataclass(frozen=True)
class SensingParams:
    slot_ms: float = 1.0
    max_spectral_eff: float = 8.0  # bit/s/Hz cap
    t_max: int = 2000

    def __post_init__(self):
        if self.slot_ms <= 0:
            raise ValueError(f"slot_ms must be positive, got {self.slot_ms}")
        if self.max_spectral_eff <= 0:
            raise ValueError(f"max_spectral_eff must be positive, got {self.max_spectral_eff}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be at least 1, got {self.t_max}")


@dataclass(frozen=True, eq=False)
class SinrTrace:
    """Exogenous per-band per-slot SINR in dB; row k-1 holds band k."""

    values: np.ndarray
    seed: int
    distribution: tuple[float, float]

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.ndim != 2:
            raise ValueError("SINR trace must be a (bands, slots) array")
        if not np.all(np.isfinite(vals)):
            raise ValueError("SINR trace contains non-finite entries")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        lo, hi = self.distribution
        object.__setattr__(self, "distribution", (float(lo), float(hi)))

    @classmethod
    def generate(cls, seed: int, num_bands: int, num_slots: int, lo_db: float, hi_db: float) -> "SinrTrace":
        """Draw independently per band per slot, uniform in [lo_db, hi_db]."""
        if hi_db < lo_db:
            raise ValueError(f"bad SINR range [{lo_db}, {hi_db}]")
        vals = np.random.default_rng(seed).uniform(lo_db, hi_db, size=(num_bands, num_slots))
        return cls(vals, int(seed), (float(lo_db), float(hi_db)))

    @property
    def num_bands(self) -> int:
        return self.values.shape[0]

    @property
    def num_slots(self) -> int:
        return self.values.shape[1]

    def gamma_db(self, band_id: int, t: int) -> float:
        if not 1 <= t <= self.num_slots:
            raise ValueError(f"slot {t} outside 1..{self.num_slots}")
        if not 1 <= band_id <= self.num_bands:
            raise ValueError(f"unknown band {band_id}")
        return float(self.values[band_id - 1, t - 1])


@dataclass(frozen=True)
class SensingState:
    """Accumulation snapshot before slot `t` runs (t is 1-based)."""

    t: int
    x: dict[int, float]
    tau: dict[int, int]


@dataclass(frozen=True)
class SensingTrace:
    """Realized activation sequence: activation[i] is the band sensed in slot i+1, None = idle."""

    activation: tuple
    tau: dict[int, int]
    final_x: dict[int, float]


def initial_state(bands) -> SensingState:
    return SensingState(1, {b.band_id: 0.0 for b in bands}, {})


def all_complete(state: SensingState, bands) -> bool:
    return all(b.band_id in state.tau for b in bands)


def feasible_set(trace: SinrTrace, bands, t: int) -> set[int]:
    """Bands whose SINR at slot t strictly exceeds their threshold."""
    if not 1 <= t <= trace.num_slots:
        raise ValueError(f"slot {t} outside 1..{trace.num_slots}")
    return {b.band_id for b in bands if trace.values[b.band_id - 1, t - 1] > b.sinr_threshold_db}


def gain_bits(gamma_db: float, band: BandSpec, params: SensingParams) -> float:
    """Bits gained by one sensing slot at the given SINR.

    Bandwidth times slot length times spectral efficiency, the latter capped
    at params.max_spectral_eff.
    """
    se = math.log2(1.0 + 10.0 ** (gamma_db / 10.0))
    if se > params.max_spectral_eff:
        se = params.max_spectral_eff
    return band.bandwidth * (params.slot_ms / 1000.0) * se


def apply_slot(state: SensingState, chosen, trace: SinrTrace, bands, params: SensingParams) -> SensingState:
    """Advance one slot, crediting the chosen band's gain (None = idle).

    The chosen band must be feasible this slot and not yet complete; the
    completion slot is recorded the first time a band crosses its threshold.
    """
    t = state.t
    if chosen is None:
        return SensingState(t + 1, state.x, state.tau)
    band = _band(bands, chosen)
    if chosen in state.tau:
        raise InvalidBandChoiceError(f"band {chosen} already completed at slot {state.tau[chosen]}")
    gamma = trace.gamma_db(chosen, t)
    if not gamma > band.sinr_threshold_db:
        raise InvalidBandChoiceError(
            f"band {chosen} infeasible at slot {t}: {gamma} dB <= {band.sinr_threshold_db} dB"
        )
    x = dict(state.x)
    x[chosen] = x[chosen] + gain_bits(gamma, band, params)
    tau = state.tau
    if x[chosen] >= band.eta:
        tau = dict(tau)
        tau[chosen] = t
    return SensingState(t + 1, x, tau)


def residual_demand(state: SensingState, bands, band_id: int) -> float:
    """Bits still required before the band completes, clamped at zero."""
    band = _band(bands, band_id)
    return max(0.0, band.eta - state.x[band_id])


def release_times_ms(trace: SensingTrace, params: SensingParams) -> dict[int, float]:
    """Per-band release instants: completion slot times slot length.

    Information gathered during slot tau is usable only once the slot has
    elapsed, so the release sits at the end of that slot.
    """
    missing = sorted(set(trace.final_x) - set(trace.tau))
    if missing:
        raise IncompleteSensingError(missing)
    return {k: trace.tau[k] * params.slot_ms for k in sorted(trace.tau)}


def _band(bands, band_id: int) -> BandSpec:
    for b in bands:
        if b.band_id == band_id:
            return b
    raise ValueError(f"unknown band {band_id}")


def trace_slot_records(trace: SensingTrace, sinr: SinrTrace, bands, params: SensingParams) -> list[dict]:
    """Per-slot export rows, rebuilt by replaying the activation sequence."""
    by_id = {b.band_id: b for b in bands}
    x = {b.band_id: 0.0 for b in bands}
    rows = []
    for i, chosen in enumerate(trace.activation):
        t = i + 1
        if chosen is None:
            rows.append({"t": t, "chosen": None, "gamma_db": None, "gain_bits": None, "X_after": None})
            continue
        gamma = sinr.gamma_db(chosen, t)
        gain = gain_bits(gamma, by_id[chosen], params)
        x[chosen] += gain
        rows.append({"t": t, "chosen": chosen, "gamma_db": gamma, "gain_bits": gain, "X_after": x[chosen]})
    return rows


def trace_to_record(trace: SensingTrace, sinr: SinrTrace, bands, params: SensingParams) -> dict:
    """Structured-text form: per-slot records plus final completion data."""
    return {
        "slots": trace_slot_records(trace, sinr, bands, params),
        "tau": {str(k): v for k, v in sorted(trace.tau.items())},
        "release_ms": {str(k): v for k, v in sorted(release_times_ms(trace, params).items())},
    }


def trace_to_csv(trace: SensingTrace, sinr: SinrTrace, bands, params: SensingParams) -> str:
    lines = ["t,chosen,gamma_db,gain_bits,X_after"]
    for row in trace_slot_records(trace, sinr, bands, params):
        if row["chosen"] is None:
            lines.append(f"{row['t']},idle,,,")
        else:
            lines.append(
                f"{row['t']},{row['chosen']},{row['gamma_db']!r},{row['gain_bits']!r},{row['X_after']!r}"
            )
    return "\n".join(lines) + "\n"
