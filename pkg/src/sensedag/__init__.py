"""Joint simulation of multi-band sensing and multi-branch DAG inference.

A band senses one time slot at a time until it accumulates enough bits; its
completion releases the matching inference branch on a multi-core
accelerator. The package provides the greedy release-aware DAG scheduler, a
lookahead joint sensing policy, a decoupled baseline, an exact tiny-instance
oracle, and a seeded experiment harness.
"""

from .checks import (
    check_decision_log,
    check_run_result,
    check_schedule,
    check_sensing_trace,
    on_chip_lower_bound,
)
from .exec_model import OFF_CHIP, ON_CHIP, CoreState, Placement, data_ready, delta, earliest_start
from .gantt import emit_gantt, render_gantt
from .graph import (
    CROSS_BRANCH,
    CostRanges,
    CycleError,
    DagGraph,
    DagNode,
    DagTopologySpec,
    build_dag,
    topological_order,
    validate,
)
from .harness import (
    ConfigError,
    GainRow,
    ScenarioConfig,
    SweepCell,
    SweepResult,
    SweepSpec,
    apply_axis,
    build_scenario,
    default_scenario,
    derive_seed,
    load_scenario,
    run_scenario,
    run_sweep,
    save_scenario,
    validate_bundle,
    write_bundle,
)
from .oracle import OracleLimit, OracleLimitError, all_topological_orders, optimal_makespan
from .policies import (
    BandNeverCompletesError,
    DecisionRecord,
    PolicyConfig,
    RunResult,
    Scenario,
    estimate_releases,
    expected_gain_per_slot,
    rollout_makespan,
    run_decoupled,
    run_joint,
    run_policy,
)
from .radg import ORDER_MIN_ID, ORDER_RELEASE, ReleaseVector, Schedule, estimate_makespan, schedule
from .sensing import (
    BITS_PER_KB,
    BandSpec,
    IncompleteSensingError,
    InvalidBandChoiceError,
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

__version__ = "0.1.0"
