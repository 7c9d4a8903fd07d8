"""Opportunistic relay channel access: threshold solvers and simulator."""

from .channel import (
    ChannelRealization,
    FixedGain,
    RayleighFading,
    SystemParams,
    af_rate,
    best_relay_rate,
    gain_for_rate,
    rate_saturation,
    sample_gain_sq,
)
from .contention import (
    ContentionOutcome,
    expected_contention_time,
    sample_contention,
    simulate_contention_slots,
    success_prob,
)
from .errors import (
    CappedPacketError,
    ConfigError,
    ContentionDeadlockError,
    InsufficientDataError,
    InvalidParameterError,
    InvalidStateError,
    PolicyMismatchError,
    RelayStopError,
    SolverFailureError,
)
from .policies import (
    CONTINUE,
    Decision,
    PolicyKind,
    PolicySpec,
    full_csi_decide,
    intuitive_main_decide,
    intuitive_sub_decide,
    optimal_main_decide,
    optimal_sub_decide,
)
from .simulator import (
    PacketRecord,
    SimConfig,
    SimStats,
    StoppingTimeStats,
    default_observations,
    fixed_rate_observations,
    run_scenario1,
    run_scenario2,
    stopping_time_stats,
    throughput_ci,
)
from .solver import (
    EstimatorConfig,
    SubLayerStats,
    ThresholdSolution,
    constant_rate_sampler,
    discrete_rate_sampler,
    expected_positive_part_full_csi,
    full_csi_rate_sampler,
    oracle_threshold_search,
    solve_full_csi_lambda,
    solve_main_gamma_intuitive,
    solve_main_gamma_optimal,
    solve_sub_layer_batch,
    solve_sub_layer_intuitive,
    solve_sub_w,
    solve_sub_w_batch,
    sub_layer_expected_positive_part,
    sub_layer_tail_prob,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
