"""Slot-level protocol execution under a solved stopping policy.

One delivered packet is one renewal cycle: contention observations, the
stop decision, and the data transmission. Channel gains are i.i.d. per
observation (block fading at observation granularity, no temporal
correlation). Throughput is total bits over total elapsed time, with a
ratio-estimator standard error over the per-packet (bits, time) pairs.

A run is sequential and fully determined by its seed: contention, first-hop,
second-hop, and rate draws come from independent child streams of the master
seed, and batched pre-drawing consumes them in a fixed chunk order, so
identical (params, spec, config) inputs reproduce bit-identical statistics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import policies
from .channel import RayleighFading, SystemParams, af_rate
from .contention import sample_contention, simulate_contention_slots
from .errors import (
    CappedPacketError,
    InsufficientDataError,
    InvalidParameterError,
)
from .policies import PolicyKind, PolicySpec
from .solver import (
    EstimatorConfig,
    SubLayerStats,
    solve_sub_layer_batch,
    solve_sub_w_batch,
    _second_hop_model,
)

CONTENTION_MODES = ("fast-geometric", "literal-slots")

_OBS_CHUNK = 2048


@dataclass(frozen=True)
class SimConfig:
    """Run-length, seeding, and guard settings for one simulation."""

    packets: int
    seed: int = 0
    sub_observation_cap: int = 1_000_000
    main_observation_cap: int = 1_000_000
    contention_mode: str = "fast-geometric"

    def __post_init__(self) -> None:
        if not isinstance(self.packets, int) or self.packets < 1:
            raise InvalidParameterError("packets must be an integer >= 1")
        if self.sub_observation_cap < 1 or self.main_observation_cap < 1:
            raise InvalidParameterError("observation caps must be >= 1")
        if self.contention_mode not in CONTENTION_MODES:
            raise InvalidParameterError(
                f"contention_mode must be one of {CONTENTION_MODES}")


@dataclass(frozen=True)
class PacketRecord:
    """Per-packet outcome of one renewal cycle."""

    main_observations: int
    sub_observations: int
    rate_at_stop: float
    relay: int
    elapsed: float
    bits: float


@dataclass(frozen=True)
class SimStats:
    """Aggregated simulation output."""

    records: list[PacketRecord]
    total_bits: float
    total_time: float
    throughput: float
    throughput_stderr: float


@dataclass(frozen=True)
class StoppingTimeStats:
    """Distributional summaries of the stop observation index and rate."""

    counts: dict[int, int]
    mean_observations: float
    rate_samples: np.ndarray = field(repr=False)

    def rate_cdf(self, x: float) -> float:
        """Empirical CDF of the rate at the stopping observation."""
        return float(np.searchsorted(self.rate_samples, x, side="right")
                     / self.rate_samples.size)


def default_observations(params: SystemParams, first_hop=None, second_hop=None):
    """Joint sampler of (best rate, best relay) per full-CSI observation."""
    fh = first_hop if first_hop is not None else RayleighFading(params.first_hop_mean_gain)
    sh = second_hop if second_hop is not None else RayleighFading(params.second_hop_mean_gain)

    def sampler(rng: np.random.Generator, n: int):
        shape = (n, params.num_relays)
        rates = af_rate(params.source_power, params.relay_power,
                        np.atleast_2d(fh.sample(rng, shape)),
                        np.atleast_2d(sh.sample(rng, shape)))
        best = rates.argmax(axis=1)
        return rates[np.arange(n), best], best + 1

    return sampler


def fixed_rate_observations(rate: float, relay: int = 1):
    """Observation hook with a constant rate, for closed-form checks."""
    if rate < 0 or not math.isfinite(rate):
        raise InvalidParameterError("rate must be finite and >= 0")

    def sampler(rng: np.random.Generator, n: int):
        return np.full(n, float(rate)), np.full(n, relay, dtype=int)

    return sampler


def run_scenario1(params: SystemParams, spec: PolicySpec, cfg: SimConfig,
                  observation_sampler=None) -> SimStats:
    """Simulate the full-CSI protocol under the pure-threshold policy.

    Per packet: sources contend in whole slots until one wins, the winner
    observes both hops and its best relay rate, and stops iff the rate meets
    the solved threshold; otherwise contention restarts. On stop the data
    transmission takes T and delivers (T/2) * rate bits.
    """
    if spec.kind is not PolicyKind.FULL_CSI:
        raise InvalidParameterError("run_scenario1 needs a full-CSI policy")
    ss = np.random.SeedSequence(cfg.seed)
    rng_cont, rng_obs = (np.random.default_rng(s) for s in ss.spawn(2))
    sampler = observation_sampler or default_observations(params)
    observations = _chunked(lambda n: sampler(rng_obs, n))

    records = []
    for _ in range(cfg.packets):
        waited = 0.0
        n_obs = 0
        while True:
            outcome = _contend(rng_cont, params.num_sources, params.source_prob,
                               params.slot_time, cfg.contention_mode)
            waited += outcome.elapsed
            n_obs += 1
            if n_obs > cfg.main_observation_cap:
                raise CappedPacketError(
                    f"no stop within {cfg.main_observation_cap} observations; "
                    "the threshold likely exceeds the rate support")
            rate, relay = next(observations)
            rate, relay = float(rate), int(relay)
            decision = policies.full_csi_decide(spec, rate, relay)
            if decision.stop:
                break
        records.append(PacketRecord(
            main_observations=n_obs,
            sub_observations=0,
            rate_at_stop=rate,
            relay=decision.relay,
            elapsed=waited + params.data_time,
            bits=0.5 * params.data_time * rate,
        ))
    return _aggregate(records)


def run_scenario2(params: SystemParams, spec: PolicySpec, cfg: SimConfig,
                  est: EstimatorConfig | None = None,
                  first_hop=None, second_hop=None) -> SimStats:
    """Simulate the two-part access protocol under a bi-level policy.

    Source level: contention in half slots; the winner observes only its
    first-hop gains, solves its relay-level statistic (throughput stats for
    the intuitive rule, the reward fixed point for the coupled rule), and
    stops or re-contends. A re-contending winner observes fresh first-hop
    gains, so observations stay i.i.d. On stop it broadcasts for T/2, then relays contend
    in half slots; each winning relay draws its fresh second-hop gain and
    applies the relay-level rule; on its stop the forward leg takes T/2 and
    delivers (T/2) * rate bits. A relay level that exceeds its observation
    cap is a hard error, since it means the thresholds are inconsistent.
    """
    if spec.kind not in (PolicyKind.INTUITIVE_BILEVEL, PolicyKind.OPTIMAL_BILEVEL):
        raise InvalidParameterError("run_scenario2 needs a bi-level policy")
    params.require_relay_prob()
    est = est if est is not None else EstimatorConfig()
    half_slot = 0.5 * params.slot_time
    half_t = 0.5 * params.data_time
    intuitive = spec.kind is PolicyKind.INTUITIVE_BILEVEL

    ss = np.random.SeedSequence(cfg.seed)
    rng_cont, rng_first, rng_second = (np.random.default_rng(s) for s in ss.spawn(3))
    hop = _second_hop_model(params, second_hop)
    observations = _chunked(
        lambda n: _main_statistics(params, est, spec, intuitive, rng_first, n,
                                   first_hop, second_hop))
    gains = _chunked(lambda n: (hop.sample(rng_second, n),))

    records = []
    for _ in range(cfg.packets):
        elapsed = 0.0
        n_obs = 0
        while True:
            outcome = _contend(rng_cont, params.num_sources, params.source_prob,
                               half_slot, cfg.contention_mode)
            elapsed += outcome.elapsed
            n_obs += 1
            if n_obs > cfg.main_observation_cap:
                raise CappedPacketError(
                    f"no source-level stop within {cfg.main_observation_cap} observations")
            f_row, stat = next(observations)
            if intuitive:
                stats = SubLayerStats(*map(float, stat))
                decision = policies.intuitive_main_decide(spec, stats, params.data_time)
            else:
                w_star = float(stat)
                decision = policies.optimal_main_decide(spec, w_star, params.data_time)
            if decision.stop:
                break
        elapsed += half_t  # source broadcast to the relays

        m_obs = 0
        while True:
            outcome = _contend(rng_cont, params.num_relays, params.relay_prob,
                               half_slot, cfg.contention_mode)
            elapsed += outcome.elapsed
            m_obs += 1
            if m_obs > cfg.sub_observation_cap:
                raise CappedPacketError(
                    f"no relay-level stop within {cfg.sub_observation_cap} observations; "
                    "relay thresholds are inconsistent with the source-level stop")
            relay = outcome.winner
            g = next(gains)
            rate_m = af_rate(params.source_power, params.relay_power,
                             float(f_row[relay - 1]), float(g))
            if intuitive:
                decision = policies.intuitive_sub_decide(stats.threshold, rate_m)
            else:
                decision = policies.optimal_sub_decide(spec, w_star, rate_m,
                                                       params.data_time)
            if decision.stop:
                break
        elapsed += half_t  # relay forwards to the destination
        records.append(PacketRecord(
            main_observations=n_obs,
            sub_observations=m_obs,
            rate_at_stop=rate_m,
            relay=relay,
            elapsed=elapsed,
            bits=half_t * rate_m,
        ))
    return _aggregate(records)


def stopping_time_stats(stats: SimStats) -> StoppingTimeStats:
    """Histogram and mean of the stop index plus the rate-at-stop sample."""
    counts: dict[int, int] = {}
    for rec in stats.records:
        counts[rec.main_observations] = counts.get(rec.main_observations, 0) + 1
    mean_obs = float(np.mean([rec.main_observations for rec in stats.records]))
    rates = np.sort(np.array([rec.rate_at_stop for rec in stats.records]))
    return StoppingTimeStats(counts, mean_obs, rates)


def throughput_ci(stats: SimStats) -> tuple[float, float]:
    """Throughput estimate and its ratio-estimator (delta method) stderr."""
    if len(stats.records) < 2:
        raise InsufficientDataError("need at least 2 packets for a standard error")
    bits = np.array([rec.bits for rec in stats.records])
    times = np.array([rec.elapsed for rec in stats.records])
    return _ratio_and_stderr(bits, times)


def _ratio_and_stderr(bits: np.ndarray, times: np.ndarray) -> tuple[float, float]:
    ratio = float(bits.sum() / times.sum())
    n = bits.size
    if n < 2:
        return ratio, 0.0
    # Shift by the first element before centering: mathematically a no-op,
    # but it keeps identical cycles at exactly zero variance.
    b = bits - bits[0]
    t = times - times[0]
    db = b - b.mean()
    dt = t - t.mean()
    var = (db @ db - 2.0 * ratio * (db @ dt) + ratio * ratio * (dt @ dt)) / (n - 1)
    stderr = float(math.sqrt(max(var, 0.0) / n) / times.mean())
    return ratio, stderr


def _aggregate(records: list[PacketRecord]) -> SimStats:
    bits = np.array([rec.bits for rec in records])
    times = np.array([rec.elapsed for rec in records])
    throughput, stderr = _ratio_and_stderr(bits, times)
    return SimStats(
        records=records,
        total_bits=float(bits.sum()),
        total_time=float(times.sum()),
        throughput=throughput,
        throughput_stderr=stderr,
    )


def _contend(rng, n, p, slot, mode):
    if mode == "literal-slots":
        return simulate_contention_slots(rng, n, p, slot)
    return sample_contention(rng, n, p, slot)


def _chunked(draw):
    """Yield scalars/rows from fixed-size batched draws, in draw order."""
    while True:
        arrays = draw(_OBS_CHUNK)
        for i in range(_OBS_CHUNK):
            row = tuple(a[i] for a in arrays)
            yield row if len(row) > 1 else row[0]


def _main_statistics(params, est, spec, intuitive, rng, n, first_hop, second_hop):
    """Draw n first-hop rows and their solved source-level statistics."""
    fh = first_hop if first_hop is not None else RayleighFading(params.first_hop_mean_gain)
    rows = np.atleast_2d(fh.sample(rng, (n, params.num_relays)))
    if intuitive:
        lam, bits, time_, p = solve_sub_layer_batch(params, rows, est, second_hop)
        stats = list(zip(lam, bits, time_, p))
        return rows, stats
    w = solve_sub_w_batch(params, rows, spec.gamma_star, est, second_hop)
    return rows, w
