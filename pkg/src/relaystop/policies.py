"""Stopping policies as pure decision functions over observations.

All thresholds are inclusive (stop on >=), matching the rule definitions the
thresholds were solved for. Boundary hits are measure-zero under continuous
fading but matter for the deterministic channel hooks used in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidParameterError, PolicyMismatchError
from .solver import SubLayerStats


class PolicyKind(Enum):
    FULL_CSI = "full-csi"
    INTUITIVE_BILEVEL = "intuitive-bilevel"
    OPTIMAL_BILEVEL = "optimal-bilevel"


@dataclass(frozen=True)
class Decision:
    """Stop (optionally naming the forwarding relay) or keep contending."""

    stop: bool
    relay: int | None = None

    def __post_init__(self) -> None:
        if self.relay is not None and self.relay < 1:
            raise InvalidParameterError("relay index must be >= 1")


CONTINUE = Decision(False)


@dataclass(frozen=True)
class PolicySpec:
    """A solved policy: its kind plus the thresholds that kind reads.

    lambda_star is the full-CSI throughput optimum (the rate threshold is
    twice it); gamma_star is the two-part scheme's throughput optimum.
    """

    kind: PolicyKind
    lambda_star: float | None = None
    gamma_star: float | None = None

    def __post_init__(self) -> None:
        if self.kind is PolicyKind.FULL_CSI:
            _require_finite("lambda_star", self.lambda_star)
        else:
            _require_finite("gamma_star", self.gamma_star)


def _require_finite(name: str, value) -> None:
    if value is None or not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be a finite number for this policy kind")


def _require_kind(spec: PolicySpec, kind: PolicyKind) -> None:
    if spec.kind is not kind:
        raise PolicyMismatchError(f"expected a {kind.value} policy, got {spec.kind.value}")


def full_csi_decide(spec: PolicySpec, rate: float, best_relay: int) -> Decision:
    """Stop at the best relay iff the observed rate reaches 2*lambda_star."""
    _require_kind(spec, PolicyKind.FULL_CSI)
    if rate >= 2.0 * spec.lambda_star:
        return Decision(True, best_relay)
    return CONTINUE


def intuitive_main_decide(spec: PolicySpec, stats: SubLayerStats,
                          t_data: float) -> Decision:
    """Source-level rule of the intuitive scheme, relay chosen later."""
    _require_kind(spec, PolicyKind.INTUITIVE_BILEVEL)
    g = spec.gamma_star
    if stats.expected_bits - g * stats.expected_time >= g * t_data / 2.0:
        return Decision(True)
    return CONTINUE


def intuitive_sub_decide(threshold: float, rate_m: float) -> Decision:
    """Relay-level rule of the intuitive scheme: stop iff rate >= threshold."""
    if not math.isfinite(threshold):
        raise InvalidParameterError("threshold must be finite")
    return Decision(True) if rate_m >= threshold else CONTINUE


def optimal_main_decide(spec: PolicySpec, w_star: float, t_data: float) -> Decision:
    """Source-level rule of the coupled scheme: stop iff W >= (T/2) gamma*."""
    _require_kind(spec, PolicyKind.OPTIMAL_BILEVEL)
    if w_star >= 0.5 * t_data * spec.gamma_star:
        return Decision(True)
    return CONTINUE


def optimal_sub_decide(spec: PolicySpec, w_star: float, rate_m: float,
                       t_data: float) -> Decision:
    """Relay-level rule of the coupled scheme."""
    _require_kind(spec, PolicyKind.OPTIMAL_BILEVEL)
    half_t = 0.5 * t_data
    if half_t * rate_m >= w_star + half_t * spec.gamma_star:
        return Decision(True)
    return CONTINUE
