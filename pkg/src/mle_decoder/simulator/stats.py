"""
Logical error rate statistics.

A run of r rounds that fails with per-round probability x flips the logical
outcome with probability 1/2 (1 - (1 - 2x)^r); ``per_round_rate`` inverts that
map. Confidence intervals are Wilson score intervals whose endpoints are
mapped through the same (monotone) conversion.

Near a per-shot rate of 1/2 the inverse map is ill-conditioned: 1 - 2R carries
few significant bits there, so round trips over many rounds lose accuracy.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

from pydantic import BaseModel, Field
from statsmodels.stats.proportion import proportion_confint

from mle_decoder.exceptions import DomainError

logger = logging.getLogger(__name__)

CI_ALPHA = 0.10

Interval = Tuple[float, float]


class TimingStats(BaseModel):
    """Decode wall-time aggregates."""

    total_decode_s: float = 0.0
    mean_decode_us: float = 0.0
    max_decode_us: float = 0.0


class ShotStats(BaseModel):
    """Outcome of a sampling experiment."""

    shots: int = Field(..., ge=0)
    errors: int = Field(..., ge=0, description="Shots with a wrong prediction or low confidence")
    rounds: int = Field(1, ge=1)
    per_shot_rate: float
    per_round_rate: Optional[float] = Field(
        None, description="Unset when the per-shot rate exceeds 1/2"
    )
    ci90_per_shot: Interval
    ci90_per_round: Optional[Interval] = None
    low_confidence_count: int = 0
    nodes_expanded_total: int = 0
    timing: TimingStats = Field(default_factory=TimingStats)
    valid: bool = Field(True, description="False when the run was aborted by a decode error")


def _check_rounds(rounds: int) -> None:
    if rounds < 1:
        raise DomainError(f"Number of rounds must be at least 1, got {rounds}")


def per_round_rate(rate: float, rounds: int) -> float:
    """
    Convert a per-shot logical error rate over ``rounds`` rounds to a per-round rate.

    Raises:
        DomainError: If rate is outside [0, 1/2] or rounds < 1.
    """
    _check_rounds(rounds)
    if not 0.0 <= rate <= 0.5:
        raise DomainError(f"Per-shot rate must be in [0, 1/2], got {rate}")
    if rounds == 1 or rate in (0.0, 0.5):
        return rate
    return -0.5 * math.expm1(math.log1p(-2.0 * rate) / rounds)


def compose_rounds(rate: float, rounds: int) -> float:
    """Per-shot rate of ``rounds`` independent rounds each failing with ``rate``."""
    _check_rounds(rounds)
    if not 0.0 <= rate <= 0.5:
        raise DomainError(f"Per-round rate must be in [0, 1/2], got {rate}")
    if rounds == 1 or rate in (0.0, 0.5):
        return rate
    return -0.5 * math.expm1(rounds * math.log1p(-2.0 * rate))


def wilson_interval(errors: int, shots: int, alpha: float = CI_ALPHA) -> Interval:
    """Wilson score interval for errors/shots, clamped to contain the point estimate."""
    if shots == 0:
        return (0.0, 1.0)
    lo, hi = proportion_confint(errors, shots, alpha=alpha, method="wilson")
    rate = errors / shots
    return (max(0.0, min(float(lo), rate)), min(1.0, max(float(hi), rate)))


def summarize(
    shots: int,
    errors: int,
    rounds: int = 1,
    low_confidence_count: int = 0,
    nodes_expanded_total: int = 0,
    decode_times: Sequence[float] = (),
    valid: bool = True,
) -> ShotStats:
    """Build ShotStats from raw counts and per-shot decode times in seconds."""
    _check_rounds(rounds)
    rate = errors / shots if shots else 0.0
    ci = wilson_interval(errors, shots)
    if rate <= 0.5:
        per_round: Optional[float] = per_round_rate(rate, rounds)
        ci_round: Optional[Interval] = (
            per_round_rate(min(ci[0], 0.5), rounds),
            per_round_rate(min(ci[1], 0.5), rounds),
        )
    else:
        logger.warning(f"Per-shot rate {rate:.4f} exceeds 1/2; per-round rate is undefined")
        per_round, ci_round = None, None

    total = float(sum(decode_times))
    timing = TimingStats(
        total_decode_s=total,
        mean_decode_us=1e6 * total / len(decode_times) if decode_times else 0.0,
        max_decode_us=1e6 * max(decode_times) if decode_times else 0.0,
    )
    return ShotStats(
        shots=shots,
        errors=errors,
        rounds=rounds,
        per_shot_rate=rate,
        per_round_rate=per_round,
        ci90_per_shot=ci,
        ci90_per_round=ci_round,
        low_confidence_count=low_confidence_count,
        nodes_expanded_total=nodes_expanded_total,
        timing=timing,
        valid=valid,
    )
