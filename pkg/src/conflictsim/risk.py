"""Distance-to-risk mapping: probability, severity, risk product, and grading.

The probability of a conflict follows a Beta-CDF S-curve of the distance
normalized by d_max: zero at distance zero, one at d_max and beyond, with the
shape set by (alpha, beta). Severity grows as e^d - 1, risk is their product,
and a grade scale buckets the risk for decision support.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .errors import ConfigError

_CF_MAX_ITERATIONS = 300
_CF_EPS = 1e-15
_CF_TINY = 1e-300


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz iteration)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITERATIONS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction failed to converge for "
        f"a={a}, b={b}, x={x}"
    )


def regularized_incomplete_beta(x: float, alpha: float, beta: float) -> float:
    """Beta CDF I_x(alpha, beta) on [0, 1].

    Continued-fraction evaluation; arguments are reflected through
    I_x(a,b) = 1 - I_{1-x}(b,a) when x exceeds (alpha+1)/(alpha+beta+2) to
    stay in the fraction's fast-convergence region.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if alpha <= 0.0 or beta <= 0.0:
        raise ValueError("alpha and beta must be > 0")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(alpha + beta)
        - math.lgamma(alpha)
        - math.lgamma(beta)
        + alpha * math.log(x)
        + beta * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (alpha + 1.0) / (alpha + beta + 2.0):
        value = front * _beta_continued_fraction(alpha, beta, x) / alpha
    else:
        value = 1.0 - front * _beta_continued_fraction(beta, alpha, 1.0 - x) / beta
    # Guard the last-ulp spill outside [0, 1].
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class RiskParams:
    """Beta-curve shape and the distance at which probability saturates."""

    alpha: float = 2.0
    beta: float = 2.0
    d_max: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ConfigError("risk alpha and beta must be > 0")
        if self.d_max <= 0:
            raise ConfigError("risk d_max must be > 0")


def conflict_probability(d: float, params: RiskParams) -> float:
    """Probability of conflict at distance d: the Beta CDF of d/d_max,
    pinned to 0 at d=0 and to 1 for d >= d_max."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    if d >= params.d_max:
        return 1.0
    return regularized_incomplete_beta(d / params.d_max, params.alpha, params.beta)


def severity(d: float) -> float:
    """Consequence measure e^d - 1, uncapped; saturates to inf past
    the float exponent range rather than raising."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    try:
        return math.expm1(d)
    except OverflowError:
        return math.inf


def risk(p: float, s: float) -> float:
    """Risk as the probability-severity product."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    if s < 0.0:
        raise ValueError("severity must be >= 0")
    return p * s


class Grade(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


_GRADE_ORDER = (Grade.LOW, Grade.MEDIUM, Grade.HIGH, Grade.CRITICAL)


@dataclass(frozen=True)
class GradeScale:
    """Three ascending risk thresholds splitting low/medium/high/critical.

    A risk exactly on a threshold belongs to the higher grade.
    """

    thresholds: tuple[float, float, float]

    def __post_init__(self):
        if len(self.thresholds) != 3:
            raise ConfigError("grade scale needs exactly three thresholds")
        if any(t < 0 for t in self.thresholds):
            raise ConfigError("grade thresholds must be >= 0")
        if not (self.thresholds[0] < self.thresholds[1] < self.thresholds[2]):
            raise ConfigError("grade thresholds must be strictly ascending")

    @classmethod
    def from_d_max(cls, d_max: float) -> "GradeScale":
        """Default scale: quartiles of the risk range [0, e^d_max - 1]."""
        top = math.expm1(d_max)
        return cls(thresholds=(0.25 * top, 0.5 * top, 0.75 * top))


def grade(r: float, scale: GradeScale) -> Grade:
    """Grade label for a risk value."""
    if r < 0:
        raise ValueError("risk must be >= 0")
    idx = 0
    for threshold in scale.thresholds:
        if r >= threshold:
            idx += 1
    return _GRADE_ORDER[idx]


class AggregateRule(str, Enum):
    """How the three per-step distances reduce to one reported P/S/R."""

    MAX_NORMALIZED = "max_normalized"
    VOD = "vod"
    VID = "vid"
    VAD = "vad"


@dataclass(frozen=True)
class RiskConfig:
    """Per-distance curve parameters plus the aggregation rule."""

    vod: RiskParams = RiskParams()
    vid: RiskParams = RiskParams()
    vad: RiskParams = RiskParams()
    aggregate: AggregateRule = AggregateRule.MAX_NORMALIZED

    def params_for(self, rule: AggregateRule) -> RiskParams:
        return {
            AggregateRule.VOD: self.vod,
            AggregateRule.VID: self.vid,
            AggregateRule.VAD: self.vad,
        }[rule]


def assess(
    d_vod: float, d_vid: float, d_vad: float, config: RiskConfig, scale: GradeScale
) -> tuple[float, float, float, Grade]:
    """Reported (P, S, R, grade) for one timestep.

    Under max_normalized the distance whose d_max-normalized value is largest
    is assessed with its own curve parameters; ties fall to the earliest of
    observation, interpretation, action. The fixed rules always assess the
    named distance.
    """
    if config.aggregate is AggregateRule.MAX_NORMALIZED:
        candidates = (
            (d_vod / config.vod.d_max, d_vod, config.vod),
            (d_vid / config.vid.d_max, d_vid, config.vid),
            (d_vad / config.vad.d_max, d_vad, config.vad),
        )
        _, d, params = max(candidates, key=lambda c: c[0])
    else:
        params = config.params_for(config.aggregate)
        d = {
            AggregateRule.VOD: d_vod,
            AggregateRule.VID: d_vid,
            AggregateRule.VAD: d_vad,
        }[config.aggregate]
    p = conflict_probability(d, params)
    s = severity(d)
    r = risk(p, s)
    return p, s, r, grade(r, scale)


@dataclass(frozen=True)
class ConflictSample:
    """Per-timestep conflict assessment."""

    t: float
    d_vod: float
    d_vid: float
    d_vad: float
    p: float
    s: float
    r: float
    grade: Grade
