"""Conflict variables and distances over observations, interpretations, actions.

Observation and action conflicts are plain vector differences with L1/L2
distances. Interpretation conflict runs the classification pipeline: a score
per class, softmax to a probability vector, argmax to a one-hot class, and a
cross-entropy distance between the two participants' probability vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import ConfigError, DimensionMismatchError


def _check_same_length(a: Sequence[float], b: Sequence[float], what: str) -> None:
    if len(a) != len(b):
        raise DimensionMismatchError(
            f"{what} vectors differ in length: {len(a)} vs {len(b)}"
        )


def vod(x_a: Sequence[float], x_h: Sequence[float]) -> list[float]:
    """Observation difference vector: x_a - x_h elementwise."""
    _check_same_length(x_a, x_h, "observation")
    return [a - h for a, h in zip(x_a, x_h)]


def d_vod_manhattan(x_a: Sequence[float], x_h: Sequence[float]) -> float:
    """L1 observation distance; reduces to |x_a - x_h| for one variable."""
    _check_same_length(x_a, x_h, "observation")
    return sum(abs(a - h) for a, h in zip(x_a, x_h))


def d_vod_euclidean(x_a: Sequence[float], x_h: Sequence[float]) -> float:
    """L2 observation distance."""
    _check_same_length(x_a, x_h, "observation")
    return math.sqrt(sum((a - h) ** 2 for a, h in zip(x_a, x_h)))


def softmax(scores: Sequence[float]) -> list[float]:
    """Probability vector from scores, max-shifted for numerical stability."""
    if len(scores) < 2:
        raise ConfigError("softmax needs at least two classes")
    top = max(scores)
    exps = [math.exp(s - top) for s in scores]
    total = sum(exps)
    return [e / total for e in exps]


@dataclass(frozen=True)
class OneHotClass:
    """Classification outcome: the winning index and its one-hot encoding."""

    class_index: int
    m: int

    @property
    def as_vector(self) -> list[float]:
        v = [0.0] * self.m
        v[self.class_index] = 1.0
        return v


def classify(probs: Sequence[float]) -> OneHotClass:
    """One-hot at the argmax; ties break toward the lowest index."""
    best = 0
    for i in range(1, len(probs)):
        if probs[i] > probs[best]:
            best = i
    return OneHotClass(class_index=best, m=len(probs))


def vid(y_a: OneHotClass, y_h: OneHotClass) -> list[float]:
    """Interpretation difference vector; zero exactly when the classes agree."""
    if y_a.m != y_h.m:
        raise DimensionMismatchError(
            f"interpretation vectors differ in length: {y_a.m} vs {y_h.m}"
        )
    return [a - h for a, h in zip(y_a.as_vector, y_h.as_vector)]


def d_vid_cross_entropy(
    p_a: Sequence[float], p_h: Sequence[float], epsilon: float = 1e-12
) -> float:
    """Cross-entropy distance -sum(p_h * ln(max(p_a, eps))).

    The human vector acts as the target distribution and the automated
    side's vector as the prediction; with a one-hot target this is exactly
    -ln(p_a at the human's class), up to the epsilon clamp on zeros.
    """
    _check_same_length(p_a, p_h, "probability")
    if not 0.0 < epsilon <= 1e-3:
        raise ValueError("epsilon must lie in (0, 1e-3]")
    return -sum(h * math.log(max(a, epsilon)) for a, h in zip(p_a, p_h) if h != 0.0)


def vad(u_a: Sequence[float], u_h: Sequence[float]) -> list[float]:
    """Action difference vector: u_a - u_h elementwise."""
    _check_same_length(u_a, u_h, "action")
    return [a - h for a, h in zip(u_a, u_h)]


def d_vad(u_a: Sequence[float], u_h: Sequence[float]) -> float:
    """L2 action distance."""
    _check_same_length(u_a, u_h, "action")
    return math.sqrt(sum((a - h) ** 2 for a, h in zip(u_a, u_h)))


@dataclass(frozen=True)
class InterpretationRule:
    """Shared classification rule: class intervals over one monitored variable.

    k ascending boundaries split the variable's axis into k+1 classes. A
    class score is the negated distance from the observation to the class
    interval, divided by the temperature; softmax then turns scores into
    probabilities, so a lower temperature means a more confident classifier.
    """

    boundaries: tuple[float, ...] = (0.5,)
    variable_index: int = 0
    temperature: float = 1.0

    def __post_init__(self):
        if len(self.boundaries) < 1:
            raise ConfigError("interpretation needs at least one class boundary")
        if any(b2 <= b1 for b1, b2 in zip(self.boundaries, self.boundaries[1:])):
            raise ConfigError("interpretation boundaries must be strictly ascending")
        if not all(math.isfinite(b) for b in self.boundaries):
            raise ConfigError("interpretation boundaries must be finite")
        if self.temperature <= 0:
            raise ConfigError("interpretation temperature must be > 0")
        if self.variable_index < 0:
            raise ConfigError("interpretation variable index must be >= 0")

    @property
    def m(self) -> int:
        return len(self.boundaries) + 1

    def scores(self, x: float) -> list[float]:
        """Negated interval distances: 0 for the containing class, < 0 outside."""
        bs = self.boundaries
        out = []
        for i in range(self.m):
            lo = -math.inf if i == 0 else bs[i - 1]
            hi = math.inf if i == len(bs) else bs[i]
            dist = max(lo - x, 0.0, x - hi)
            out.append(-dist / self.temperature)
        return out


@dataclass(frozen=True)
class Interpretation:
    """One participant's read of the situation: scores, probabilities, class."""

    scores: Optional[list[float]]
    probs: list[float]
    one_hot: OneHotClass


def interpret_ai(x: float, rule: InterpretationRule) -> Interpretation:
    """Automated pipeline: scores -> softmax -> one-hot class."""
    scores = rule.scores(x)
    probs = softmax(scores)
    return Interpretation(scores=scores, probs=probs, one_hot=classify(probs))


def interpret_human(x: float, rule: InterpretationRule) -> Interpretation:
    """Human pipeline: the class is read off directly and held with certainty,
    so the probability vector is the one-hot itself."""
    scores = rule.scores(x)
    one_hot = classify(scores)
    return Interpretation(scores=None, probs=one_hot.as_vector, one_hot=one_hot)
