"""Noise mechanisms, NormSub consistency, and the w-event window accountant."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

WINDOW_TOL = 1e-9


class BudgetError(ValueError):
    """A mechanism was called with a non-positive budget or sensitivity."""


class WindowBudgetExceeded(RuntimeError):
    """Some window of ``w`` consecutive timestamps spent more than the cap."""


class NoiseSource:
    """Seeded randomness shared by one pipeline run.

    Every random draw in the library goes through one of these, so a seed
    fixes the whole run. ``spawn`` derives independent children for workers.
    """

    noiseless = False

    def __init__(self, seed=None):
        self._seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self.rng = np.random.Generator(np.random.PCG64(self._seq))

    def laplace(self, scale: float, size=None):
        return self.rng.laplace(0.0, scale, size)

    def uniform(self, size=None):
        return self.rng.random(size)

    def integers(self, high: int, size=None):
        return self.rng.integers(0, high, size)

    def permutation(self, n):
        return self.rng.permutation(n)

    def choice(self, a, size=None, replace=True):
        return self.rng.choice(a, size=size, replace=replace)

    def spawn(self, n: int) -> list["NoiseSource"]:
        return [type(self)(s) for s in self._seq.spawn(n)]


class ZeroNoise(NoiseSource):
    """Debug source: Laplace draws are exactly 0 and the exponential
    mechanism degenerates to argmax. Other randomness stays seeded.

    Output produced with this source is NOT differentially private.
    """

    noiseless = True

    def laplace(self, scale: float, size=None):
        if size is None:
            return 0.0
        return np.zeros(size)


def _check_budget(epsilon: float, sensitivity: float):
    if not epsilon > 0:
        raise BudgetError(f"epsilon must be positive, got {epsilon}")
    if not sensitivity > 0:
        raise BudgetError(f"sensitivity must be positive, got {sensitivity}")


def laplace_perturb(value, epsilon: float, sensitivity: float, ns: NoiseSource):
    """``value + Lap(sensitivity / epsilon)``; arrays get independent noise per entry."""
    _check_budget(epsilon, sensitivity)
    scale = sensitivity / epsilon
    if np.ndim(value) == 0:
        return float(value) + float(ns.laplace(scale))
    value = np.asarray(value, dtype=float)
    return value + ns.laplace(scale, value.shape)


def exponential_choose(candidates: Sequence, scores, epsilon: float, sensitivity: float,
                       ns: NoiseSource):
    """Sample a candidate with probability proportional to
    ``exp(epsilon * score / (2 * sensitivity))``."""
    if len(candidates) == 0:
        raise ValueError("exponential mechanism needs at least one candidate")
    _check_budget(epsilon, sensitivity)
    scores = np.asarray(scores, dtype=float)
    if len(scores) != len(candidates) or not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite, one per candidate")
    if ns.noiseless:
        return candidates[int(np.argmax(scores))]
    logits = epsilon * (scores - scores.max()) / (2.0 * sensitivity)
    w = np.exp(logits)
    cdf = np.cumsum(w)
    idx = int(np.searchsorted(cdf, ns.uniform() * cdf[-1], side="right"))
    return candidates[min(idx, len(candidates) - 1)]


def _shifted_sums(sorted_v: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    """``sum(max(v + d, 0))`` for every ``d`` in ``deltas``; ``sorted_v`` ascending."""
    suffix = np.concatenate([np.cumsum(sorted_v[::-1])[::-1], [0.0]])
    first_pos = np.searchsorted(sorted_v, -deltas, side="right")
    count = len(sorted_v) - first_pos
    return suffix[first_pos] + count * deltas


def normsub_delta(v) -> int:
    """The integer shift used by :func:`normsub`.

    Minimises ``|sum(max(v + d, 0)) - sum(v)|`` over integers ``d``; ties go
    to the smallest ``|d|``, then to the negative shift.
    """
    v = np.asarray(v, dtype=float).ravel()
    if v.size == 0:
        return 0
    bound = int(math.ceil(np.abs(v).max())) + 1
    deltas = np.arange(-bound, bound + 1, dtype=float)
    gap = np.abs(_shifted_sums(np.sort(v), deltas) - v.sum())
    order = np.lexsort((deltas > 0, np.abs(deltas), gap))
    return int(deltas[order[0]])


def normsub(v) -> np.ndarray:
    """Shift ``v`` by the best integer and clip at zero so the total is kept."""
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return v.copy()
    return np.maximum(v + normsub_delta(v), 0.0)


@dataclass(frozen=True)
class PrivacySpend:
    timestamp: int
    parts: Mapping[str, float]

    def __post_init__(self):
        for k, x in self.parts.items():
            if not x >= 0:
                raise ValueError(f"spend part {k!r} must be non-negative, got {x}")

    @property
    def total(self) -> float:
        return float(sum(self.parts.values()))


@dataclass
class WindowAccountant:
    """Enforces that every ``window`` consecutive timestamps spend at most ``cap``."""

    window: int
    cap: float
    ledger: list[PrivacySpend] = field(default_factory=list)
    tol: float = WINDOW_TOL

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not self.cap > 0:
            raise ValueError("cap must be positive")
        self._recent: deque[float] = deque(maxlen=self.window)
        for s in self.ledger:
            self._recent.append(s.total)

    @property
    def next_timestamp(self) -> int:
        return len(self.ledger) + 1

    def window_total(self, extra: float = 0.0) -> float:
        """Spend in the window ending at the next timestamp if it spent ``extra``."""
        recent = list(self._recent)[1:] if len(self._recent) == self.window else list(self._recent)
        return math.fsum(recent) + extra

    def remaining(self) -> float:
        return self.cap - self.window_total()

    def record(self, spend: PrivacySpend) -> "WindowAccountant":
        if spend.timestamp != self.next_timestamp:
            raise ValueError(f"expected spend for t={self.next_timestamp}, got t={spend.timestamp}")
        total = self.window_total(spend.total)
        if total > self.cap + self.tol:
            raise WindowBudgetExceeded(
                f"t={spend.timestamp}: window of {self.window} would spend {total:.12g} > {self.cap}")
        self.ledger.append(spend)
        self._recent.append(spend.total)
        return self

    def window_sums(self) -> np.ndarray:
        """Total spend of every full window (partial windows at the start included)."""
        totals = np.array([s.total for s in self.ledger])
        if not len(totals):
            return totals
        c = np.concatenate([[0.0], np.cumsum(totals)])
        ends = np.arange(1, len(totals) + 1)
        return c[ends] - c[np.maximum(ends - self.window, 0)]


def record_spend(acct: WindowAccountant, spend: PrivacySpend) -> WindowAccountant:
    return acct.record(spend)
