"""Mergeable sufficient statistics and the correlation estimators built on them.

Only integer counts are stored: ``n[ij]`` trials with settings ``(i, j)`` and
``s[ij]``, the sum of ``x * y`` over those trials.  Every estimator divides
at report time, which makes ``C = p_hat * Q`` hold up to one rounding and
keeps merged results independent of how the trials were partitioned.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CountOverflowError, EmptyAccumulatorError, UnmeasuredContextError
from .probability_space import CELLS, TrialOutcome

INT64_MAX = 2**63 - 1
ABSOLUTE = "absolute"
CONDITIONAL = "conditional"


def _check_count(v):
    if v > INT64_MAX:
        raise CountOverflowError(f"count {v} exceeds the 64-bit accumulator range")
    return v


@dataclass(frozen=True)
class CorrelationAccumulator:
    """Per-cell counts ``n`` and product sums ``s`` in row-major cell order."""

    n: tuple = (0, 0, 0, 0)
    s: tuple = (0, 0, 0, 0)

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        s = tuple(int(v) for v in self.s)
        if len(n) != 4 or len(s) != 4:
            raise ValueError("accumulator needs exactly four cells")
        for nv, sv in zip(n, s):
            if nv < 0 or abs(sv) > nv:
                raise ValueError(f"inconsistent cell: n={nv}, s={sv}")
        _check_count(sum(n))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "s", s)

    @property
    def total(self) -> int:
        return sum(self.n)

    N = total

    @classmethod
    def from_trials(cls, cell, x, y) -> "CorrelationAccumulator":
        """Bulk accumulation of ``(cell, x, y)`` arrays from a kernel."""
        n, s = kernels.accumulate(np.asarray(cell, np.int8), np.asarray(x, np.int8), np.asarray(y, np.int8))
        return cls(tuple(n.tolist()), tuple(s.tolist()))

    def counts(self) -> np.ndarray:
        return np.array(self.n, dtype=np.int64).reshape(2, 2)

    def sums(self) -> np.ndarray:
        return np.array(self.s, dtype=np.int64).reshape(2, 2)

    def __add__(self, other):
        return merge(self, other)


def record_trial(acc: CorrelationAccumulator, t: TrialOutcome) -> CorrelationAccumulator:
    c = t.settings.cell
    n = list(acc.n)
    s = list(acc.s)
    n[c] += 1
    s[c] += t.x * t.y
    return CorrelationAccumulator(tuple(n), tuple(s))


def merge(a: CorrelationAccumulator, b: CorrelationAccumulator) -> CorrelationAccumulator:
    n = tuple(_check_count(u + v) for u, v in zip(a.n, b.n))
    s = tuple(u + v for u, v in zip(a.s, b.s))
    return CorrelationAccumulator(n, s)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    values: np.ndarray
    standard_errors: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in (ABSOLUTE, CONDITIONAL):
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64).reshape(2, 2))
        object.__setattr__(self, "standard_errors", np.asarray(self.standard_errors, dtype=np.float64).reshape(2, 2))

    @classmethod
    def exact(cls, values, kind) -> "CorrelationTable":
        """Table of known correlations with zero standard errors."""
        return cls(np.asarray(values, dtype=np.float64), np.zeros((2, 2)), kind)

    def __getitem__(self, pair):
        i, j = pair
        return float(self.values[i - 1, j - 1])

    def se(self, i, j) -> float:
        return float(self.standard_errors[i - 1, j - 1])


def _require_trials(acc):
    if acc.total == 0:
        raise EmptyAccumulatorError("no trials recorded")


def setting_frequency(acc: CorrelationAccumulator) -> np.ndarray:
    _require_trials(acc)
    return acc.counts() / acc.total


def absolute_correlation(acc: CorrelationAccumulator) -> CorrelationTable:
    """Empirical ``<A_i, B_j>`` over the whole sample space.

    The per-trial product ``A_i B_j`` is ``x y`` on trials with settings
    ``(i, j)`` and 0 on every other trial, so its mean is ``s_ij / N`` and
    its second moment ``n_ij / N``.  The standard error is the population
    standard deviation of that product over ``sqrt(N)``.
    """
    _require_trials(acc)
    N = acc.total
    mean = acc.sums() / N
    second = acc.counts() / N
    var = np.maximum(second - mean * mean, 0.0)
    return CorrelationTable(mean, np.sqrt(var / N), ABSOLUTE)


def conditional_correlation(acc: CorrelationAccumulator) -> CorrelationTable:
    """Empirical ``<a_i, b_j>``: the mean of ``x y`` within each setting pair."""
    for cell, nv in zip(CELLS, acc.n):
        if nv == 0:
            raise UnmeasuredContextError(cell)
    n = acc.counts()
    q = acc.sums() / n
    se = np.sqrt(np.maximum(1.0 - q * q, 0.0) / n)
    return CorrelationTable(q, se, CONDITIONAL)


def identity_residual(acc: CorrelationAccumulator) -> float:
    """``max |C_ij - p_ij Q_ij|`` on this accumulator."""
    c = absolute_correlation(acc).values
    q = conditional_correlation(acc).values
    p = setting_frequency(acc)
    return float(np.max(np.abs(c - p * q)))


def standard_error_of_sum(table: CorrelationTable) -> float:
    return math.sqrt(float(np.sum(table.standard_errors**2)))
