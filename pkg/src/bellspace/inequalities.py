"""CHSH-type expressions evaluated against their bounds.

All forms share one sign pattern, ``+Q11 - Q12 + Q22 + Q21``.  A form is
flagged violated only when its value exceeds the bound by more than
``guard_k`` standard errors.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import NotApplicableError, UnmeasuredContextError, ZeroProbabilityError
from .estimators import ABSOLUTE, CONDITIONAL, CorrelationTable

# (cell, sign) in the order the terms are written
SIGNS = (((1, 1), +1), ((1, 2), -1), ((2, 2), +1), ((2, 1), +1))

DEFAULT_GUARD_K = 5.0
UNIFORM_TOL = 0.01
INTERMEDIATE_TOL = 1e-9

CONDITIONAL_BOUND = 2.0
ABSOLUTE_BOUND = 0.5
GENERALIZED_BOUND = 2.0
WEAK_ABSOLUTE_BOUND = 2.0
WEAK_BELLIAN_BOUND = 8.0
WEAK_BELLIAN_BOUND_4 = 4.0


def chsh_combination(table):
    """Signed sum ``t11 - t12 + t22 + t21`` of a 2x2 table (no absolute value).

    Works for nested sequences of numbers, Fractions or broadcastable arrays.
    """
    total = 0
    for (i, j), sign in SIGNS:
        total = total + sign * table[i - 1][j - 1]
    return total


@dataclass(frozen=True)
class FormResult:
    name: str
    value: float
    bound: Optional[float]
    standard_error: float
    guard_k: float

    @property
    def slack(self) -> Optional[float]:
        return None if self.bound is None else self.bound - self.value

    @property
    def violated(self) -> Optional[bool]:
        if self.bound is None:
            return None
        return self.value > self.bound + self.guard_k * self.standard_error

    def to_dict(self):
        return {
            "value": self.value,
            "bound": self.bound,
            "slack": self.slack,
            "standard_error": self.standard_error,
            "violated": self.violated,
        }


def _check_kind(table: CorrelationTable, kind):
    if table.kind != kind:
        raise ValueError(f"expected a {kind} correlation table, got {table.kind}")
    for i in (1, 2):
        for j in (1, 2):
            if not math.isfinite(table[i, j]):
                raise UnmeasuredContextError((i, j))


def _quadrature(errors) -> float:
    return math.sqrt(float(sum(e * e for e in errors)))


def _form(name, table: CorrelationTable, bound, guard_k, scale=None):
    scale = np.ones((2, 2)) if scale is None else scale
    value = abs(float(chsh_combination(table.values / scale)))
    se = _quadrature((table.standard_errors / scale).ravel())
    return FormResult(name, value, bound, se, guard_k)


def is_uniform(p_hat, tol=UNIFORM_TOL) -> bool:
    return bool(np.all(np.abs(np.asarray(p_hat, dtype=np.float64) - 0.25) <= tol))


def chsh_conditional(Q: CorrelationTable, guard_k=DEFAULT_GUARD_K) -> FormResult:
    _check_kind(Q, CONDITIONAL)
    return _form("conditional", Q, CONDITIONAL_BOUND, guard_k)


def chsh_absolute(C: CorrelationTable, p_hat, guard_k=DEFAULT_GUARD_K) -> FormResult:
    """Absolute-correlation combination; its bound 1/2 holds for uniform selection only.

    For any other selection table the bound is reported as ``None``.
    """
    _check_kind(C, ABSOLUTE)
    bound = ABSOLUTE_BOUND if is_uniform(p_hat) else None
    return _form("absolute", C, bound, guard_k)


def chsh_generalized(C: CorrelationTable, p_hat, guard_k=DEFAULT_GUARD_K) -> FormResult:
    """Combination of ``C_ij / p_ij``, bounded by 2 for any selection table."""
    _check_kind(C, ABSOLUTE)
    p = np.asarray(p_hat, dtype=np.float64).reshape(2, 2)
    for i in (1, 2):
        for j in (1, 2):
            if p[i - 1, j - 1] <= 0:
                raise ZeroProbabilityError((i, j))
    return _form("generalized", C, GENERALIZED_BOUND, guard_k, scale=p)


@dataclass(frozen=True)
class WeakBoundsReport:
    absolute_vs_2: FormResult
    bellian_vs_8: FormResult
    bellian_vs_4: FormResult

    def forms(self):
        return (self.absolute_vs_2, self.bellian_vs_8, self.bellian_vs_4)


def weak_bounds_report(C: CorrelationTable, Q: CorrelationTable, guard_k=DEFAULT_GUARD_K) -> WeakBoundsReport:
    """The loose bounds: 2 on absolute correlations, 8 and 4 on conditional ones."""
    _check_kind(C, ABSOLUTE)
    _check_kind(Q, CONDITIONAL)
    return WeakBoundsReport(
        _form("weak_absolute", C, WEAK_ABSOLUTE_BOUND, guard_k),
        _form("weak_bellian", Q, WEAK_BELLIAN_BOUND, guard_k),
        _form("weak_bellian_4", Q, WEAK_BELLIAN_BOUND_4, guard_k),
    )


@dataclass(frozen=True)
class IntermediateBound:
    lhs: float
    rhs: float
    margin: float
    holds: bool

    def to_dict(self):
        return asdict(self)


def intermediate_bound_check(Q: CorrelationTable, C: CorrelationTable, p_hat) -> IntermediateBound:
    """Check ``|C11 - C12| <= 1/2 - |Q22 + Q21| / 4`` under uniform selection.

    This is the minimising branch of ``1/2 +- (Q22 + Q21)/4``.  Local models
    satisfy it; singlet statistics can drive ``margin = rhs - lhs`` negative,
    and the margin is returned either way.
    """
    _check_kind(Q, CONDITIONAL)
    _check_kind(C, ABSOLUTE)
    if not is_uniform(p_hat):
        raise NotApplicableError("the intermediate bound is derived for uniform setting selection only")
    lhs = abs(C[1, 1] - C[1, 2])
    rhs = 0.5 - 0.25 * abs(Q[2, 2] + Q[2, 1])
    margin = rhs - lhs
    return IntermediateBound(lhs, rhs, margin, margin >= -INTERMEDIATE_TOL)


@dataclass(frozen=True)
class CHSHReport:
    guard_k: float
    conditional: Optional[FormResult]
    absolute: FormResult
    generalized: Optional[FormResult]
    weak: Optional[WeakBoundsReport]
    intermediate: Optional[IntermediateBound]

    @property
    def s_conditional(self):
        return None if self.conditional is None else self.conditional.value

    @property
    def s_absolute(self):
        return self.absolute.value

    @property
    def s_generalized(self):
        return None if self.generalized is None else self.generalized.value

    def forms(self):
        out = [self.conditional, self.absolute, self.generalized]
        if self.weak is not None:
            out.extend(self.weak.forms())
        else:
            out.extend([None, None, None])
        return out

    def to_dict(self):
        names = ("conditional", "absolute", "generalized", "weak_absolute", "weak_bellian", "weak_bellian_4")
        d = {"guard_k": self.guard_k}
        for name, form in zip(names, self.forms()):
            d[name] = None if form is None else form.to_dict()
        d["intermediate"] = None if self.intermediate is None else self.intermediate.to_dict()
        return d


def evaluate_chsh(C: CorrelationTable, Q: Optional[CorrelationTable], p_hat, guard_k=DEFAULT_GUARD_K) -> CHSHReport:
    """Every form that the available tables support.

    ``Q`` is None when some setting pair was never measured; the conditional
    forms are then omitted, and so is the generalized form if a selection
    frequency is zero.
    """
    p = np.asarray(p_hat, dtype=np.float64).reshape(2, 2)
    absolute = chsh_absolute(C, p, guard_k)
    generalized = chsh_generalized(C, p, guard_k) if np.all(p > 0) else None
    if Q is None:
        return CHSHReport(guard_k, None, absolute, generalized, None, None)
    intermediate = intermediate_bound_check(Q, C, p) if is_uniform(p) else None
    return CHSHReport(
        guard_k,
        chsh_conditional(Q, guard_k),
        absolute,
        generalized,
        weak_bounds_report(C, Q, guard_k),
        intermediate,
    )
