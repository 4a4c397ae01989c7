"""Exact ground truth for every source in the model zoo.

Strategy and mixture tables are computed in rational arithmetic.  The
singlet and sphere-model tables are closed forms in double precision.
Nothing here samples.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .inequalities import SIGNS, chsh_combination
from .models import BellSphereModel, DeterministicStrategy, MixtureModel, SingletSampler, enumerate_deterministic

TSIRELSON = 2.0 * math.sqrt(2.0)
OPTIMAL_ANGLES = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)
GRID_POINTS = 37


@dataclass(frozen=True)
class ExactCorrelationTable:
    """``values[i-1][j-1] = <a_i, b_j>`` with a short description of the source."""

    values: tuple
    source: str

    def __getitem__(self, pair):
        i, j = pair
        return self.values[i - 1][j - 1]

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.values for v in row)

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.values])

    def chsh(self):
        """Exact ``|Q11 - Q12 + Q22 + Q21|`` (a Fraction for rational tables)."""
        return abs(chsh_combination(self.values))


def _strategy_table(s: DeterministicStrategy):
    a = (s.a1, s.a2)
    b = (s.b1, s.b2)
    return tuple(tuple(Fraction(a[i] * b[j]) for j in range(2)) for i in range(2))


def exact_correlations(model) -> ExactCorrelationTable:
    if isinstance(model, DeterministicStrategy):
        return ExactCorrelationTable(_strategy_table(model), f"strategy {model}")
    if isinstance(model, MixtureModel):
        total = sum(model.weights)
        acc = [[Fraction(0)] * 2 for _ in range(2)]
        for strategy, w in model.components:
            t = _strategy_table(strategy)
            for i in range(2):
                for j in range(2):
                    acc[i][j] += w * t[i][j]
        values = tuple(tuple(v / total for v in row) for row in acc)
        return ExactCorrelationTable(values, f"mixture of {len(model.components)} strategies")
    raise TypeError(f"no rational oracle for {type(model).__name__}")


def exact_quantum_correlation(delta: float) -> float:
    return -math.cos(delta)


def singlet_exact(sampler: SingletSampler) -> ExactCorrelationTable:
    values = tuple(
        tuple(exact_quantum_correlation(sampler.delta(i, j)) for j in (1, 2)) for i in (1, 2)
    )
    return ExactCorrelationTable(values, "singlet closed form")


def sphere_angle_correlation(theta: float) -> float:
    """Correlation of the sign model for detectors ``theta`` apart.

    ``a(lam) b(lam) = -1`` unless lam falls in one of the two lunes between
    the hemispheres of the two detectors, each of solid-angle fraction
    ``theta / (2 pi)``.
    """
    return -(1.0 - 2.0 * theta / math.pi)


def sphere_model_exact(model: BellSphereModel, i: int, j: int) -> float:
    return sphere_angle_correlation(model.angle(i, j))


def sphere_exact(model: BellSphereModel) -> ExactCorrelationTable:
    values = tuple(tuple(sphere_model_exact(model, i, j) for j in (1, 2)) for i in (1, 2))
    return ExactCorrelationTable(values, "sphere model closed form")


def exact_table(source):
    """Exact table for any zoo source, or None for sources without one."""
    if isinstance(source, (DeterministicStrategy, MixtureModel)):
        return exact_correlations(source)
    if isinstance(source, SingletSampler):
        return singlet_exact(source)
    if isinstance(source, BellSphereModel):
        return sphere_exact(source)
    return None


@dataclass(frozen=True)
class DeterministicMaximum:
    value: Fraction
    argmax: tuple
    visited: int
    absolute_uniform: Fraction


def maximize_chsh_deterministic() -> DeterministicMaximum:
    """Exhaustive maximum of the conditional combination over all 16 strategies.

    With every setting pair selected with probability 1/4 the absolute
    correlations are a quarter of the conditional ones, so the
    absolute-correlation maximum is reported alongside.
    """
    best = None
    argmax = []
    visited = 0
    for s in enumerate_deterministic():
        visited += 1
        v = exact_correlations(s).chsh()
        if best is None or v > best:
            best, argmax = v, [s]
        elif v == best:
            argmax.append(s)
    return DeterministicMaximum(best, tuple(argmax), visited, best * Fraction(1, 4))


def quantum_chsh(theta_a1, theta_a2, theta_b1, theta_b2):
    """Combination value of the singlet correlations; broadcasts over arrays."""
    q = [[-np.cos(ta - tb) for tb in (theta_b1, theta_b2)] for ta in (theta_a1, theta_a2)]
    return np.abs(chsh_combination(q))


@dataclass(frozen=True)
class TsirelsonOptimum:
    angles: tuple
    value: float
    grid_max: float
    grid_argmax: tuple
    grid_points: int


def grid_search(points=GRID_POINTS):
    """Brute-force maximum of the singlet combination on a uniform angle grid.

    Ties resolve to the lexicographically smallest angle tuple (first hit in
    C order).
    """
    g = 2 * np.pi * np.arange(points) / points
    a1, a2, b1, b2 = np.meshgrid(g, g, g, g, indexing="ij", sparse=True)
    vals = quantum_chsh(a1, a2, b1, b2)
    flat = int(np.argmax(vals))
    idx = np.unravel_index(flat, vals.shape)
    return float(vals.flat[flat]), tuple(float(g[k]) for k in idx)


def tsirelson_optimum(points=GRID_POINTS) -> TsirelsonOptimum:
    singlet = SingletSampler(*OPTIMAL_ANGLES)
    value = float(singlet_exact(singlet).chsh())
    gmax, gargs = grid_search(points)
    return TsirelsonOptimum(OPTIMAL_ANGLES, value, gmax, gargs, points**4)


__all__ = [
    "ExactCorrelationTable",
    "OPTIMAL_ANGLES",
    "SIGNS",
    "TSIRELSON",
    "exact_correlations",
    "exact_quantum_correlation",
    "exact_table",
    "grid_search",
    "maximize_chsh_deterministic",
    "quantum_chsh",
    "singlet_exact",
    "sphere_exact",
    "sphere_model_exact",
    "tsirelson_optimum",
]
