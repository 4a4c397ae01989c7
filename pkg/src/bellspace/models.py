"""Trial sources: local hidden-variable models and the singlet sampler.

Every source answers one question: given the selected detector pair, what are
the two outcomes?  Local models answer it through a hidden variable drawn
from their own distribution and two response functions; the singlet sampler
draws the outcome pair directly from the quantum joint law and has no hidden
variable at all.
"""

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .probability_space import (
    SettingDistribution,
    SettingPair,
    RandomSource,
    sample_settings,
    seed_key,
)

SIDES = ("A", "B")
UNIT_TOL = 1e-12
WEIGHT_DENOMINATOR = 10**6


def _sign(v):
    # the measure-zero tie resolves to +1
    return 1 if v >= 0.0 else -1


def _check_index(side, index):
    if side not in SIDES:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    if index not in (1, 2):
        raise ValueError(f"detector index must be 1 or 2, got {index!r}")


class Source(ABC):
    """Anything that yields an outcome pair for a chosen setting pair."""

    kind = "source"

    @abstractmethod
    def sample_joint(self, settings: SettingPair, rng: RandomSource):
        """Draw ``(x, y)`` for one trial, consuming draws from ``rng``."""

    def trials(self, dist: SettingDistribution, seed: int, start: int, stop: int):
        """Trials ``start..stop-1`` as ``(cell, x, y)`` int8 arrays.

        Generic per-trial path; concrete sources override it with a kernel
        that reproduces the same draws in bulk.
        """
        m = stop - start
        cell = np.empty(m, dtype=np.int8)
        x = np.empty(m, dtype=np.int8)
        y = np.empty(m, dtype=np.int8)
        root = RandomSource(seed)
        for k in range(m):
            rng = root.split(start + k)
            settings = sample_settings(dist, rng)
            cell[k] = settings.cell
            x[k], y[k] = self.sample_joint(settings, rng)
        return cell, x, y


class LocalModel(Source):
    """Hidden-variable source with response functions ``a_i(lam)``, ``b_j(lam)``.

    The response on one side only sees that side's detector index and the
    hidden variable, which is what makes the model local.
    """

    @abstractmethod
    def sample_lambda(self, rng: RandomSource):
        ...

    @abstractmethod
    def _response(self, lam, side, index) -> int:
        ...

    def respond(self, lam, side, index) -> int:
        _check_index(side, index)
        return self._response(lam, side, index)

    def sample_joint(self, settings, rng):
        lam = self.sample_lambda(rng)
        return self.respond(lam, "A", settings[0]), self.respond(lam, "B", settings[1])


@dataclass(frozen=True)
class DeterministicStrategy(LocalModel):
    """Fixed outcomes for all four detectors; the hidden variable is trivial."""

    a1: int
    a2: int
    b1: int
    b2: int

    kind = "strategy"

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            if getattr(self, name) not in (-1, 1):
                raise ValueError(f"{name} must be +1 or -1, got {getattr(self, name)!r}")

    @property
    def signs(self):
        return (self.a1, self.a2, self.b1, self.b2)

    def sample_lambda(self, rng):
        return None

    def _response(self, lam, side, index):
        return self.signs[(0 if side == "A" else 2) + index - 1]

    def trials(self, dist, seed, start, stop):
        signs = np.array([self.signs], dtype=np.int8)
        return kernels.strategy_trials(
            np.uint64(seed_key(seed)), start, stop, dist.cumulative(), np.ones(1), signs
        )

    def __str__(self):
        return "(" + ",".join(f"{s:+d}" for s in self.signs) + ")"


def enumerate_deterministic():
    """All 16 strategies, ``a1`` the slowest-varying sign and ``b2`` the fastest.

    ``+1`` precedes ``-1`` in each position, so the first entry is all ``+1``.
    """
    return [DeterministicStrategy(*signs) for signs in itertools.product((1, -1), repeat=4)]


def as_weight(w) -> Fraction:
    """Exact mixture weight; floats are snapped to a denominator <= 10**6."""
    if isinstance(w, Fraction):
        return w
    if isinstance(w, int):
        return Fraction(w)
    if isinstance(w, str):
        return Fraction(w.strip())
    return Fraction(float(w)).limit_denominator(WEIGHT_DENOMINATOR)


@dataclass(frozen=True)
class MixtureModel(LocalModel):
    """Finite mixture of deterministic strategies; lambda is the component index."""

    components: tuple

    kind = "mixture"

    def __post_init__(self):
        comps = tuple(
            (s if isinstance(s, DeterministicStrategy) else DeterministicStrategy(*s), as_weight(w))
            for s, w in self.components
        )
        if not comps:
            raise ValueError("a mixture needs at least one component")
        if any(w < 0 for _, w in comps):
            raise ValueError("mixture weights must be >= 0")
        total = sum(w for _, w in comps)
        if abs(float(total) - 1.0) > UNIT_TOL:
            raise ValueError(f"mixture weights sum to {float(total)!r}, not 1")
        object.__setattr__(self, "components", comps)

    @property
    def strategies(self):
        return [s for s, _ in self.components]

    @property
    def weights(self):
        return [w for _, w in self.components]

    def _cumulative(self):
        w = np.array([float(v) for v in self.weights])
        cum = np.cumsum(w / w.sum())
        cum[-1] = 1.0
        return cum

    def sample_lambda(self, rng):
        u = rng.draw()
        cum = self._cumulative()
        k = 0
        while k < len(cum) - 1 and u >= cum[k]:
            k += 1
        return k

    def _response(self, lam, side, index):
        return self.components[lam][0]._response(None, side, index)

    def trials(self, dist, seed, start, stop):
        signs = np.array([s.signs for s in self.strategies], dtype=np.int8)
        return kernels.strategy_trials(
            np.uint64(seed_key(seed)), start, stop, dist.cumulative(), self._cumulative(), signs
        )


def _unit(v, name):
    arr = np.asarray(v, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"{name} must have unit length, |{name}| = {norm!r}")
    return tuple(float(c) for c in arr)


@dataclass(frozen=True)
class BellSphereModel(LocalModel):
    """Sign model with lambda uniform on the 2-sphere.

    ``a_i(lam) = sign(a_i . lam)`` and ``b_j(lam) = -sign(b_j . lam)``, so
    aligned detectors always disagree.
    """

    a1: tuple
    a2: tuple
    b1: tuple
    b2: tuple

    kind = "sphere"

    def __post_init__(self):
        for name in ("a1", "a2", "b1", "b2"):
            object.__setattr__(self, name, _unit(getattr(self, name), name))

    @classmethod
    def planar(cls, theta_a1, theta_a2, theta_b1, theta_b2):
        """Detectors in the x-y plane at the given angles."""
        return cls(*[(math.cos(t), math.sin(t), 0.0) for t in (theta_a1, theta_a2, theta_b1, theta_b2)])

    @property
    def vectors(self):
        return np.array([self.a1, self.a2, self.b1, self.b2], dtype=np.float64)

    def sample_lambda(self, rng):
        r01 = math.sqrt(-2.0 * math.log1p(-rng.draw()))
        phi01 = 2.0 * math.pi * rng.draw()
        r2 = math.sqrt(-2.0 * math.log1p(-rng.draw()))
        phi2 = 2.0 * math.pi * rng.draw()
        lam = np.array([r01 * math.cos(phi01), r01 * math.sin(phi01), r2 * math.cos(phi2)])
        norm = np.linalg.norm(lam)
        return lam / norm if norm > 0 else np.array([0.0, 0.0, 1.0])

    def _response(self, lam, side, index):
        if side == "A":
            return _sign(float(np.dot(self.vectors[index - 1], lam)))
        return -_sign(float(np.dot(self.vectors[1 + index], lam)))

    def angle(self, i, j):
        """Angle in [0, pi] between detector ``a_i`` and ``b_j``."""
        c = float(np.dot(self.vectors[i - 1], self.vectors[1 + j]))
        return math.acos(min(1.0, max(-1.0, c)))

    def trials(self, dist, seed, start, stop):
        return kernels.sphere_trials(
            np.uint64(seed_key(seed)), start, stop, dist.cumulative(), self.vectors
        )


@dataclass(frozen=True)
class SingletSampler(Source):
    """Quantum singlet statistics for planar analysers at the given angles.

    Outcomes follow ``P(x, y) = (1 - x y cos D) / 4`` with
    ``D = theta_ai - theta_bj``.  There is no hidden variable here.
    """

    theta_a1: float
    theta_a2: float
    theta_b1: float
    theta_b2: float

    kind = "singlet"

    @property
    def angles(self):
        return (self.theta_a1, self.theta_a2, self.theta_b1, self.theta_b2)

    def delta(self, i, j):
        return self.angles[i - 1] - self.angles[1 + j]

    def joint_probability(self, x, y, settings):
        return (1.0 - x * y * math.cos(self.delta(*settings))) / 4.0

    def cos_table(self):
        return np.array([math.cos(self.delta(i, j)) for i in (1, 2) for j in (1, 2)])

    def sample_joint(self, settings, rng):
        c = math.cos(self.delta(*settings))
        x = 1 if rng.draw() < 0.5 else -1
        anti = rng.draw() < 0.5 * (1.0 + c)
        return x, (-x if anti else x)

    def trials(self, dist, seed, start, stop):
        return kernels.singlet_trials(
            np.uint64(seed_key(seed)), start, stop, dist.cumulative(), self.cos_table()
        )


def respond(model: LocalModel, lam, side, index) -> int:
    return model.respond(lam, side, index)


def sample_joint(source: Source, settings: SettingPair, rng: RandomSource):
    return source.sample_joint(SettingPair(*settings).validate(), rng)
