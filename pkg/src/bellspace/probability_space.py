"""The single sample space: setting selection, trial records and randomness.

A trial is a point of ``Omega = {lambda, (mu_A, mu_B)}``.  The selector pair
``(mu_A, mu_B)`` is a :class:`SettingPair` drawn from a
:class:`SettingDistribution`; the hidden variable belongs to the source model.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidDistributionError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
DRAW_STEP = 0xD1B54A32D192ED03
NORMALIZATION_TOL = 1e-12

# row-major cell order used by sampling, counting and serialisation
CELLS = ((1, 1), (1, 2), (2, 1), (2, 2))


def mix64(z: int) -> int:
    """SplitMix64 finaliser on Python ints."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return mix64(seed)


class SettingPair(NamedTuple):
    i: int
    j: int

    @property
    def cell(self) -> int:
        return 2 * (self.i - 1) + (self.j - 1)

    @classmethod
    def from_cell(cls, cell: int) -> "SettingPair":
        return cls(1 + (int(cell) >> 1), 1 + (int(cell) & 1))

    def validate(self):
        if self.i not in (1, 2) or self.j not in (1, 2):
            raise ValueError(f"setting indices must be 1 or 2, got ({self.i},{self.j})")
        return self


@dataclass(frozen=True)
class SettingDistribution:
    """2x2 table ``p[i-1][j-1]`` of detector-pair selection probabilities."""

    p: tuple

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=np.float64)
        if arr.shape != (2, 2):
            raise InvalidDistributionError(f"setting table must be 2x2, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise InvalidDistributionError(f"setting probabilities must be finite and >= 0: {arr.tolist()}")
        total = float(arr.sum())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InvalidDistributionError(f"setting probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "p", tuple(tuple(float(v) for v in row) for row in arr))

    def __getitem__(self, pair):
        i, j = pair
        return self.p[i - 1][j - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.p, dtype=np.float64)

    @property
    def strictly_positive(self) -> bool:
        return all(v > 0 for row in self.p for v in row)

    def cumulative(self) -> np.ndarray:
        """Inverse-CDF table over the cells in row-major order."""
        cum = np.cumsum(self.as_array().ravel())
        # u < 1 always, so pinning the last edge keeps rounding from leaking mass
        cum[3] = 1.0
        return cum


def uniform_settings() -> SettingDistribution:
    return SettingDistribution(((0.25, 0.25), (0.25, 0.25)))


@dataclass
class RandomSource:
    """Counter-based generator keyed by ``(seed, stream)``.

    Draw ``d`` of stream ``t`` is a pure function of ``(seed, t, d)``.  The
    trial engine uses stream ``t`` for trial ``t``, so ``source.split(t)``
    replays exactly the draws the vectorised kernels made for that trial.
    """

    seed: int
    stream: int = 0
    counter: int = field(default=0, repr=False)

    def __post_init__(self):
        self._key = seed_key(self.seed)
        self._stream_key = mix64(self._key + self.stream * GOLDEN)

    @property
    def key(self) -> int:
        return self._key

    def split(self, index: int) -> "RandomSource":
        return RandomSource(self.seed, stream=index)

    def draw(self) -> float:
        """Next uniform in [0, 1) with 53 random bits."""
        self.counter += 1
        bits = mix64(self._stream_key + self.counter * DRAW_STEP)
        return (bits >> 11) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class TrialOutcome:
    settings: SettingPair
    x: int
    y: int

    def __post_init__(self):
        SettingPair(*self.settings).validate()
        object.__setattr__(self, "settings", SettingPair(*self.settings))
        if self.x not in (-1, 1) or self.y not in (-1, 1):
            raise ValueError(f"outcomes must be +1 or -1, got x={self.x}, y={self.y}")


def sample_settings(dist: SettingDistribution, rng: RandomSource) -> SettingPair:
    u = rng.draw()
    cum = dist.cumulative()
    for cell in range(3):
        if u < cum[cell]:
            return SettingPair.from_cell(cell)
    return SettingPair.from_cell(3)


def derive_selected_values(t: TrialOutcome):
    """Zero-padded detector values ``(A1, A2, B1, B2)`` of one trial.

    ``A_k`` is the side-A outcome when detector ``k`` was the one selected and
    0 otherwise; likewise for side B.
    """
    i, j = t.settings
    a1 = t.x if i == 1 else 0
    a2 = t.x if i == 2 else 0
    b1 = t.y if j == 1 else 0
    b2 = t.y if j == 2 else 0
    return a1, a2, b1, b2
