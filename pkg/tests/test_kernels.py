"""The numba and numpy kernels must agree with each other and with the per-trial path."""

import math

import numpy as np
import pytest

from bellspace import kernels
from bellspace.models import BellSphereModel, DeterministicStrategy, MixtureModel, SingletSampler, Source
from bellspace.probability_space import SettingDistribution, seed_key

NB = kernels.backend("numba")
NP = kernels.backend("numpy")

DIST = SettingDistribution(((0.4, 0.1), (0.2, 0.3)))
SOURCES = [
    DeterministicStrategy(1, -1, 1, 1),
    MixtureModel((((1, 1, 1, 1), "1/3"), ((1, 1, -1, -1), "1/6"), ((-1, 1, -1, 1), "1/2"))),
    SingletSampler(0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4),
    BellSphereModel.planar(0.0, 1.0, 2.0, 3.0),
]


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend("fortran")


@pytest.mark.parametrize("source", SOURCES, ids=lambda s: type(s).__name__)
def test_bulk_matches_per_trial_path(source):
    bulk = source.trials(DIST, 42, 1000, 3000)
    slow = Source.trials(source, DIST, 42, 1000, 3000)
    for a, b in zip(bulk, slow):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize("start,stop", [(0, 50_000), (123_456, 140_000)])
def test_backends_identical_exact_sources(start, stop):
    key = np.uint64(seed_key(99))
    cum = DIST.cumulative()
    strat = SOURCES[1]
    args = (cum, strat._cumulative(), np.array([s.signs for s in strat.strategies], dtype=np.int8))
    for a, b in zip(NB.strategy_trials(key, start, stop, *args), NP.strategy_trials(key, start, stop, *args)):
        np.testing.assert_array_equal(a, b)
    cos = SOURCES[2].cos_table()
    for a, b in zip(NB.singlet_trials(key, start, stop, cum, cos), NP.singlet_trials(key, start, stop, cum, cos)):
        np.testing.assert_array_equal(a, b)


def test_backends_sphere_agree():
    key = np.uint64(seed_key(5))
    cum = DIST.cumulative()
    vec = SOURCES[3].vectors
    a = NB.sphere_trials(key, 0, 200_000, cum, vec)
    b = NP.sphere_trials(key, 0, 200_000, cum, vec)
    np.testing.assert_array_equal(a[0], b[0])
    # transcendental functions may differ by an ulp between backends; only a
    # dot product within rounding of zero could flip
    assert np.count_nonzero(a[1] != b[1]) <= 2
    assert np.count_nonzero(a[2] != b[2]) <= 2


def test_accumulate_backends_agree():
    rng = np.random.default_rng(0)
    cell = rng.integers(0, 4, 10_000).astype(np.int8)
    x = rng.choice(np.array([-1, 1], dtype=np.int8), 10_000)
    y = rng.choice(np.array([-1, 1], dtype=np.int8), 10_000)
    n1, s1 = NB.accumulate(cell, x, y)
    n2, s2 = NP.accumulate(cell, x, y)
    np.testing.assert_array_equal(n1, n2)
    np.testing.assert_array_equal(s1, s2)
    for c in range(4):
        m = cell == c
        assert n1[c] == m.sum()
        assert s1[c] == int((x[m].astype(int) * y[m]).sum())


def test_partition_invariance():
    src = SOURCES[2]
    whole = src.trials(DIST, 8, 0, 10_000)
    parts = [src.trials(DIST, 8, a, a + 2500) for a in range(0, 10_000, 2500)]
    for k in range(3):
        np.testing.assert_array_equal(whole[k], np.concatenate([p[k] for p in parts]))


@pytest.mark.parametrize("name", ["numpy", "numba"])
def test_env_flag_selects_backend(name):
    import os
    import subprocess
    import sys

    env = dict(os.environ, BELLSPACE_BACKEND=name)
    out = subprocess.run(
        [sys.executable, "-c", "from bellspace import kernels; print(kernels.ACTIVE, kernels.singlet_trials.__module__)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    active, module = out.stdout.split()
    assert active == name and module.endswith(f"_{name}")
