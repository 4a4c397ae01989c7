import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bellspace import estimators
from bellspace.models import (
    BellSphereModel,
    DeterministicStrategy,
    MixtureModel,
    SingletSampler,
    enumerate_deterministic,
    respond,
    sample_joint,
)
from bellspace.probability_space import RandomSource, SettingPair, uniform_settings

angles = st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False)
seeds = st.integers(0, 2**64 - 1)


def test_enumeration():
    strategies = enumerate_deterministic()
    assert len(strategies) == 16
    assert strategies[0].signs == (1, 1, 1, 1)
    assert strategies[1].signs == (1, 1, 1, -1)
    assert strategies[8].signs == (-1, 1, 1, 1)
    assert len({s.signs for s in strategies}) == 16


def test_strategy_lookup():
    s = DeterministicStrategy(1, -1, 1, 1)
    assert respond(s, None, "A", 2) == -1
    assert respond(s, None, "B", 1) == 1
    with pytest.raises(ValueError):
        respond(s, None, "A", 3)
    with pytest.raises(ValueError):
        respond(s, None, "C", 1)
    with pytest.raises(ValueError):
        DeterministicStrategy(1, 0, 1, 1)


def test_point_mixture():
    m = MixtureModel((((1, 1, 1, 1), 1),))
    rng = RandomSource(1)
    lam = m.sample_lambda(rng)
    assert all(respond(m, lam, side, k) == 1 for side in "AB" for k in (1, 2))


def test_mixture_weights():
    m = MixtureModel((((1, 1, 1, 1), 0.1), ((-1, -1, -1, -1), 0.9)))
    assert m.weights == [Fraction(1, 10), Fraction(9, 10)]
    with pytest.raises(ValueError):
        MixtureModel((((1, 1, 1, 1), 0.5),))
    with pytest.raises(ValueError):
        MixtureModel(())
    with pytest.raises(ValueError):
        MixtureModel((((1, 1, 1, 1), 1.5), ((1, 1, 1, 1), -0.5)))


def test_mixture_component_frequencies():
    m = MixtureModel((((1, 1, 1, 1), "1/4"), ((-1, -1, -1, -1), "3/4")))
    rng = RandomSource(3)
    picks = np.array([m.sample_lambda(rng) for _ in range(40_000)])
    sigma = math.sqrt(0.25 * 0.75 / 40_000)
    assert abs((picks == 0).mean() - 0.25) < 5 * sigma


def test_sphere_aligned_anticorrelated():
    m = BellSphereModel.planar(0.3, 1.0, 0.3, 2.0)
    rng = RandomSource(4)
    for _ in range(500):
        lam = m.sample_lambda(rng)
        assert abs(np.linalg.norm(lam) - 1.0) < 1e-12
        a = respond(m, lam, "A", 1)
        assert respond(m, lam, "B", 1) == -a
        if float(np.dot(m.vectors[0], lam)) > 0:
            assert a == 1


def test_sphere_requires_unit_vectors():
    with pytest.raises(ValueError):
        BellSphereModel((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0))


def test_sphere_sign_tie_is_plus_one():
    m = BellSphereModel((1.0, 0, 0), (0, 1.0, 0), (1.0, 0, 0), (0, 1.0, 0))
    lam = np.array([0.0, 0.0, 1.0])
    assert respond(m, lam, "A", 1) == 1
    assert respond(m, lam, "B", 1) == -1


@settings(max_examples=50, deadline=None)
@given(seeds, st.sampled_from(["strategy", "mixture", "sphere"]))
def test_locality_and_determinism(seed, kind):
    model = {
        "strategy": DeterministicStrategy(1, -1, -1, 1),
        "mixture": MixtureModel((((1, 1, 1, 1), "1/2"), ((1, -1, 1, -1), "1/2"))),
        "sphere": BellSphereModel.planar(0.0, 1.2, 0.4, 2.5),
    }[kind]
    lam = model.sample_lambda(RandomSource(seed))
    a_before = [respond(model, lam, "A", i) for i in (1, 2)]
    b = [respond(model, lam, "B", j) for j in (1, 2)]
    a_after = [respond(model, lam, "A", i) for i in (1, 2)]
    assert a_before == a_after
    assert b == [respond(model, lam, "B", j) for j in (2, 1)][::-1]
    assert all(v in (-1, 1) for v in a_before + b)


@given(angles)
def test_singlet_law_normalized(delta):
    s = SingletSampler(delta, 0.0, 0.0, 0.0)
    probs = [s.joint_probability(x, y, (1, 1)) for x in (1, -1) for y in (1, -1)]
    assert math.isclose(sum(probs), 1.0, abs_tol=1e-15)
    assert all(-1e-17 <= p <= 0.5 + 1e-15 for p in probs)
    corr = sum(x * y * s.joint_probability(x, y, (1, 1)) for x in (1, -1) for y in (1, -1))
    assert math.isclose(corr, -math.cos(delta), abs_tol=1e-15)


def test_singlet_extremes():
    s = SingletSampler(0.0, math.pi, 0.0, math.pi / 2)
    rng = RandomSource(9)
    for _ in range(2000):
        x, y = sample_joint(s, SettingPair(1, 1), rng)
        assert x == -y
        x, y = sample_joint(s, SettingPair(2, 1), rng)
        assert x == y


def test_singlet_orthogonal_quarter_each():
    s = SingletSampler(math.pi / 2, 0.0, 0.0, 0.0)
    cell, x, y = s.trials(uniform_settings(), 10, 0, 400_000)
    m = cell == 0
    n = m.sum()
    for xv in (1, -1):
        for yv in (1, -1):
            f = np.mean((x[m] == xv) & (y[m] == yv))
            assert abs(f - 0.25) < 5 * math.sqrt(0.25 * 0.75 / n)


def test_sphere_aligned_correlation_minus_one():
    m = BellSphereModel.planar(0.0, 1.0, 0.0, 2.0)
    acc = estimators.CorrelationAccumulator.from_trials(*m.trials(uniform_settings(), 2, 0, 100_000))
    Q = estimators.conditional_correlation(acc)
    assert Q[1, 1] == -1.0
