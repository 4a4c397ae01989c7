import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellspace.errors import InvalidDistributionError
from bellspace.probability_space import (
    RandomSource,
    SettingDistribution,
    SettingPair,
    TrialOutcome,
    derive_selected_values,
    sample_settings,
    uniform_settings,
)
from bellspace.models import DeterministicStrategy

signs = st.sampled_from([-1, 1])
pairs = st.tuples(st.sampled_from([1, 2]), st.sampled_from([1, 2]))


def test_uniform_settings():
    d = uniform_settings()
    assert d.p == ((0.25, 0.25), (0.25, 0.25))
    assert sum(v for row in d.p for v in row) == 1.0
    assert d.strictly_positive


@pytest.mark.parametrize(
    "table",
    [
        ((0.5, 0.5), (0.5, 0.5)),
        ((-0.1, 0.6), (0.25, 0.25)),
        ((0.25, 0.25, 0.5),),
        ((float("nan"), 0.5), (0.25, 0.25)),
    ],
)
def test_invalid_distributions_rejected(table):
    with pytest.raises(InvalidDistributionError):
        SettingDistribution(table)


def test_zero_cell_allowed_but_not_strictly_positive():
    d = SettingDistribution(((1.0, 0.0), (0.0, 0.0)))
    assert not d.strictly_positive


def test_point_mass_always_selects_11():
    d = SettingDistribution(((1.0, 0.0), (0.0, 0.0)))
    rng = RandomSource(7)
    assert {sample_settings(d, rng) for _ in range(2000)} == {SettingPair(1, 1)}


def test_point_mass_on_other_cells():
    for cell in range(4):
        table = [0.0] * 4
        table[cell] = 1.0
        d = SettingDistribution((tuple(table[:2]), tuple(table[2:])))
        src = DeterministicStrategy(1, 1, 1, 1)
        c, _, _ = src.trials(d, 3, 0, 5000)
        assert set(c.tolist()) == {cell}


def _frequencies(dist, n, seed):
    c, _, _ = DeterministicStrategy(1, 1, 1, 1).trials(dist, seed, 0, n)
    return np.bincount(c, minlength=4) / n


def test_uniform_frequencies_1e6(uniform):
    # binomial standard error sqrt(.25 * .75 / 1e6) ~ 4.3e-4; 0.005 is ~10 sigma
    freq = _frequencies(uniform, 10**6, 11)
    assert np.all(np.abs(freq - 0.25) <= 0.005)


def test_skewed_frequency_1e6(skewed):
    freq = _frequencies(skewed, 10**6, 12)
    assert abs(freq[0] - 0.4) <= 0.005
    sigma = np.sqrt(skewed.as_array().ravel() * (1 - skewed.as_array().ravel()) / 10**6)
    assert np.all(np.abs(freq - skewed.as_array().ravel()) <= 10 * sigma)


def test_random_source_reproducible_and_split():
    a = RandomSource(123)
    b = RandomSource(123)
    assert [a.draw() for _ in range(10)] == [b.draw() for _ in range(10)]
    s1 = RandomSource(123).split(5)
    s2 = RandomSource(123, stream=5)
    assert [s1.draw() for _ in range(5)] == [s2.draw() for _ in range(5)]
    assert RandomSource(123).split(5).draw() != RandomSource(123).split(6).draw()


def test_random_source_uniform_range():
    rng = RandomSource(0)
    u = np.array([rng.draw() for _ in range(20000)])
    assert u.min() >= 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 5 * math.sqrt(1 / 12 / 20000)


def test_seed_range():
    RandomSource(2**64 - 1).draw()
    with pytest.raises(ValueError):
        RandomSource(2**64)
    with pytest.raises(ValueError):
        RandomSource(-1)


def test_trial_outcome_validation():
    with pytest.raises(ValueError):
        TrialOutcome((1, 3), 1, 1)
    with pytest.raises(ValueError):
        TrialOutcome((1, 1), 0, 1)


def test_derive_selected_values_examples():
    assert derive_selected_values(TrialOutcome((1, 2), 1, -1)) == (1, 0, 0, -1)
    assert derive_selected_values(TrialOutcome((2, 1), -1, 1)) == (0, -1, 1, 0)


@given(pairs, signs, signs)
def test_selection_rule(settings, x, y):
    a1, a2, b1, b2 = derive_selected_values(TrialOutcome(settings, x, y))
    assert a1 * a2 == 0 and b1 * b2 == 0
    assert [v for v in (a1, a2) if v] == [x]
    assert [v for v in (b1, b2) if v] == [y]


def test_setting_pair_cells_round_trip():
    for c in range(4):
        assert SettingPair.from_cell(c).cell == c
