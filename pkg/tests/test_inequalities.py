import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellspace.errors import NotApplicableError, UnmeasuredContextError, ZeroProbabilityError
from bellspace.estimators import ABSOLUTE, CONDITIONAL, CorrelationAccumulator, CorrelationTable
from bellspace.estimators import absolute_correlation, conditional_correlation, setting_frequency
from bellspace.inequalities import (
    SIGNS,
    chsh_absolute,
    chsh_combination,
    chsh_conditional,
    chsh_generalized,
    evaluate_chsh,
    intermediate_bound_check,
    weak_bounds_report,
)

R = 1 / math.sqrt(2)
# -cos(theta_a - theta_b) at theta_a = (0, pi/2), theta_b = (pi/4, 3pi/4)
QUANTUM = np.array([[-math.cos(-math.pi / 4), -math.cos(-3 * math.pi / 4)], [-math.cos(math.pi / 4), -math.cos(-math.pi / 4)]])
UNIFORM = np.full((2, 2), 0.25)


def cond(v):
    return CorrelationTable.exact(v, CONDITIONAL)


def absl(v):
    return CorrelationTable.exact(v, ABSOLUTE)


def test_sign_convention():
    assert SIGNS == (((1, 1), 1), ((1, 2), -1), ((2, 2), 1), ((2, 1), 1))
    assert chsh_combination([[1, 10], [100, 1000]]) == 1 - 10 + 1000 + 100


def test_quantum_table_oracle():
    np.testing.assert_allclose(QUANTUM, [[-R, R], [-R, -R]], atol=1e-15)


def test_conditional_examples():
    r = chsh_conditional(cond(np.ones((2, 2))))
    assert r.value == 2 and r.bound == 2 and not r.violated and r.slack == 0
    assert chsh_conditional(cond(np.zeros((2, 2)))).value == 0
    q = chsh_conditional(cond(QUANTUM))
    assert q.value == pytest.approx(2.8284271247461903, abs=1e-12)
    assert q.violated


def test_conditional_rejects_wrong_kind_and_missing_cells():
    with pytest.raises(ValueError):
        chsh_conditional(absl(np.zeros((2, 2))))
    with pytest.raises(UnmeasuredContextError):
        chsh_conditional(cond([[1, np.nan], [1, 1]]))


def test_absolute_examples():
    r = chsh_absolute(absl(np.full((2, 2), 0.25)), UNIFORM)
    assert r.value == 0.5 and r.bound == 0.5 and not r.violated
    q = chsh_absolute(absl(QUANTUM / 4), UNIFORM)
    assert q.value == pytest.approx(0.7071067811865476, abs=1e-12) and q.violated
    assert chsh_absolute(absl(np.zeros((2, 2))), UNIFORM).value == 0


def test_absolute_bound_not_applicable_for_skewed():
    r = chsh_absolute(absl(np.zeros((2, 2))), [[0.4, 0.1], [0.1, 0.4]])
    assert r.bound is None and r.violated is None and r.slack is None
    # 0.01 tolerance per cell
    assert chsh_absolute(absl(np.zeros((2, 2))), [[0.259, 0.241], [0.25, 0.25]]).bound == 0.5


def test_generalized_examples():
    assert chsh_generalized(absl(np.full((2, 2), 0.25)), UNIFORM).value == 2
    p = np.array([[0.4, 0.1], [0.1, 0.4]])
    r = chsh_generalized(absl(p.copy()), p)
    assert r.value == 2 and not r.violated
    q = chsh_generalized(absl(QUANTUM / 4), UNIFORM)
    assert q.value == pytest.approx(2.8284271247461903, abs=1e-12) and q.violated


def test_generalized_zero_probability():
    with pytest.raises(ZeroProbabilityError) as exc:
        chsh_generalized(absl(np.zeros((2, 2))), [[0.5, 0.5], [0.0, 0.0]])
    assert exc.value.cell == (2, 1)


def test_weak_bounds_examples():
    w = weak_bounds_report(absl(QUANTUM / 4), cond(QUANTUM))
    assert w.absolute_vs_2.value == pytest.approx(0.7071067811865476, abs=1e-12)
    assert w.absolute_vs_2.slack == pytest.approx(1.2928932188134524, abs=1e-12)
    assert w.bellian_vs_8.slack == pytest.approx(5.17157287525381, abs=1e-12)
    assert w.bellian_vs_4.slack == pytest.approx(4 - 2.8284271247461903, abs=1e-12)
    assert not any(f.violated for f in w.forms())
    w = weak_bounds_report(absl(np.full((2, 2), 0.25)), cond(np.ones((2, 2))))
    assert w.absolute_vs_2.value == 0.5
    w = weak_bounds_report(absl(np.zeros((2, 2))), cond(np.zeros((2, 2))))
    assert [f.slack for f in w.forms()] == [2, 8, 4]


def test_intermediate_examples():
    r = intermediate_bound_check(cond(np.ones((2, 2))), absl(np.full((2, 2), 0.25)), UNIFORM)
    assert r.lhs == 0 and r.rhs == 0 and r.holds
    r = intermediate_bound_check(cond(np.zeros((2, 2))), absl(np.zeros((2, 2))), UNIFORM)
    assert r.rhs == 0.5 and r.holds
    r = intermediate_bound_check(cond(QUANTUM), absl(QUANTUM / 4), UNIFORM)
    # 1/2 - |-sqrt 2|/4 - |-R/4 - R/4|
    assert r.margin == pytest.approx(0.5 - math.sqrt(2) / 4 - R / 2, abs=1e-12)
    assert r.margin == pytest.approx(-0.20710678118654752, abs=1e-12)
    assert not r.holds


def test_intermediate_requires_uniform():
    with pytest.raises(NotApplicableError):
        intermediate_bound_check(cond(np.ones((2, 2))), absl(np.ones((2, 2)) / 4), [[0.4, 0.1], [0.1, 0.4]])


def test_guard_k():
    t = CorrelationTable([[0.51, -0.51], [0.51, 0.51]], np.full((2, 2), 0.01), CONDITIONAL)
    # value 2.04, SE 0.02
    assert not chsh_conditional(t, guard_k=5).violated
    assert chsh_conditional(t, guard_k=1).violated


def test_se_quadrature():
    t = CorrelationTable(np.zeros((2, 2)), [[0.1, 0.2], [0.2, 0.4]], CONDITIONAL)
    assert chsh_conditional(t).standard_error == pytest.approx(math.sqrt(0.01 + 0.04 + 0.04 + 0.16))


signed = st.integers(-50, 50)


@given(st.lists(st.integers(1, 200), min_size=4, max_size=4), st.data())
def test_generalized_equals_conditional_same_accumulator(n, data):
    s = [data.draw(st.integers(-k, k)) for k in n]
    acc = CorrelationAccumulator(tuple(n), tuple(s))
    C, Q, p = absolute_correlation(acc), conditional_correlation(acc), setting_frequency(acc)
    assert abs(chsh_generalized(C, p).value - chsh_conditional(Q).value) <= 1e-12


@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_scaling_identity(q):
    Q = np.array(q).reshape(2, 2)
    assert abs(chsh_absolute(absl(UNIFORM * Q), UNIFORM).value - chsh_conditional(cond(Q)).value / 4) <= 1e-12


def test_evaluate_without_conditional():
    rep = evaluate_chsh(absl(np.zeros((2, 2))), None, [[0.5, 0.5], [0.0, 0.0]])
    assert rep.conditional is None and rep.generalized is None and rep.weak is None
    assert rep.to_dict()["conditional"] is None
