"""Self-check suites behind ``bellspace verify``.

Each property returns its measured margin (positive means satisfied with
room to spare) so the summary says how close a pass was.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import estimators, oracle
from .inequalities import chsh_absolute, chsh_conditional, chsh_generalized, intermediate_bound_check, weak_bounds_report
from .estimators import ABSOLUTE, CONDITIONAL, CorrelationTable
from .models import DeterministicStrategy, MixtureModel, SingletSampler, enumerate_deterministic
from .probability_space import SettingDistribution, TrialOutcome, derive_selected_values, uniform_settings
from .runner import chunk_bounds, generate

DEFAULT_SEED = 20240601
IDENTITY_TOL = 1e-12
SOUNDNESS_RUNS = 200
SOUNDNESS_TRIALS = 100_000
MIN_SETTING_PROB = 0.05


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    passed: bool
    margin: float
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.suite}/{self.name} margin={self.margin:.6g} ({self.seconds * 1e3:.1f} ms) {self.detail}".rstrip()


def random_mixture(rng: np.random.Generator, max_components=6) -> MixtureModel:
    strategies = enumerate_deterministic()
    k = int(rng.integers(1, max_components + 1))
    picks = rng.choice(16, size=k, replace=False)
    raw = rng.integers(1, 1000, size=k)
    total = int(raw.sum())
    return MixtureModel(tuple((strategies[p], Fraction(int(r), total)) for p, r in zip(picks, raw)))


def random_distribution(rng: np.random.Generator, floor=MIN_SETTING_PROB) -> SettingDistribution:
    w = rng.dirichlet(np.ones(4))
    p = floor + (1.0 - 4 * floor) * w
    p[3] = 1.0 - p[:3].sum()
    return SettingDistribution(tuple(map(tuple, p.reshape(2, 2))))


# --- oracle suite -----------------------------------------------------------

def check_deterministic_max(seed):
    best = oracle.maximize_chsh_deterministic()
    ok = best.value == 2 and best.visited == 16 and best.absolute_uniform == Fraction(1, 2)
    return ok, 0.0, f"max={best.value} over {best.visited} strategies, absolute max={best.absolute_uniform}"


def check_tsirelson_grid(seed):
    opt = oracle.tsirelson_optimum()
    margin = oracle.TSIRELSON + 1e-9 - opt.grid_max
    ok = margin >= 0 and abs(opt.value - oracle.TSIRELSON) <= 1e-12
    return ok, margin, f"optimum={opt.value:.16g} grid_max={opt.grid_max:.16g}"


def check_singlet_law(seed):
    worst = 0.0
    for delta in np.linspace(-2 * math.pi, 2 * math.pi, 181):
        s = SingletSampler(float(delta), 0.0, 0.0, 0.0)
        probs = {(x, y): s.joint_probability(x, y, (1, 1)) for x in (1, -1) for y in (1, -1)}
        corr = sum(x * y * p for (x, y), p in probs.items())
        worst = max(worst, abs(sum(probs.values()) - 1.0), abs(corr - oracle.exact_quantum_correlation(delta)))
        if min(probs.values()) < 0 or max(probs.values()) > 0.5:
            return False, -1.0, f"joint law out of range at delta={delta}"
    return worst <= 1e-15, 1e-15 - worst, f"max deviation {worst:.3g}"


def check_exact_soundness(seed):
    rng = np.random.default_rng(seed)
    worst = Fraction(-10)
    for _ in range(SOUNDNESS_RUNS):
        mix = random_mixture(rng)
        table = oracle.exact_correlations(mix)
        value = table.chsh()
        comp = max(oracle.exact_correlations(s).chsh() for s in mix.strategies)
        if value > comp:
            return False, float(comp - value), "mixture exceeds its components"
        worst = max(worst, value)
    return worst <= 2, float(2 - worst), f"largest exact value {worst}"


def check_intermediate_exact(seed):
    rng = np.random.default_rng(seed)
    models = list(enumerate_deterministic()) + [random_mixture(rng) for _ in range(50)]
    worst = math.inf
    for m in models:
        q = oracle.exact_correlations(m).as_array()
        res = intermediate_bound_check(
            CorrelationTable.exact(q, CONDITIONAL), CorrelationTable.exact(q / 4, ABSOLUTE), uniform_settings().as_array()
        )
        worst = min(worst, res.margin)
        if not res.holds:
            return False, res.margin, f"fails for {m}"
    return True, worst, f"smallest margin {worst:.3g}"


# --- estimator suite --------------------------------------------------------

def _sample_acc(source, dist, seed, trials):
    return generate(source, dist, seed, trials)


def _identity(acc):
    c = estimators.absolute_correlation(acc).values
    q = estimators.conditional_correlation(acc).values
    p = estimators.setting_frequency(acc)
    return float(np.max(np.abs(c - p * q)))


def check_identity(seed):
    cases = [
        (SingletSampler(*oracle.OPTIMAL_ANGLES), uniform_settings()),
        (SingletSampler(*oracle.OPTIMAL_ANGLES), SettingDistribution(((0.4, 0.1), (0.1, 0.4)))),
        (DeterministicStrategy(1, -1, 1, 1), SettingDistribution(((0.1, 0.2), (0.3, 0.4)))),
    ]
    worst = 0.0
    for k, (src, dist) in enumerate(cases):
        worst = max(worst, _identity(_sample_acc(src, dist, seed + k, 100_000)))
    return worst <= IDENTITY_TOL, IDENTITY_TOL - worst, f"max |C - p Q| = {worst:.3g}"


def check_generalized_consistency(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for k in range(20):
        dist = random_distribution(rng)
        acc = _sample_acc(random_mixture(rng), dist, seed + k, 20_000)
        C = estimators.absolute_correlation(acc)
        Q = estimators.conditional_correlation(acc)
        p = estimators.setting_frequency(acc)
        worst = max(worst, abs(chsh_generalized(C, p).value - chsh_conditional(Q).value))
    return worst <= IDENTITY_TOL, IDENTITY_TOL - worst, f"max deviation {worst:.3g}"


def check_merge_partition(seed):
    src = SingletSampler(*oracle.OPTIMAL_ANGLES)
    dist = uniform_settings()
    trials = 100_000
    whole = estimators.CorrelationAccumulator.from_trials(*src.trials(dist, seed, 0, trials))
    merged = estimators.CorrelationAccumulator()
    for start, stop in chunk_bounds(trials, chunk=trials // 8):
        merged = estimators.merge(merged, estimators.CorrelationAccumulator.from_trials(*src.trials(dist, seed, start, stop)))
    ok = merged == whole
    same = np.array_equal(estimators.absolute_correlation(merged).values, estimators.absolute_correlation(whole).values)
    return ok and same, 0.0, "8-way partition vs sequential"


def check_selection_rule(seed):
    src = SingletSampler(*oracle.OPTIMAL_ANGLES)
    cell, x, y = src.trials(uniform_settings(), seed, 0, 100_000)
    for c, xv, yv in zip(cell.tolist(), x.tolist(), y.tolist()):
        a1, a2, b1, b2 = derive_selected_values(TrialOutcome((1 + (c >> 1), 1 + (c & 1)), xv, yv))
        if a1 * a2 != 0 or b1 * b2 != 0 or (a1 == 0) == (a2 == 0) or (b1 == 0) == (b2 == 0):
            return False, -1.0, f"trial breaks the selection rule: cell={c}"
    return True, 0.0, "100000 trials"


# --- soundness suite --------------------------------------------------------

def check_lhv_soundness(seed, k=5.0):
    rng = np.random.default_rng(seed)
    worst = math.inf
    for run in range(SOUNDNESS_RUNS):
        mix = random_mixture(rng)
        dist = random_distribution(rng)
        acc = _sample_acc(mix, dist, seed + run, SOUNDNESS_TRIALS)
        Q = estimators.conditional_correlation(acc)
        C = estimators.absolute_correlation(acc)
        p = estimators.setting_frequency(acc)
        for form in (chsh_conditional(Q, k), chsh_generalized(C, p, k)):
            margin = form.bound + k * form.standard_error - form.value
            worst = min(worst, margin)
            if margin < 0:
                return False, margin, f"run {run}: {form.name} = {form.value:.6g}"
        if oracle.exact_correlations(mix).chsh() > 2:
            return False, -1.0, f"run {run}: exact value above 2"
    return True, worst, f"{SOUNDNESS_RUNS} runs x {SOUNDNESS_TRIALS} trials"


def check_weak_bounds(seed):
    src = SingletSampler(*oracle.OPTIMAL_ANGLES)
    acc = _sample_acc(src, uniform_settings(), seed, 200_000)
    weak = weak_bounds_report(estimators.absolute_correlation(acc), estimators.conditional_correlation(acc))
    margin = min(f.slack for f in weak.forms())
    return all(not f.violated for f in weak.forms()), margin, "singlet optimum against bounds 2, 8 and 4"


def check_absolute_scaling(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(50):
        q = oracle.exact_correlations(random_mixture(rng)).as_array()
        p = np.full((2, 2), 0.25)
        a = chsh_absolute(CorrelationTable.exact(p * q, ABSOLUTE), p).value
        c = chsh_conditional(CorrelationTable.exact(q, CONDITIONAL)).value
        worst = max(worst, abs(a - c / 4))
    return worst <= IDENTITY_TOL, IDENTITY_TOL - worst, "absolute = conditional / 4"


SUITES: dict[str, list[tuple[str, Callable]]] = {
    "oracle": [
        ("deterministic_max", check_deterministic_max),
        ("tsirelson_grid", check_tsirelson_grid),
        ("singlet_law", check_singlet_law),
        ("exact_soundness", check_exact_soundness),
        ("intermediate_bound", check_intermediate_exact),
    ],
    "estimators": [
        ("identity", check_identity),
        ("generalized_consistency", check_generalized_consistency),
        ("absolute_scaling", check_absolute_scaling),
        ("merge_partition", check_merge_partition),
        ("selection_rule", check_selection_rule),
    ],
    "soundness": [
        ("lhv_soundness", check_lhv_soundness),
        ("weak_bounds", check_weak_bounds),
    ],
}


def run_suites(selector="all", seed=DEFAULT_SEED):
    if selector == "all":
        names = list(SUITES)
    elif selector in SUITES:
        names = [selector]
    else:
        raise ValueError(f"unknown suite {selector!r}; expected all or one of {sorted(SUITES)}")
    results = []
    for suite in names:
        for name, check in SUITES[suite]:
            t0 = time.perf_counter()
            try:
                passed, margin, detail = check(seed)
            except Exception as exc:  # a crash is a failed property, not an aborted suite
                passed, margin, detail = False, -math.inf, f"{type(exc).__name__}: {exc}"
            results.append(PropertyResult(suite, name, bool(passed), float(margin), detail, time.perf_counter() - t0))
    return results
