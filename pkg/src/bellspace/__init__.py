"""Bell/CHSH experiments on a single Kolmogorov probability space."""

from .estimators import (
    CorrelationAccumulator,
    CorrelationTable,
    absolute_correlation,
    conditional_correlation,
    merge,
    record_trial,
    setting_frequency,
)
from .inequalities import (
    CHSHReport,
    chsh_absolute,
    chsh_conditional,
    chsh_generalized,
    evaluate_chsh,
    intermediate_bound_check,
    weak_bounds_report,
)
from .models import BellSphereModel, DeterministicStrategy, MixtureModel, SingletSampler, enumerate_deterministic
from .probability_space import (
    RandomSource,
    SettingDistribution,
    SettingPair,
    TrialOutcome,
    derive_selected_values,
    sample_settings,
    uniform_settings,
)

__version__ = "0.1.0"
