"""Trial-generation kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``BELLSPACE_BACKEND``
(``numba`` or ``numpy``).  Without the variable numba is used when it can be
imported.  ``backend(name)`` returns either implementation explicitly, which
is what the benchmark and the cross-backend tests use.
"""

import importlib
import logging
import os

log = logging.getLogger(__name__)

BACKEND_ENV = "BELLSPACE_BACKEND"
BACKENDS = ("numba", "numpy")


def backend(name):
    if name not in BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; expected one of {BACKENDS}")
    return importlib.import_module(f"{__name__}._{name}")


def _default():
    requested = os.environ.get(BACKEND_ENV, "").strip().lower()
    if requested:
        return requested, backend(requested)
    try:
        return "numba", backend("numba")
    except ImportError:
        log.info("numba unavailable, using the numpy kernels")
        return "numpy", backend("numpy")


ACTIVE, _impl = _default()

strategy_trials = _impl.strategy_trials
singlet_trials = _impl.singlet_trials
sphere_trials = _impl.sphere_trials
accumulate = _impl.accumulate

__all__ = [
    "ACTIVE",
    "BACKENDS",
    "BACKEND_ENV",
    "accumulate",
    "backend",
    "singlet_trials",
    "sphere_trials",
    "strategy_trials",
]
