"""Pure-numpy trial kernels.

Every function here has a twin in ``_numba`` with the same signature and
bit-identical output for the strategy, mixture and singlet sources.  Trial
``t`` draws its uniforms from ``(seed, t, d)`` only, so any partition of the
trial range reproduces the same stream.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
DRAW_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def trial_keys(key, start, stop):
    t = np.arange(start, stop, dtype=np.uint64)
    return mix64(np.uint64(key) + t * GOLDEN)


def uniforms(keys, d):
    offset = np.uint64(((d + 1) * int(DRAW_STEP)) & 0xFFFFFFFFFFFFFFFF)
    bits = mix64(keys + offset)
    return (bits >> _S11).astype(np.float64) * _INV53


def select_cells(keys, cell_cum):
    u = uniforms(keys, 0)
    cell = np.searchsorted(cell_cum, u, side="right")
    return np.minimum(cell, 3).astype(np.int8)


def strategy_trials(key, start, stop, cell_cum, comp_cum, signs):
    """Trials for a finite mixture of deterministic strategies.

    ``signs`` is ``(K, 4)`` int8 in (a1, a2, b1, b2) order; ``comp_cum`` the
    cumulative component weights.  A single strategy is ``K == 1`` and
    consumes no component draw.
    """
    keys = trial_keys(key, start, stop)
    cell = select_cells(keys, cell_cum)
    if signs.shape[0] == 1:
        comp = np.zeros(keys.shape[0], dtype=np.intp)
    else:
        comp = np.searchsorted(comp_cum, uniforms(keys, 1), side="right")
        comp = np.minimum(comp, signs.shape[0] - 1)
    i = cell >> 1
    j = cell & 1
    x = signs[comp, i]
    y = signs[comp, 2 + j]
    return cell, x.astype(np.int8), y.astype(np.int8)


def singlet_trials(key, start, stop, cell_cum, cos_delta):
    """Trials drawn from the singlet law ``P(x, y) = (1 - x y cos D) / 4``.

    ``cos_delta`` holds cos(theta_ai - theta_bj) in row-major cell order.
    """
    keys = trial_keys(key, start, stop)
    cell = select_cells(keys, cell_cum)
    x = np.where(uniforms(keys, 1) < 0.5, 1, -1).astype(np.int8)
    anti = uniforms(keys, 2) < 0.5 * (1.0 + cos_delta[cell])
    y = np.where(anti, -x, x).astype(np.int8)
    return cell, x, y


def sphere_normals(keys):
    r01 = np.sqrt(-2.0 * np.log1p(-uniforms(keys, 1)))
    phi01 = 2.0 * np.pi * uniforms(keys, 2)
    r2 = np.sqrt(-2.0 * np.log1p(-uniforms(keys, 3)))
    phi2 = 2.0 * np.pi * uniforms(keys, 4)
    return np.stack([r01 * np.cos(phi01), r01 * np.sin(phi01), r2 * np.cos(phi2)], axis=1)


def sphere_trials(key, start, stop, cell_cum, vectors):
    """Trials for the sign model; ``vectors`` rows are a1, a2, b1, b2.

    The Gaussian draw is not normalised: the sign of a dot product does not
    depend on the length of lambda.
    """
    keys = trial_keys(key, start, stop)
    cell = select_cells(keys, cell_cum)
    lam = sphere_normals(keys)
    i = cell >> 1
    j = cell & 1
    da = np.einsum("nk,nk->n", vectors[i], lam)
    db = np.einsum("nk,nk->n", vectors[2 + j], lam)
    x = np.where(da >= 0.0, 1, -1).astype(np.int8)
    y = np.where(db >= 0.0, -1, 1).astype(np.int8)
    return cell, x, y


def accumulate(cell, x, y):
    """Per-cell trial counts and sums of ``x * y``."""
    agree = x == y
    n = np.bincount(cell, minlength=4).astype(np.int64)
    n_agree = np.bincount(cell[agree], minlength=4).astype(np.int64)
    return n, 2 * n_agree - n
