"""numba twins of the kernels in ``_numpy``.

All integer arithmetic is kept in uint64: mixing uint64 with a plain int
literal promotes to float64 under numba's typing rules.
"""

import math

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
DRAW_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 1.0 / 9007199254740992.0

_OPTS = dict(cache=True, nogil=True, error_model="numpy")


@njit(**_OPTS)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(**_OPTS)
def _trial_key(key, t):
    return mix64(key + np.uint64(t) * GOLDEN)


@njit(**_OPTS)
def _uniform(tkey, d):
    bits = mix64(tkey + (np.uint64(d) + _ONE) * DRAW_STEP)
    return np.float64(bits >> _S11) * _INV53


@njit(**_OPTS)
def _select_cell(tkey, cell_cum):
    u = _uniform(tkey, 0)
    for c in range(3):
        if u < cell_cum[c]:
            return c
    return 3


@njit(**_OPTS)
def strategy_trials(key, start, stop, cell_cum, comp_cum, signs):
    m = stop - start
    key = np.uint64(key)
    cell = np.empty(m, dtype=np.int8)
    x = np.empty(m, dtype=np.int8)
    y = np.empty(m, dtype=np.int8)
    n_comp = signs.shape[0]
    for k in range(m):
        tkey = _trial_key(key, start + k)
        c = _select_cell(tkey, cell_cum)
        comp = 0
        if n_comp > 1:
            u = _uniform(tkey, 1)
            while comp < n_comp - 1 and u >= comp_cum[comp]:
                comp += 1
        cell[k] = c
        x[k] = signs[comp, c >> 1]
        y[k] = signs[comp, 2 + (c & 1)]
    return cell, x, y


@njit(**_OPTS)
def singlet_trials(key, start, stop, cell_cum, cos_delta):
    m = stop - start
    key = np.uint64(key)
    cell = np.empty(m, dtype=np.int8)
    x = np.empty(m, dtype=np.int8)
    y = np.empty(m, dtype=np.int8)
    for k in range(m):
        tkey = _trial_key(key, start + k)
        c = _select_cell(tkey, cell_cum)
        xv = 1 if _uniform(tkey, 1) < 0.5 else -1
        anti = _uniform(tkey, 2) < 0.5 * (1.0 + cos_delta[c])
        cell[k] = c
        x[k] = xv
        y[k] = -xv if anti else xv
    return cell, x, y


@njit(**_OPTS)
def sphere_trials(key, start, stop, cell_cum, vectors):
    m = stop - start
    key = np.uint64(key)
    cell = np.empty(m, dtype=np.int8)
    x = np.empty(m, dtype=np.int8)
    y = np.empty(m, dtype=np.int8)
    for k in range(m):
        tkey = _trial_key(key, start + k)
        c = _select_cell(tkey, cell_cum)
        r01 = math.sqrt(-2.0 * math.log1p(-_uniform(tkey, 1)))
        phi01 = 2.0 * math.pi * _uniform(tkey, 2)
        r2 = math.sqrt(-2.0 * math.log1p(-_uniform(tkey, 3)))
        phi2 = 2.0 * math.pi * _uniform(tkey, 4)
        l0 = r01 * math.cos(phi01)
        l1 = r01 * math.sin(phi01)
        l2 = r2 * math.cos(phi2)
        va = vectors[c >> 1]
        vb = vectors[2 + (c & 1)]
        da = va[0] * l0 + va[1] * l1 + va[2] * l2
        db = vb[0] * l0 + vb[1] * l1 + vb[2] * l2
        cell[k] = c
        x[k] = 1 if da >= 0.0 else -1
        y[k] = -1 if db >= 0.0 else 1
    return cell, x, y


@njit(**_OPTS)
def accumulate(cell, x, y):
    n = np.zeros(4, dtype=np.int64)
    s = np.zeros(4, dtype=np.int64)
    for k in range(cell.shape[0]):
        c = cell[k]
        n[c] += 1
        s[c] += np.int64(x[k]) * np.int64(y[k])
    return n, s
