"""Monte Carlo inner loop: count trials whose test statistic exceeds the
threshold.

Trial ``i`` draws its noise from the SplitMix64 stream
``derive(hypothesis_key, i)``, forms ``z = h_occupant + G n`` and evaluates
``||G^{-1}(z - h_ref)||^2``. The numba and numpy versions perform the same
floating-point operations in the same order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ._backend import njit, resolve_backend
from .rng import GOLDEN, derive_array, derive_u, mix64_array, mix64_u

DEFAULT_CHUNK = 1 << 16

_U_GOLDEN = np.uint64(GOLDEN)
_U11 = np.uint64(11)
_U1 = np.uint64(1)
_INV_2_53 = 1.0 / 9007199254740992.0
_TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def _count_exceed_numba(h_occ, h_ref, chol, threshold, key, start, stop):
    L = h_occ.shape[0]
    n = np.empty(L)
    y = np.empty(L)
    count = 0
    for i in range(start, stop):
        state = derive_u(key, np.uint64(i))
        j = 0
        while j < L:
            state += _U_GOLDEN
            x1 = mix64_u(state)
            state += _U_GOLDEN
            x2 = mix64_u(state)
            u1 = float((x1 >> _U11) + _U1) * _INV_2_53
            u2 = float(x2 >> _U11) * _INV_2_53
            r = math.sqrt(-2.0 * math.log(u1))
            n[j] = r * math.cos(_TWO_PI * u2)
            if j + 1 < L:
                n[j + 1] = r * math.sin(_TWO_PI * u2)
            j += 2
        stat = 0.0
        for a in range(L):
            v = 0.0
            for k in range(a + 1):
                v += chol[a, k] * n[k]
            s = (h_occ[a] + v) - h_ref[a]
            for k in range(a):
                s -= chol[a, k] * y[k]
            y[a] = s / chol[a, a]
            stat += y[a] * y[a]
        if stat > threshold:
            count += 1
    return count


def _statistics_numpy(h_occ, h_ref, chol, key, start, stop):
    L = h_occ.shape[0]
    m = stop - start
    with np.errstate(over="ignore"):
        state = derive_array(np.uint64(key), np.arange(start, stop, dtype=np.uint64))
        n = np.empty((m, L))
        for j in range(0, L, 2):
            state = state + _U_GOLDEN
            x1 = mix64_array(state)
            state = state + _U_GOLDEN
            x2 = mix64_array(state)
            u1 = ((x1 >> _U11) + _U1).astype(np.float64) * _INV_2_53
            u2 = (x2 >> _U11).astype(np.float64) * _INV_2_53
            r = np.sqrt(-2.0 * np.log(u1))
            n[:, j] = r * np.cos(_TWO_PI * u2)
            if j + 1 < L:
                n[:, j + 1] = r * np.sin(_TWO_PI * u2)
    y = np.empty((m, L))
    stat = np.zeros(m)
    for a in range(L):
        v = np.zeros(m)
        for k in range(a + 1):
            v += chol[a, k] * n[:, k]
        s = (h_occ[a] + v) - h_ref[a]
        for k in range(a):
            s -= chol[a, k] * y[:, k]
        y[:, a] = s / chol[a, a]
        stat += y[:, a] * y[:, a]
    return stat


def _count_exceed_numpy(h_occ, h_ref, chol, threshold, key, start, stop):
    return int(np.count_nonzero(_statistics_numpy(h_occ, h_ref, chol, key, start, stop) > threshold))


def trial_statistics(h_occ, h_ref, chol, key: int, start: int, stop: int) -> np.ndarray:
    """Per-trial statistics for trials ``[start, stop)`` (numpy path; diagnostics)."""
    return _statistics_numpy(np.ascontiguousarray(h_occ, dtype=float),
                             np.ascontiguousarray(h_ref, dtype=float),
                             np.ascontiguousarray(chol, dtype=float), key, start, stop)


def count_exceedances(h_occ, h_ref, chol, threshold: float, key: int, trials: int, *,
                      backend: str | None = None, workers: int = 1,
                      chunk: int = DEFAULT_CHUNK) -> int:
    """Number of trials in ``[0, trials)`` with statistic ``> threshold``.

    Trials are split into fixed chunks; ``workers > 1`` runs chunks on a
    thread pool. Each trial is keyed by its index, so the count does not
    depend on ``workers`` or ``chunk``.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    backend = resolve_backend(backend)
    fn = _count_exceed_numba if backend == "numba" else _count_exceed_numpy
    h_occ = np.ascontiguousarray(h_occ, dtype=float)
    h_ref = np.ascontiguousarray(h_ref, dtype=float)
    chol = np.ascontiguousarray(chol, dtype=float)
    key_u = np.uint64(key)
    threshold = float(threshold)
    bounds = [(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]

    def run(span):
        return int(fn(h_occ, h_ref, chol, threshold, key_u, span[0], span[1]))

    if workers == 1 or len(bounds) <= 1:
        return sum(map(run, bounds))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, bounds))
