"""Counter-based SplitMix64 streams.

Every Monte Carlo trial owns a stream keyed by ``(seed, point, hypothesis,
trial)``, so any single trial can be replayed in isolation and the result
of a run never depends on how trials are scheduled across workers.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import njit

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, index: int) -> int:
    """Child key number ``index`` of ``seed`` (one split-mix step)."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return mix64((seed & MASK64) + GOLDEN * (index + 1))


def trial_key(point_seed: int, hypothesis: int, trial: int) -> int:
    """Key of the stream driving ``trial`` under ``hypothesis`` (0=H0, 1=H1)."""
    return derive_seed(derive_seed(point_seed, hypothesis), trial)


class SplitMix64:
    """Scalar SplitMix64 stream exposing the ``standard_normal`` surface.

    Normals come from the Box-Muller transform, two per pair of draws, in the
    same order as the compiled Monte Carlo kernels use them.
    """

    def __init__(self, key: int):
        self.state = key & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def standard_normal(self, size: int | None = None):
        n = 1 if size is None else int(size)
        out = np.empty(n)
        for j in range(0, n, 2):
            u1 = ((self.next_u64() >> 11) + 1) * _INV_2_53
            u2 = (self.next_u64() >> 11) * _INV_2_53
            r = math.sqrt(-2.0 * math.log(u1))
            out[j] = r * math.cos(_TWO_PI * u2)
            if j + 1 < n:
                out[j + 1] = r * math.sin(_TWO_PI * u2)
        return float(out[0]) if size is None else out


# -- compiled / vectorized twins used inside kernels -------------------------

_U_GOLDEN = np.uint64(GOLDEN)
_U_MUL1 = np.uint64(_MUL1)
_U_MUL2 = np.uint64(_MUL2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U1 = np.uint64(1)


@njit(cache=True, nogil=True)
def mix64_u(z):
    z = (z ^ (z >> _U30)) * _U_MUL1
    z = (z ^ (z >> _U27)) * _U_MUL2
    return z ^ (z >> _U31)


@njit(cache=True, nogil=True)
def derive_u(seed, index):
    return mix64_u(seed + _U_GOLDEN * (index + _U1))


def mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U30)) * _U_MUL1
        z = (z ^ (z >> _U27)) * _U_MUL2
    return z ^ (z >> _U31)


def derive_array(seed: np.uint64, index: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return mix64_array(seed + _U_GOLDEN * (index + _U1))
