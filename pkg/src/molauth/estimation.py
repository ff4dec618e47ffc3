"""Training-based least-squares CIR estimation.

The receiver sees ``r[k] = sum_l h[l] b[k-l] + w[k]``. Stacking the fully
supported outputs of a training frame gives ``r = B h + w`` with ``B`` the
Toeplitz convolution matrix of the training symbols, so the LS estimate is
``(B^T B)^{-1} B^T r`` with covariance ``sigma2 (B^T B)^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import Cir
from .errors import DimensionError, DomainError, FrameTooShortError, IdentifiabilityError

IDENTIFIABILITY_CONDITION = "k_m−k_1 ≥ 2L"


@dataclass(frozen=True)
class TrainingFrame:
    """On/off-keyed training symbols ``b[k_1] ... b[k_m]``."""

    symbols: np.ndarray = field(repr=False)
    start_index: int = 0
    end_index: int | None = None

    def __post_init__(self):
        sym = np.asarray(self.symbols)
        if sym.ndim != 1 or sym.size == 0:
            raise DomainError("symbols must be a non-empty 1-D vector")
        if not np.all((sym == 0) | (sym == 1)):
            raise DomainError("training symbols must be exactly 0 or 1")
        end = self.start_index + sym.size - 1 if self.end_index is None else self.end_index
        if end - self.start_index + 1 != sym.size:
            raise DomainError(
                f"index range [{self.start_index}, {end}] does not match {sym.size} symbols"
            )
        sym = sym.astype(float)
        sym.setflags(write=False)
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "end_index", int(end))

    @classmethod
    def random(cls, length: int, rng: np.random.Generator, start_index: int = 0) -> "TrainingFrame":
        """I.i.d. equiprobable binary symbols."""
        return cls(rng.integers(0, 2, size=length), start_index)

    @property
    def span(self) -> int:
        """``k_m - k_1``."""
        return self.end_index - self.start_index


@dataclass(frozen=True)
class ReceivedFrame:
    """Fully supported received samples ``r[k_1 + L - 1] ... r[k_m]``.

    ``samples`` may be 2-D with one frame per column.
    """

    samples: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class LsEstimate:
    h_hat: np.ndarray
    covariance: np.ndarray


def check_identifiability(frame: TrainingFrame, tap_count: int) -> bool:
    return frame.span >= 2 * tap_count


def synthesize_received(cir: Cir | np.ndarray, frame: TrainingFrame, sigma2: float,
                        rng) -> ReceivedFrame:
    """Noisy convolution of ``frame`` with ``cir`` over the fully supported range.

    Noise is i.i.d. ``N(0, sigma2)`` drawn from ``rng.standard_normal``; no
    draw is made when ``sigma2 == 0``.
    """
    h = np.asarray(cir, dtype=float)
    L = h.size
    if sigma2 < 0:
        raise DomainError(f"sigma2 must be >= 0, got {sigma2!r}")
    if frame.span < L - 1:
        raise FrameTooShortError(
            f"frame spans {frame.span + 1} symbols; at least L={L} are needed for one output"
        )
    b = frame.symbols
    n_out = b.size - L + 1
    clean = np.zeros(n_out)
    for l in range(L):
        clean += h[l] * b[L - 1 - l: L - 1 - l + n_out]
    if sigma2 > 0:
        clean = clean + np.sqrt(sigma2) * rng.standard_normal(n_out)
    return ReceivedFrame(clean)


def convolution_matrix(frame: TrainingFrame, tap_count: int) -> np.ndarray:
    """Toeplitz matrix with ``B[j, c] = b[k_1 + L - 1 + j - c]``, no rank check."""
    L = int(tap_count)
    if L < 1:
        raise DomainError("tap_count must be >= 1")
    if frame.span < L - 1:
        raise FrameTooShortError(f"frame of {frame.span + 1} symbols is shorter than L={L}")
    b = frame.symbols
    rows = np.arange(b.size - L + 1)[:, None] + (L - 1) - np.arange(L)[None, :]
    return b[rows]


def build_training_matrix(frame: TrainingFrame, tap_count: int) -> np.ndarray:
    """:func:`convolution_matrix` guarded by the identifiability condition."""
    L = int(tap_count)
    if L < 1:
        raise DomainError("tap_count must be >= 1")
    if not check_identifiability(frame, L):
        raise IdentifiabilityError(
            f"training too short: k_m−k_1 = {frame.span} but {IDENTIFIABILITY_CONDITION} "
            f"requires at least {2 * L}"
        )
    return convolution_matrix(frame, L)


def ls_estimate(B: np.ndarray, r: ReceivedFrame | np.ndarray, sigma2: float) -> LsEstimate:
    """Solve the normal equations through a Cholesky factor of ``B^T B``.

    Raises :class:`~molauth.errors.SingularMatrixError` for rank-deficient
    training. ``sigma2 == 0`` is accepted and yields a zero covariance.
    """
    B = np.asarray(B, dtype=float)
    samples = np.asarray(r.samples if isinstance(r, ReceivedFrame) else r, dtype=float)
    if B.ndim != 2:
        raise DimensionError("B must be a matrix")
    if samples.shape[0] != B.shape[0]:
        raise DimensionError(f"{samples.shape[0]} samples for a training matrix with {B.shape[0]} rows")
    if sigma2 < 0:
        raise DomainError(f"sigma2 must be >= 0, got {sigma2!r}")
    factor = linalg.cholesky(B.T @ B)
    h_hat = linalg.cho_solve(factor, B.T @ samples)
    return LsEstimate(h_hat=h_hat, covariance=sigma2 * linalg.cho_inverse(factor))
