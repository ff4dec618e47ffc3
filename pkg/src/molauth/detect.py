"""Neyman-Pearson authentication test on a noisy CIR measurement.

Bob measures ``z = h + v`` with ``v ~ N(0, Sigma)`` and compares the
Mahalanobis distance ``T = (z - h_AB)^T Sigma^{-1} (z - h_AB)`` against a
threshold chosen so that ``Pr(T > threshold | H0) = alpha``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .channel import Cir
from .errors import DimensionError, DomainError
from .special import chi2_quantile


@dataclass(frozen=True)
class MeasurementModel:
    """Noise variance and the full covariance of the CIR measurement error."""

    sigma2: float
    covariance: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError(f"sigma2 must be a finite positive number, got {self.sigma2!r}")
        cov = np.array(self.covariance, dtype=float)
        linalg.check_symmetric(cov)
        cov.setflags(write=False)
        object.__setattr__(self, "covariance", cov)
        self.cholesky  # factorize eagerly so a non-SPD covariance fails here

    @classmethod
    def isotropic(cls, sigma2: float, tap_count: int) -> "MeasurementModel":
        return cls(sigma2, sigma2 * np.eye(tap_count))

    @classmethod
    def from_training(cls, sigma2: float, training_matrix: np.ndarray) -> "MeasurementModel":
        """``Sigma = sigma2 (B^T B)^{-1}``, the covariance of an LS estimate."""
        B = np.asarray(training_matrix, dtype=float)
        return cls(sigma2, sigma2 * linalg.cho_inverse(linalg.cholesky(B.T @ B)))

    @property
    def tap_count(self) -> int:
        return self.covariance.shape[0]

    @cached_property
    def cholesky(self) -> np.ndarray:
        g = linalg.cholesky(self.covariance)
        g.setflags(write=False)
        return g


class Verdict(enum.Enum):
    ACCEPT_H0 = "accept"
    REJECT_H1 = "reject"


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    statistic: float


@dataclass(frozen=True)
class AuthTest:
    reference_cir: Cir
    covariance_factor: np.ndarray = field(repr=False)
    threshold: float
    degrees_of_freedom: int
    alpha: float

    def __post_init__(self):
        L = len(self.reference_cir)
        if self.covariance_factor.shape != (L, L):
            raise DimensionError(f"covariance factor shape {self.covariance_factor.shape} != ({L}, {L})")
        if self.degrees_of_freedom not in (L, 2 * L):
            raise DomainError(f"degrees_of_freedom must be L={L} or 2L={2 * L}")

    @classmethod
    def build(cls, reference: Cir, model: MeasurementModel, alpha: float,
              degrees_of_freedom: int | None = None) -> "AuthTest":
        """Test at false-alarm level ``alpha``; ``degrees_of_freedom`` defaults to L."""
        if not isinstance(reference, Cir):
            reference = Cir(reference)
        L = len(reference)
        if model.tap_count != L:
            raise DimensionError(f"model is {model.tap_count}-dimensional, reference has {L} taps")
        df = L if degrees_of_freedom is None else int(degrees_of_freedom)
        return cls(reference, model.cholesky, compute_threshold(alpha, df), df, alpha)


def compute_threshold(alpha: float, df: int) -> float:
    """Threshold giving false-alarm probability ``alpha`` for a chi2(df) statistic."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return chi2_quantile(df, 1.0 - alpha)


def _whitened_norm2(factor: np.ndarray, z, reference) -> float:
    z = np.asarray(z, dtype=float)
    ref = np.asarray(reference, dtype=float)
    L = factor.shape[0]
    if z.shape != (L,) or ref.shape != (L,):
        raise DimensionError(f"expected vectors of length {L}, got {z.shape} and {ref.shape}")
    y = linalg.solve_lower(factor, z - ref)
    return float(y @ y)


def test_statistic(z, reference: Cir | np.ndarray, model: MeasurementModel) -> float:
    """Mahalanobis distance of ``z`` from ``reference`` under ``model``.

    Computed as ``||y||^2`` with ``G y = z - reference`` and ``G`` the
    Cholesky factor of the covariance; the inverse is never formed.
    """
    return _whitened_norm2(model.cholesky, z, reference)


test_statistic.__test__ = False  # not a pytest test despite the name


def authenticate(z, test: AuthTest) -> Decision:
    stat = _whitened_norm2(test.covariance_factor, z, test.reference_cir)
    verdict = Verdict.REJECT_H1 if stat > test.threshold else Verdict.ACCEPT_H0
    return Decision(verdict, stat)
