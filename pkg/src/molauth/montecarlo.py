"""Slot-level impersonation simulation and ROC estimation."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .channel import ChannelParams, Cir, sample_cir
from .detect import MeasurementModel, compute_threshold
from .errors import DomainError
from .kernels import count_exceedances
from .rng import derive_seed

DEFAULT_TRIALS = 100_000


class Occupant(enum.Enum):
    ALICE = "alice"
    EVE = "eve"


class DfMode(enum.Enum):
    """Degrees of freedom of the null distribution.

    ``L`` is exact for real Gaussian measurement noise. ``TWO_L`` is the
    complex-noise convention; under real noise it yields a conservative
    threshold (false-alarm rate below alpha).
    """

    L = "L"
    TWO_L = "2L"

    def degrees_of_freedom(self, tap_count: int) -> int:
        return tap_count if self is DfMode.L else 2 * tap_count


@dataclass(frozen=True)
class Scenario:
    alice_channel: ChannelParams
    eve_channel: ChannelParams
    measurement: MeasurementModel
    df_mode: DfMode = DfMode.L

    def __post_init__(self):
        if not self.alice_channel.same_grid(self.eve_channel):
            raise DomainError("Alice and Eve channels must share tap count and tap grid")
        if self.measurement.tap_count != self.alice_channel.tap_count:
            raise DomainError(
                f"measurement covariance is {self.measurement.tap_count}x{self.measurement.tap_count}"
                f" but the CIR has {self.alice_channel.tap_count} taps"
            )

    @property
    def tap_count(self) -> int:
        return self.alice_channel.tap_count

    @property
    def degrees_of_freedom(self) -> int:
        return self.df_mode.degrees_of_freedom(self.tap_count)

    @cached_property
    def h_alice(self) -> Cir:
        return sample_cir(self.alice_channel)

    @cached_property
    def h_eve(self) -> Cir:
        return sample_cir(self.eve_channel)

    def cir(self, occupant: Occupant) -> Cir:
        return self.h_alice if occupant is Occupant.ALICE else self.h_eve

    def digest(self) -> str:
        """Stable short hash of every field that influences results."""
        payload = {
            "alice": _params_dict(self.alice_channel),
            "eve": _params_dict(self.eve_channel),
            "sigma2": repr(float(self.measurement.sigma2)),
            "covariance": [repr(float(x)) for x in self.measurement.covariance.ravel()],
            "df_mode": self.df_mode.value,
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _params_dict(p: ChannelParams) -> dict:
    return {k: repr(getattr(p, k)) for k in (
        "diffusion_coefficient", "distance", "molecules_per_slot",
        "tap_count", "tap_spacing", "first_tap_time")}


@dataclass(frozen=True)
class RocPoint:
    alpha: float
    pfa_hat: float
    pmd_hat: float


@dataclass(frozen=True)
class RocCurve:
    points: tuple[RocPoint, ...]
    trials_per_point: int
    seed: int
    scenario_digest: str = field(default="")

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.points])

    @property
    def pfa(self) -> np.ndarray:
        return np.array([p.pfa_hat for p in self.points])

    @property
    def pmd(self) -> np.ndarray:
        return np.array([p.pmd_hat for p in self.points])


def simulate_slot(occupant: Occupant, scenario: Scenario, rng) -> np.ndarray:
    """One CIR measurement ``h_occupant + G n`` with ``n = rng.standard_normal(L)``."""
    h = scenario.cir(occupant).taps
    n = rng.standard_normal(scenario.tap_count)
    return h + scenario.measurement.cholesky @ n


def error_counts(scenario: Scenario, alpha: float, trials: int, seed: int, *,
                 backend: str | None = None, workers: int = 1) -> tuple[int, int]:
    """``(false alarms among H0 slots, missed detections among H1 slots)``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    threshold = compute_threshold(alpha, scenario.degrees_of_freedom)
    ref = scenario.h_alice.taps
    chol = scenario.measurement.cholesky
    false_alarms = count_exceedances(ref, ref, chol, threshold, derive_seed(seed, 0), trials,
                                     backend=backend, workers=workers)
    eve_rejected = count_exceedances(scenario.h_eve.taps, ref, chol, threshold,
                                     derive_seed(seed, 1), trials,
                                     backend=backend, workers=workers)
    return false_alarms, trials - eve_rejected


def estimate_error_probs(scenario: Scenario, alpha: float, trials: int, seed: int, *,
                         backend: str | None = None, workers: int = 1) -> tuple[float, float]:
    """Empirical ``(Pfa, Pmd)`` of the level-``alpha`` test from independent H0 and H1 slots."""
    fa, md = error_counts(scenario, alpha, trials, seed, backend=backend, workers=workers)
    return fa / trials, md / trials


def point_seed(seed: int, index: int) -> int:
    return derive_seed(seed, index)


def run_roc(scenario: Scenario, alphas: Sequence[float], trials: int = DEFAULT_TRIALS,
            seed: int = 0, *, backend: str | None = None, workers: int = 1) -> RocCurve:
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise DomainError("at least one alpha is required")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alphas must be strictly increasing")
    points = []
    for index, alpha in enumerate(alphas):
        pfa, pmd = estimate_error_probs(scenario, alpha, trials, point_seed(seed, index),
                                        backend=backend, workers=workers)
        points.append(RocPoint(alpha, pfa, pmd))
    return RocCurve(tuple(points), trials, seed, scenario.digest())
