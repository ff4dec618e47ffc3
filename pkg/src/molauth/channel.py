"""Closed-form 3D point-source diffusion channel.

A burst of ``Q`` molecules released at the origin of an unbounded fluid with
diffusion coefficient ``D`` produces, at distance ``d`` and time ``t``, the
concentration ``Q / (4 pi D t)^(3/2) * exp(-d^2 / (4 D t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ChannelParams:
    """Physical scenario and tap sampling grid (SI units)."""

    diffusion_coefficient: float
    distance: float
    molecules_per_slot: float
    tap_count: int
    tap_spacing: float
    first_tap_time: float

    def __post_init__(self):
        bad = []
        for name in ("diffusion_coefficient", "distance", "tap_spacing", "first_tap_time"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                bad.append(f"{name} must be a finite positive number, got {value!r}")
        if not (math.isfinite(self.molecules_per_slot) and self.molecules_per_slot >= 0):
            bad.append(f"molecules_per_slot must be >= 0, got {self.molecules_per_slot!r}")
        if isinstance(self.tap_count, bool) or int(self.tap_count) != self.tap_count or self.tap_count < 1:
            bad.append(f"tap_count must be an integer >= 1, got {self.tap_count!r}")
        if bad:
            raise DomainError("; ".join(bad))
        object.__setattr__(self, "tap_count", int(self.tap_count))

    @classmethod
    def centered(cls, diffusion_coefficient: float, distance: float,
                 molecules_per_slot: float, tap_count: int) -> "ChannelParams":
        """Grid with the first tap at half the peak time and spacing peak/L.

        The L taps then span ``[peak/2, peak/2 + (L-1) peak/L]``, which always
        brackets the peak.
        """
        peak = distance**2 / (6.0 * diffusion_coefficient)
        return cls(diffusion_coefficient, distance, molecules_per_slot, tap_count,
                   tap_spacing=peak / tap_count, first_tap_time=peak / 2.0)

    def tap_times(self) -> np.ndarray:
        return self.first_tap_time + np.arange(self.tap_count) * self.tap_spacing

    def same_grid(self, other: "ChannelParams") -> bool:
        return (self.tap_count == other.tap_count
                and self.tap_spacing == other.tap_spacing
                and self.first_tap_time == other.first_tap_time)


@dataclass(frozen=True)
class Cir:
    """Sampled channel impulse response, one concentration per tap."""

    taps: np.ndarray = field(repr=False)

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim != 1 or taps.size == 0:
            raise DomainError("taps must be a non-empty 1-D vector")
        if not np.all(np.isfinite(taps)) or np.any(taps < 0):
            raise DomainError("taps must be finite and non-negative")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    def __len__(self) -> int:
        return self.taps.size

    def __array__(self, dtype=None, copy=None):
        return self.taps if dtype is None else self.taps.astype(dtype)


def concentration(params: ChannelParams, t):
    """Concentration at the receiver at time(s) ``t`` >= 0.

    Returns exactly 0 at ``t == 0`` (the limit from the right). Accepts a
    scalar or an array of times and returns the same shape.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    D = params.diffusion_coefficient
    with np.errstate(divide="ignore", invalid="ignore"):
        spread = 4.0 * D * t_arr
        value = params.molecules_per_slot * np.exp(-params.distance**2 / spread) / (math.pi * spread) ** 1.5
    # 0/0 for t -> 0+ where both factors underflow; the true value is 0 there
    value = np.where((t_arr > 0) & ~np.isnan(value), value, 0.0)
    return float(value) if value.ndim == 0 else value


def peak_time(params: ChannelParams) -> float:
    """Time of maximum concentration, ``d^2 / (6 D)``."""
    return params.distance**2 / (6.0 * params.diffusion_coefficient)


def sample_cir(params: ChannelParams) -> Cir:
    return Cir(concentration(params, params.tap_times()))
