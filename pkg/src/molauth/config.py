"""INI experiment configuration.

Example::

    [channel]
    diffusion_coefficient = 1.0
    distance = 20.0
    molecules_per_slot = 5e5
    tap_count = 4, 8, 12
    tap_spacing = auto
    first_tap_time = auto

    [attacker]
    distance_ratio = 1.1

    [noise]
    sigma2 = 1, 3

    [test]
    df_mode = L
    alphas = 0.01, 0.05, 0.1, 0.5

    [run]
    trials = 100000
    seed = 1

Lists are comma separated. ``auto`` grid values put the first tap at half
the peak time and space taps by peak/L. Unknown sections or keys are
errors, and every problem found is reported at once.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import ChannelParams
from .detect import MeasurementModel
from .errors import ConfigError, DomainError, MolAuthError
from .estimation import TrainingFrame, build_training_matrix
from .montecarlo import DEFAULT_TRIALS, DfMode, Scenario

AUTO = "auto"

_SCHEMA = {
    "channel": {"diffusion_coefficient", "distance", "molecules_per_slot", "tap_count",
                "tap_spacing", "first_tap_time"},
    "attacker": {"distance", "distance_ratio", "molecules_per_slot"},
    "noise": {"sigma2", "covariance", "training_length", "training_seed"},
    "test": {"df_mode", "alphas"},
    "run": {"trials", "seed", "workers"},
}
_REQUIRED = {
    "channel": ("diffusion_coefficient", "distance", "molecules_per_slot", "tap_count"),
    "noise": ("sigma2",),
}
DEFAULT_ALPHAS = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class ExperimentConfig:
    diffusion_coefficient: float
    distance: float
    molecules_per_slot: float
    tap_counts: tuple[int, ...]
    tap_spacing: float | None  # None means auto
    first_tap_time: float | None
    attacker_distance: float
    attacker_molecules: float
    sigma2s: tuple[float, ...]
    covariance: str
    training_length: int | None
    training_seed: int
    df_mode: DfMode
    alphas: tuple[float, ...]
    trials: int
    seed: int
    workers: int

    def alice_params(self, tap_count: int) -> ChannelParams:
        return self._params(self.distance, self.molecules_per_slot, tap_count)

    def eve_params(self, tap_count: int) -> ChannelParams:
        return self._params(self.attacker_distance, self.attacker_molecules, tap_count)

    def _params(self, distance: float, molecules: float, tap_count: int) -> ChannelParams:
        # the grid always follows Alice's peak so both channels share it
        peak = self.distance**2 / (6.0 * self.diffusion_coefficient)
        spacing = peak / tap_count if self.tap_spacing is None else self.tap_spacing
        first = peak / 2.0 if self.first_tap_time is None else self.first_tap_time
        return ChannelParams(self.diffusion_coefficient, distance, molecules, tap_count,
                             spacing, first)

    def measurement(self, sigma2: float, tap_count: int) -> MeasurementModel:
        if self.covariance == "training":
            frame = TrainingFrame.random(self.training_length, np.random.default_rng(self.training_seed))
            return MeasurementModel.from_training(sigma2, build_training_matrix(frame, tap_count))
        return MeasurementModel.isotropic(sigma2, tap_count)

    def scenario(self, tap_count: int, sigma2: float) -> Scenario:
        return Scenario(self.alice_params(tap_count), self.eve_params(tap_count),
                        self.measurement(sigma2, tap_count), self.df_mode)

    def sweep(self):
        """``(tap_count, sigma2)`` combinations in file order."""
        return [(L, s2) for L in self.tap_counts for s2 in self.sigma2s]


class _Reader:
    def __init__(self, parser: configparser.ConfigParser):
        self.parser = parser
        self.problems: dict[str, str] = {}

    def raw(self, section: str, key: str) -> str | None:
        if self.parser.has_section(section) and self.parser.has_option(section, key):
            return self.parser.get(section, key).strip()
        return None

    def _parse(self, section, key, default, convert, check, message):
        text = self.raw(section, key)
        if text is None:
            if default is _MISSING:
                self.problems[f"{section}.{key}"] = "required key is missing"
            return None if default is _MISSING else default
        try:
            value = convert(text)
        except (ValueError, TypeError):
            self.problems[f"{section}.{key}"] = f"cannot parse {text!r}"
            return None
        if check is not None and not check(value):
            self.problems[f"{section}.{key}"] = f"{message}, got {text!r}"
            return None
        return value

    def real(self, section, key, default=None, check=None, message=""):
        return self._parse(section, key, default, _finite_float, check, message)

    def integer(self, section, key, default=None, check=None, message=""):
        return self._parse(section, key, default, int, check, message)

    def reals(self, section, key, default=None, check=None, message=""):
        return self._parse(section, key, default, _list_of(_finite_float), check, message)

    def integers(self, section, key, default=None, check=None, message=""):
        return self._parse(section, key, default, _list_of(int), check, message)

    def choice(self, section, key, options, default):
        return self._parse(section, key, default, str.lower, lambda v: v in options,
                           f"expected one of {sorted(options)}")

    def real_or_auto(self, section, key, message):
        text = self.raw(section, key)
        if text is None or text.lower() == AUTO:
            return None
        return self.real(section, key, check=lambda v: v > 0, message=message)


class _Missing:
    pass


_MISSING = _Missing()


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(text)
    return value


def _list_of(convert):
    def parse(text: str) -> tuple:
        items = [t.strip() for t in text.split(",")]
        if not items or any(not t for t in items):
            raise ValueError(text)
        return tuple(convert(t) for t in items)
    return parse


def _positive(v):
    return v > 0


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError({"<file>": str(exc).replace("\n", " ")}) from None

    problems: dict[str, str] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            problems[section] = "unknown section"
            continue
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                problems[f"{section}.{key}"] = "unknown key"

    r = _Reader(parser)
    m = _MISSING
    D = r.real("channel", "diffusion_coefficient", m, _positive, "must be > 0")
    d = r.real("channel", "distance", m, _positive, "must be > 0")
    q = r.real("channel", "molecules_per_slot", m, lambda v: v >= 0, "must be >= 0")
    taps = r.integers("channel", "tap_count", m, lambda v: all(x >= 1 for x in v),
                      "every tap count must be >= 1")
    spacing = r.real_or_auto("channel", "tap_spacing", "must be > 0 or 'auto'")
    first = r.real_or_auto("channel", "first_tap_time", "must be > 0 or 'auto'")

    eve_d = r.real("attacker", "distance", None, _positive, "must be > 0")
    ratio = r.real("attacker", "distance_ratio", None, _positive, "must be > 0")
    if r.raw("attacker", "distance") is not None and r.raw("attacker", "distance_ratio") is not None:
        problems["attacker.distance"] = "give either distance or distance_ratio, not both"
    elif r.raw("attacker", "distance") is None and r.raw("attacker", "distance_ratio") is None:
        problems["attacker.distance"] = "one of distance or distance_ratio is required"
    if eve_d is None and ratio is not None and d is not None:
        eve_d = ratio * d
    eve_q = r.real("attacker", "molecules_per_slot", q, lambda v: v >= 0, "must be >= 0")

    sigma2s = r.reals("noise", "sigma2", m, lambda v: all(x >= 0 for x in v), "must be >= 0")
    covariance = r.choice("noise", "covariance", {"isotropic", "training"}, "isotropic")
    training_length = r.integer("noise", "training_length", None, _positive, "must be >= 1")
    training_seed = r.integer("noise", "training_seed", 0, lambda v: v >= 0, "must be >= 0")
    if covariance == "training":
        if training_length is None and "noise.training_length" not in r.problems:
            problems["noise.training_length"] = "required when covariance = training"
        elif training_length is not None and taps is not None and training_length - 1 < 2 * max(taps):
            problems["noise.training_length"] = (
                f"too short for L={max(taps)}: need k_m−k_1 ≥ 2L, i.e. length >= {2 * max(taps) + 1}")

    df_mode = r._parse("test", "df_mode", "L", str.upper, lambda v: v in ("L", "2L"),
                       "expected L or 2L")
    alphas = r.reals("test", "alphas", DEFAULT_ALPHAS,
                     lambda v: all(0 < a < 1 for a in v) and all(b > a for a, b in zip(v, v[1:])),
                     "alphas must lie in (0, 1) and be strictly increasing")
    trials = r.integer("run", "trials", DEFAULT_TRIALS, _positive, "must be >= 1")
    seed = r.integer("run", "seed", 0, lambda v: 0 <= v < 2**64, "must be an unsigned 64-bit integer")
    workers = r.integer("run", "workers", 1, _positive, "must be >= 1")

    problems.update(r.problems)
    if problems:
        raise ConfigError(problems)
    cfg = ExperimentConfig(
        diffusion_coefficient=D, distance=d, molecules_per_slot=q, tap_counts=taps,
        tap_spacing=spacing, first_tap_time=first, attacker_distance=eve_d,
        attacker_molecules=eve_q, sigma2s=sigma2s, covariance=covariance,
        training_length=training_length, training_seed=training_seed,
        df_mode=DfMode(df_mode), alphas=alphas, trials=trials, seed=seed, workers=workers,
    )
    try:
        for L in cfg.tap_counts:
            cfg.alice_params(L)
            cfg.eve_params(L)
    except DomainError as exc:
        raise ConfigError({"channel": str(exc)}) from None
    return cfg


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


__all__ = ["ExperimentConfig", "parse_config", "load_config", "ConfigError", "MolAuthError"]
