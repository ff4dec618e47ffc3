"""Exception hierarchy shared by all modules."""

from __future__ import annotations

import numpy as np


class MolAuthError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MolAuthError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionError(DomainError):
    pass


class FrameTooShortError(DomainError):
    pass


class IdentifiabilityError(DomainError):
    pass


class SingularMatrixError(MolAuthError, np.linalg.LinAlgError):
    """Cholesky factorization met a pivot below tolerance."""


class ConvergenceError(MolAuthError, ArithmeticError):
    """An iterative routine hit its iteration cap. Indicates a numerics bug."""


class ConfigError(MolAuthError, ValueError):
    """Aggregated configuration validation failure.

    ``problems`` maps a dotted ``section.key`` name to a message.
    """

    def __init__(self, problems: dict[str, str]):
        self.problems = dict(problems)
        lines = [f"  {key}: {msg}" for key, msg in self.problems.items()]
        super().__init__("invalid configuration:\n" + "\n".join(lines))
