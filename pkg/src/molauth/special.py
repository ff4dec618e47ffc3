"""Regularized incomplete gamma functions and the chi-squared quantile.

``gammainc_lower``/``gammainc_upper`` use the power series below ``x < a + 1``
and a modified-Lentz continued fraction above it, each returned alongside
its complement so tails keep full relative precision.
"""

from __future__ import annotations

import math

from .errors import ConvergenceError, DomainError

_EPS = 1e-16
_TINY = 1e-300
_SERIES_MAX = 10_000
QUANTILE_PTOL = 1e-10
QUANTILE_MAXITER = 200


def _log_prefactor(a: float, x: float) -> float:
    return a * math.log(x) - x - math.lgamma(a)


def _series_lower(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_SERIES_MAX):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(_log_prefactor(a, x))
    raise ConvergenceError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _cf_upper(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _SERIES_MAX):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _gammainc_pair(a: float, x: float) -> tuple[float, float]:
    if not a > 0:
        raise DomainError(f"shape must be positive, got {a!r}")
    if math.isnan(x) or x < 0:
        raise DomainError(f"argument must be non-negative, got {x!r}")
    if x == 0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    if x < a + 1.0:
        p = _series_lower(a, x)
        return p, 1.0 - p
    q = _cf_upper(a, x)
    return 1.0 - q, q


def gammainc_lower(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)``."""
    return _gammainc_pair(a, x)[0]


def gammainc_upper(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    return _gammainc_pair(a, x)[1]


def _check_df(df) -> int:
    if isinstance(df, bool) or int(df) != df or df < 1:
        raise DomainError(f"degrees of freedom must be an integer >= 1, got {df!r}")
    return int(df)


def chi2_cdf(x: float, df: int) -> float:
    return gammainc_lower(_check_df(df) / 2.0, x / 2.0)


def chi2_sf(x: float, df: int) -> float:
    return gammainc_upper(_check_df(df) / 2.0, x / 2.0)


def chi2_pdf(x: float, df: int) -> float:
    k = _check_df(df) / 2.0
    if x <= 0:
        if k < 1:
            return math.inf if x == 0 else 0.0
        return 0.5 if (k == 1 and x == 0) else 0.0
    return 0.5 * math.exp((k - 1.0) * math.log(x / 2.0) - x / 2.0 - math.lgamma(k))


def chi2_quantile(df: int, p: float) -> float:
    """Return ``x`` with ``chi2_cdf(x, df) == p``.

    Newton's method on the CDF (the upper tail for ``p > 0.5``), kept inside
    a shrinking bracket and falling back to bisection whenever a Newton step
    would leave it.
    """
    df = _check_df(df)
    if not (0.0 < p < 1.0):
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")

    upper = p > 0.5
    target = 1.0 - p if upper else p

    def residual(x: float) -> float:
        # increasing in x in both branches
        return target - chi2_sf(x, df) if upper else chi2_cdf(x, df) - target

    lo, hi = 0.0, float(max(df, 1))
    if not upper:
        # P(a, x) ~ x^a / Gamma(a + 1) as x -> 0; tightens the bracket deep in the lower tail
        a = df / 2.0
        x_small = 2.0 * math.exp((math.log(target) + math.lgamma(a + 1.0)) / a)
        if x_small == 0.0:
            raise DomainError(f"chi2_quantile({df}, {p}) underflows double precision")
        if 2.0 * x_small < hi and residual(2.0 * x_small) >= 0:
            hi = 2.0 * x_small
    while residual(hi) < 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise ConvergenceError("failed to bracket the chi-squared quantile")

    # Wilson-Hilferty start, clipped into the bracket
    z = _normal_quantile(p)
    c = 2.0 / (9.0 * df)
    x = df * max(1.0 - c + z * math.sqrt(c), 1e-3) ** 3
    if not lo < x < hi:
        x = 0.5 * (lo + hi)

    for _ in range(QUANTILE_MAXITER):
        f = residual(x)
        if f == 0.0:
            return x
        if f < 0:
            lo = x
        else:
            hi = x
        dens = chi2_pdf(x, df)
        step = f / dens if dens > 0 and math.isfinite(dens) else math.inf
        x_new = x - step
        if not (lo < x_new < hi):
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 4 * _EPS * max(x, _TINY) or hi - lo <= 4 * _EPS * hi:
            x = x_new
            break
        x = x_new
    else:
        raise ConvergenceError(f"chi2_quantile({df}, {p}) exceeded {QUANTILE_MAXITER} iterations")

    if abs(residual(x)) > QUANTILE_PTOL:
        raise ConvergenceError(f"chi2_quantile({df}, {p}) stalled at residual {residual(x):.3e}")
    return x


def _normal_quantile(p: float) -> float:
    """Rough standard-normal quantile (Tukey lambda approximation); start value only."""
    return 4.91 * (p**0.14 - (1.0 - p) ** 0.14)
