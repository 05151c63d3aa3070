# src/special/core.py
"""
Scalar gamma-family building blocks.

Regularized incomplete gammas come from scipy. When the regularized value
underflows, the log-magnitude is rebuilt from the classic power series
(x < s + 1) or the Lentz continued fraction (x >= s + 1), so ratios like
Gamma(lam + n, x) / Gamma(lam) stay finite for n in the hundreds.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special as sc

from ..utils.errors import DomainError, EvaluationError, require

Variant = Literal["upper", "lower"]

_EPS = sys.float_info.epsilon
_FPMIN = sys.float_info.min / _EPS
_TINY = 1e-280
_MAX_ITER = 100_000
_LOG_MAX = math.log(sys.float_info.max)


def _check_shape(s: float) -> None:
    require(
        math.isfinite(s) and s > 0.0,
        f"gamma argument must be finite and > 0, got {s!r}",
    )


def _check_cutoff(x: float) -> None:
    require(math.isfinite(x) and x >= 0.0, f"incomplete cutoff must be finite and >= 0, got {x!r}")


def log_gamma(s: float) -> float:
    """ln Gamma(s) for s > 0."""
    _check_shape(s)
    return float(sc.gammaln(s))


# ---------- log-space fallbacks ----------
def _log_lower_series(s: float, x: float) -> float:
    if x == 0.0:
        return -math.inf
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return math.log(total) - x + s * math.log(x)
    raise EvaluationError(f"lower incomplete gamma series did not converge (s={s}, x={x})")


def _log_upper_continued_fraction(s: float, x: float) -> float:
    b = x + 1.0 - s
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.log(h) - x + s * math.log(x)
    raise EvaluationError(f"upper incomplete gamma fraction did not converge (s={s}, x={x})")


def _log_complement(log_total: float, log_part: float) -> float:
    r = math.exp(log_part - log_total)
    if r >= 1.0:
        return -math.inf
    return log_total + math.log1p(-r)


def _log_upper_crossover(s: float, x: float) -> float:
    if x >= s + 1.0:
        return _log_upper_continued_fraction(s, x)
    return _log_complement(float(sc.gammaln(s)), _log_lower_series(s, x))


def _log_lower_crossover(s: float, x: float) -> float:
    if x < s + 1.0:
        return _log_lower_series(s, x)
    return _log_complement(float(sc.gammaln(s)), _log_upper_continued_fraction(s, x))


# ---------- scalar API ----------
def log_upper_incomplete_gamma(s: float, x: float) -> float:
    """ln Gamma(s, x); equals ln Gamma(s) at x = 0."""
    _check_shape(s)
    _check_cutoff(x)
    if x == 0.0:
        return float(sc.gammaln(s))
    q = float(sc.gammaincc(s, x))
    if q > _TINY:
        return math.log(q) + float(sc.gammaln(s))
    return _log_upper_crossover(s, x)


def log_lower_incomplete_gamma(s: float, x: float) -> float:
    """ln gamma(s, x); -inf at x = 0."""
    _check_shape(s)
    _check_cutoff(x)
    if x == 0.0:
        return -math.inf
    p = float(sc.gammainc(s, x))
    if p > _TINY:
        return math.log(p) + float(sc.gammaln(s))
    return _log_lower_crossover(s, x)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Gamma(s, x) = int_x^inf t^(s-1) e^(-t) dt."""
    return _exp(log_upper_incomplete_gamma(s, x))


def lower_incomplete_gamma(s: float, x: float) -> float:
    """gamma(s, x) = int_0^x t^(s-1) e^(-t) dt."""
    return _exp(log_lower_incomplete_gamma(s, x))


def pochhammer(lam: float, n: int) -> float:
    """(lam)_n as the finite product lam (lam + 1) ... (lam + n - 1)."""
    require(int(n) == n and n >= 0, f"pochhammer index must be a nonnegative integer, got {n!r}")
    value = 1.0
    for k in range(int(n)):
        value *= lam + k
    return value


def _exp(log_value: float) -> float:
    if log_value > _LOG_MAX:
        return math.inf
    return math.exp(log_value)


# ---------- vectorized log forms ----------
def log_incomplete_gamma_array(s: np.ndarray, x: float, variant: Variant = "upper") -> np.ndarray:
    """Elementwise ln Gamma(s, x) (variant='upper') or ln gamma(s, x) (variant='lower')."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    if not np.all(np.isfinite(s_arr) & (s_arr > 0.0)):
        raise DomainError("gamma arguments must be finite and > 0")
    _check_cutoff(x)
    lg = sc.gammaln(s_arr)
    if variant == "upper":
        if x == 0.0:
            return lg
        reg = sc.gammaincc(s_arr, x)
        fallback = _log_upper_crossover
    else:
        if x == 0.0:
            return np.full_like(s_arr, -np.inf)
        reg = sc.gammainc(s_arr, x)
        fallback = _log_lower_crossover
    out = np.empty_like(s_arr)
    ok = reg > _TINY
    out[ok] = np.log(reg[ok]) + lg[ok]
    for i in np.flatnonzero(~ok):
        out[i] = fallback(float(s_arr[i]), x)
    return out


@dataclass(frozen=True)
class GammaRatio:
    """A gamma quotient kept as its log magnitude; `value` exponentiates without overflow."""

    log_magnitude: float
    sign: int = 1

    @property
    def value(self) -> float:
        if self.log_magnitude == -math.inf:
            return 0.0
        return self.sign * _exp(self.log_magnitude)


def incomplete_gamma_ratio(lam: float, n: int, x: float, variant: Variant = "upper") -> GammaRatio:
    """Gamma(lam + n, x) / Gamma(lam) (upper) or gamma(lam + n, x) / Gamma(lam) (lower)."""
    _check_shape(lam)
    require(int(n) == n and n >= 0, f"index must be a nonnegative integer, got {n!r}")
    if variant == "upper":
        num = log_upper_incomplete_gamma(lam + n, x)
    else:
        num = log_lower_incomplete_gamma(lam + n, x)
    return GammaRatio(num - float(sc.gammaln(lam)))
