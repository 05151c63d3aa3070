# src/special/incomplete.py
"""
Incomplete Pochhammer symbols and the series built on them.

    [lam; x]_n = Gamma(lam + n, x) / Gamma(lam)     (upper)
    (lam; x)_n = gamma(lam + n, x) / Gamma(lam)     (lower)

so that (lam; x)_n + [lam; x]_n = (lam)_n. All coefficients are handled as
logarithms; a series is summed with the row-wise truncation engine in
`series.py`. Every series also carries its coefficients in mpmath so that
rows lost to cancellation can be summed again at raised precision.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import mpmath
import numpy as np
from scipy import special as sc

from ..utils.errors import DomainError, EvaluationError, require
from ..utils.log import get_logger
from .core import Variant, incomplete_gamma_ratio, log_incomplete_gamma_array
from .series import (
    PreciseCoefficient,
    SeriesBatch,
    SeriesValue,
    TruncationControl,
    power_terms,
    refine_cancelled_rows,
    sum_series,
)

logger = get_logger(__name__)

DEFAULT_CONTROL = TruncationControl()

LogCoefficients = Callable[[np.ndarray], np.ndarray]


# ---------- incomplete Pochhammer ----------
def incomplete_pochhammer_upper(lam: float, n: int, x: float) -> float:
    """[lam; x]_n."""
    require(lam > 0, f"incomplete Pochhammer needs lam > 0, got {lam!r}")
    return incomplete_gamma_ratio(lam, n, x, "upper").value


def incomplete_pochhammer_lower(lam: float, n: int, x: float) -> float:
    """(lam; x)_n."""
    require(lam > 0, f"incomplete Pochhammer needs lam > 0, got {lam!r}")
    return incomplete_gamma_ratio(lam, n, x, "lower").value


def log_incomplete_pochhammer(
    lam: float, x: float, n: np.ndarray, variant: Variant = "upper"
) -> np.ndarray:
    require(lam > 0, f"incomplete Pochhammer needs lam > 0, got {lam!r}")
    n = np.asarray(n, dtype=float)
    return log_incomplete_gamma_array(lam + n, x, variant) - sc.gammaln(lam)


def log_binomial_coefficients(
    lam: float, x: float, n: np.ndarray, variant: Variant = "upper"
) -> np.ndarray:
    """
    ln([lam; x]_n / n!), the coefficients of the incomplete binomial series
    (1 - w)^(-[lam; x]) = sum_n [lam; x]_n w^n / n!.

    lam = 0 (upper) follows the exponent-zero convention: 1 for n = 0, 0 otherwise.
    """
    n = np.asarray(n, dtype=float)
    if lam == 0 and variant == "upper":
        return np.where(n == 0, 0.0, -np.inf)
    return log_incomplete_pochhammer(lam, x, n, variant) - sc.gammaln(n + 1.0)


# ---------- generic power series ----------
def power_series_batch(
    log_coefficients: LogCoefficients,
    z: Sequence[complex] | np.ndarray,
    ctl: TruncationControl,
    precise: PreciseCoefficient | None = None,
) -> SeriesBatch:
    """
    sum_n exp(log_coefficients(n)) z^n for every z.

    With `precise` (the same coefficients in mpmath), rows whose double sum
    cancelled below the tolerance are summed again at raised precision.
    """
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))

    def block(n: np.ndarray) -> np.ndarray:
        return power_terms(log_coefficients(n), n, z_arr)

    batch = sum_series(block, z_arr.size, ctl)
    if precise is None:
        return batch
    return refine_cancelled_rows(batch, z_arr, precise, ctl)


# ---------- coefficients at arbitrary precision ----------
def _mp_incomplete_gamma(s: Any, cutoff: float | None, variant: Variant) -> Any:
    if cutoff is None:
        return mpmath.gamma(s)
    if variant == "upper":
        return mpmath.gammainc(s, cutoff)
    return mpmath.gammainc(s, 0, cutoff)


def _mp_binomial_coefficient(lam: float, x: float, n: int, variant: Variant) -> Any:
    if lam == 0 and variant == "upper":
        return mpmath.mpf(1 if n == 0 else 0)
    poch = _mp_incomplete_gamma(mpmath.mpf(lam) + n, x, variant) / mpmath.gamma(lam)
    return poch / mpmath.factorial(n)


def prabhakar_precise(
    lam: float, rho: float, beta: float, x: float, variant: Variant = "upper"
) -> PreciseCoefficient:
    """n -> [lam; x]_n / (n! Gamma(rho n + beta)) in mpmath."""

    def coefficient(n: int) -> Any:
        return _mp_binomial_coefficient(lam, x, n, variant) * mpmath.rgamma(
            mpmath.mpf(rho) * n + beta
        )

    return coefficient


def _warn_unconverged(name: str, value: SeriesValue) -> SeriesValue:
    if not value.converged:
        logger.warning(
            "%s: series not converged after %d terms (err~%.3g)",
            name,
            value.terms_used,
            value.err_estimate,
        )
    return value


# ---------- incomplete Mittag-Leffler ----------
def incomplete_ml_batch(
    a: float,
    b: float,
    delta: float,
    x: float,
    z: Sequence[complex] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    variant: Variant = "upper",
) -> SeriesBatch:
    require(a > 0 and b > 0 and delta > 0, "incomplete Mittag-Leffler needs a, b, delta > 0")
    require(x >= 0, "incomplete cutoff must be >= 0")

    def log_coefficients(n: np.ndarray) -> np.ndarray:
        return log_binomial_coefficients(delta, x, n, variant) - sc.gammaln(a * n + b)

    precise = prabhakar_precise(delta, a, b, x, variant)
    return power_series_batch(log_coefficients, z, ctl, precise)


def incomplete_ml_upper(
    a: float, b: float, delta: float, x: float, z: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    """E^{[delta, x]}_{a, b}(z) = sum_k [delta; x]_k z^k / (Gamma(a k + b) k!)."""
    value = incomplete_ml_batch(a, b, delta, x, [z], ctl, "upper").item()
    return _warn_unconverged("incomplete_ml_upper", value)


def incomplete_ml_lower(
    a: float, b: float, delta: float, x: float, z: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    """E^{(delta, x)}_{a, b}(z) = sum_k (delta; x)_k z^k / (Gamma(a k + b) k!)."""
    value = incomplete_ml_batch(a, b, delta, x, [z], ctl, "lower").item()
    return _warn_unconverged("incomplete_ml_lower", value)


def prabhakar_batch(
    gamma_lambda: float,
    rho: float,
    beta: float,
    x: float,
    z: Sequence[complex] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> SeriesBatch:
    require(gamma_lambda >= 0, f"Pochhammer parameter must be >= 0, got {gamma_lambda!r}")
    require(rho > 0 and beta > 0, "need rho > 0 and beta > 0")
    require(x >= 0, "incomplete cutoff must be >= 0")
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if gamma_lambda == 0:
        return SeriesBatch.exact(np.full(z_arr.shape, sc.rgamma(beta), dtype=complex))

    def log_coefficients(n: np.ndarray) -> np.ndarray:
        return log_binomial_coefficients(gamma_lambda, x, n) - sc.gammaln(rho * n + beta)

    precise = prabhakar_precise(gamma_lambda, rho, beta, x)
    return power_series_batch(log_coefficients, z_arr, ctl, precise)


def incomplete_prabhakar_ml(
    gamma_lambda: float,
    rho: float,
    beta: float,
    x: float,
    z: complex,
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> SeriesValue:
    """
    sum_n [gamma_lambda; x]_n z^n / (n! Gamma(rho n + beta)).

    Exactly 1/Gamma(beta) at gamma_lambda = 0.
    """
    value = prabhakar_batch(gamma_lambda, rho, beta, x, [z], ctl).item()
    return _warn_unconverged("incomplete_prabhakar_ml", value)


# ---------- incomplete Wright ----------
@dataclass(frozen=True)
class WrightSpec:
    """
    Parameters of an incomplete Fox-Wright series.

    The first upper pair carries `upper_cutoff` and the first lower pair
    `lower_cutoff`; None means the complete gamma. `variant` picks Gamma(., x)
    ("upper") or gamma(., x) ("lower") for the incomplete factors.
    """

    upper_pairs: tuple[tuple[float, float], ...]
    lower_pairs: tuple[tuple[float, float], ...] = ()
    upper_cutoff: float | None = None
    lower_cutoff: float | None = None
    variant: Variant = "upper"

    def __post_init__(self) -> None:
        upper = tuple((float(a), float(al)) for a, al in self.upper_pairs)
        lower = tuple((float(b), float(be)) for b, be in self.lower_pairs)
        object.__setattr__(self, "upper_pairs", upper)
        object.__setattr__(self, "lower_pairs", lower)
        require(len(self.upper_pairs) >= 1, "at least one upper pair is required")
        require(self.variant in ("upper", "lower"), f"unknown variant {self.variant!r}")
        for cut in (self.upper_cutoff, self.lower_cutoff):
            require(cut is None or cut >= 0, "incomplete cutoff must be >= 0")
        require(
            self.lower_cutoff is None or len(self.lower_pairs) >= 1,
            "a lower cutoff needs at least one lower pair",
        )

    @property
    def entirety_indicator(self) -> float:
        return sum(be for _, be in self.lower_pairs) - sum(al for _, al in self.upper_pairs)

    @property
    def satisfies_entirety_condition(self) -> bool:
        return self.entirety_indicator > 1.0


def _log_gamma_side(
    pairs: tuple[tuple[float, float], ...],
    cutoff: float | None,
    variant: Variant,
    k: np.ndarray,
    side: str,
) -> np.ndarray:
    total = np.zeros(k.shape, dtype=float)
    for i, (p, scale) in enumerate(pairs):
        s = p + scale * k
        bad = np.flatnonzero(s <= 0)
        if bad.size:
            raise DomainError(
                f"{side} gamma argument {s[bad[0]]:.6g} <= 0 at k={int(k[bad[0]])}"
            )
        if i == 0 and cutoff is not None:
            total += log_incomplete_gamma_array(s, cutoff, variant)
        else:
            total += sc.gammaln(s)
    return total


def _wright_log_coefficients(spec: WrightSpec, log_prefactor: float) -> LogCoefficients:
    def log_coefficients(k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        num = _log_gamma_side(spec.upper_pairs, spec.upper_cutoff, spec.variant, k, "numerator")
        den = _log_gamma_side(spec.lower_pairs, spec.lower_cutoff, spec.variant, k, "denominator")
        zero = np.flatnonzero(den == -np.inf)
        if zero.size:
            raise EvaluationError(f"incomplete Wright denominator vanishes at k={int(k[zero[0]])}")
        return log_prefactor + num - den - sc.gammaln(k + 1.0)

    return log_coefficients


def _mp_gamma_side(
    pairs: tuple[tuple[float, float], ...], cutoff: float | None, variant: Variant, k: int
) -> Any:
    total = mpmath.mpf(1)
    for i, (p, scale) in enumerate(pairs):
        s = mpmath.mpf(p) + mpmath.mpf(scale) * k
        total *= _mp_incomplete_gamma(s, cutoff if i == 0 else None, variant)
    return total


def _wright_precise(spec: WrightSpec, log_prefactor: float) -> PreciseCoefficient:
    def coefficient(k: int) -> Any:
        num = _mp_gamma_side(spec.upper_pairs, spec.upper_cutoff, spec.variant, k)
        den = _mp_gamma_side(spec.lower_pairs, spec.lower_cutoff, spec.variant, k)
        return mpmath.exp(log_prefactor) * num / (den * mpmath.factorial(k))

    return coefficient


def incomplete_wright_batch(
    spec: WrightSpec,
    z: Sequence[complex] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    log_prefactor: float = 0.0,
) -> SeriesBatch:
    logger.debug(
        "incomplete Wright: entirety indicator %.6g (condition > 1: %s)",
        spec.entirety_indicator,
        spec.satisfies_entirety_condition,
    )
    log_coefficients = _wright_log_coefficients(spec, log_prefactor)
    return power_series_batch(log_coefficients, z, ctl, _wright_precise(spec, log_prefactor))


def incomplete_wright(
    spec: WrightSpec, z: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    """
    sum_k [Gamma|gamma](a1 + al1 k, x) prod Gamma(ai + ali k)
          / ([Gamma|gamma](b1 + be1 k, y) prod Gamma(bj + bej k)) * z^k / k!
    """
    value = incomplete_wright_batch(spec, [z], ctl).item()
    return _warn_unconverged("incomplete_wright", value)


def wright_kernel_batch(
    c: float,
    k: int,
    x: float,
    rho: float,
    beta: float,
    z: Sequence[complex] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    cutoff: float | None = None,
) -> SeriesBatch:
    require(c * k > 0, f"Wright kernel form needs c*k > 0, got c={c!r}, k={k!r}")
    spec = WrightSpec(
        upper_pairs=((c * k, 1.0),),
        lower_pairs=((beta, rho),),
        upper_cutoff=x * k if cutoff is None else cutoff,
    )
    return incomplete_wright_batch(spec, z, ctl, log_prefactor=-float(sc.gammaln(c * k)))


def wright_form_of_kernel(
    c: float,
    k: int,
    x: float,
    rho: float,
    beta: float,
    z: complex,
    ctl: TruncationControl = DEFAULT_CONTROL,
    cutoff: float | None = None,
) -> SeriesValue:
    """
    (1 / Gamma(c k)) 1Psi1[(c k, 1; cutoff); (beta, rho) | z].

    The cutoff defaults to x*k as the Wright form prints it; pass `cutoff=x`
    to get the fixed-cutoff reading used by the Mittag-Leffler form.
    """
    value = wright_kernel_batch(c, k, x, rho, beta, [z], ctl, cutoff).item()
    return _warn_unconverged("wright_form_of_kernel", value)
