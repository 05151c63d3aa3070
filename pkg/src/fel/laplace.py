# src/fel/laplace.py
"""Laplace-domain images: the kernel symbol and H(s) for both kinds of initial data."""
from __future__ import annotations

import cmath
from collections.abc import Callable

import numpy as np

from ..special.incomplete import power_series_batch
from ..special.series import SeriesBatch, SeriesValue, TruncationControl, sum_series
from ..utils.errors import require
from ..utils.log import get_logger
from .params import FELParameters, InitialData
from .symbols import kernel_power_log_coefficients

logger = get_logger(__name__)

DEFAULT_CONTROL = TruncationControl()

ForcingImage = Callable[[complex], complex]

_NOT_CONVERGED = SeriesValue(
    value=complex("nan+nanj"), err_estimate=float("inf"), terms_used=0, converged=False
)


def _binomial_power(
    params: FELParameters, k: int, w: complex, ctl: TruncationControl
) -> SeriesBatch:
    """sum_n d^(k)_n w^n, the k-th power of (1 - w)^(-[c; x])."""

    def log_coefficients(n: np.ndarray) -> np.ndarray:
        return kernel_power_log_coefficients(params.c, params.x_cut, k, n, params.power_rule)

    return power_series_batch(log_coefficients, [w], ctl)


def _outside_disc(params: FELParameters, w: complex) -> bool:
    return params.c > 0 and params.zeta != 0 and abs(w) >= 1.0


def kernel_laplace_symbol(
    params: FELParameters, s: complex, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    """s^-b (1 - i zeta s^-rho)^(-[c; x]) as its binomial series."""
    s = complex(s)
    require(s != 0, "Laplace variable must be nonzero")
    w = 1j * params.zeta * s ** (-params.rho)
    if _outside_disc(params, w):
        logger.warning("kernel symbol: |i zeta s^-rho| = %.6g >= 1, series diverges", abs(w))
        return _NOT_CONVERGED
    series = _binomial_power(params, 1, w, ctl).item()
    return series.scaled(s ** (-params.b_kernel))


def _initial_part(params: FELParameters, init: InitialData, s: complex) -> complex:
    # RL: sum_r b_r s^(r-1); Caputo: sum_r a_r s^(a-r-1); both before the common s^-a
    if init.kind == "rl":
        return sum(b * s ** (r - 1) for r, b in init.items())
    return sum(a_r * s ** (params.a - r - 1) for r, a_r in init.items())


def h_laplace_image(
    params: FELParameters,
    init: InitialData,
    forcing_image: ForcingImage | None,
    s: complex,
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> SeriesValue:
    """
    H(s) = s^-a [ initial part + delta G(s) ]
           * sum_k (omega s^(-a-b))^k (1 - i zeta s^-rho)^(-[c; x] k).
    """
    s = complex(s)
    require(s != 0, "Laplace variable must be nonzero")
    init.check_against(params)
    numerator = _initial_part(params, init, s)
    if params.delta_f != 0:
        require(forcing_image is not None, "forcing image required when delta_f != 0")
        assert forcing_image is not None
        numerator += params.delta_f * forcing_image(s)

    w = 1j * params.zeta * s ** (-params.rho)
    if _outside_disc(params, w):
        logger.warning("H(s): |i zeta s^-rho| = %.6g >= 1, kernel series diverges", abs(w))
        return _NOT_CONVERGED
    q = params.omega * s ** (-params.a - params.b_kernel)
    inner_ctl = ctl.inner()
    inner_err: dict[int, float] = {}
    inner_ok: dict[int, bool] = {}

    def block(ks: np.ndarray) -> np.ndarray:
        out = np.zeros((1, ks.size), dtype=complex)
        for j, k in enumerate(ks.tolist()):
            weight = q**k
            if weight == 0:
                inner_err[k], inner_ok[k] = 0.0, True
                continue
            series = _binomial_power(params, k, w, inner_ctl).item()
            out[0, j] = weight * series.value
            inner_err[k] = abs(weight) * series.err_estimate
            inner_ok[k] = series.converged
        return out

    outer = sum_series(block, 1, ctl, first_block=8).item()
    err = outer.err_estimate + sum(e for k, e in inner_err.items() if k < outer.terms_used)
    ok = outer.converged and all(v for k, v in inner_ok.items() if k < outer.terms_used)
    if not ok:
        logger.warning("H(%s): series not converged (terms=%d)", s, outer.terms_used)
    scale = s ** (-params.a) * numerator
    return SeriesValue(
        value=complex(scale * outer.value),
        err_estimate=float(abs(scale) * err),
        terms_used=outer.terms_used,
        converged=ok and cmath.isfinite(scale * outer.value),
    )
