# src/fel/solver.py
"""
Series solutions of the generalized FEL equation.

Every building block has the shape

    sum_k omega^k mu^(e0 + (a+b) k) P_k(i zeta mu^rho; beta = e0 + 1 + (a+b) k)

with P_k the inner series of the k-th kernel power:

    y_r (RL data)       e0 = a - r
    y_r (Caputo data)   e0 = r
    aleph (resolvent)   e0 = a - 1

so RL and Caputo share one resolvent kernel and one summation routine.
"""
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss
from scipy import special as sc

from ..special.incomplete import power_series_batch, wright_kernel_batch
from ..special.series import SeriesBatch, SeriesValue, TruncationControl, sum_series
from ..utils.errors import DomainError, InputError, require
from ..utils.log import get_logger
from .params import FELParameters, Forcing, InitialData, InitKind, SolutionEvaluation
from .symbols import kernel_power_log_coefficients

logger = get_logger(__name__)

DEFAULT_CONTROL = TruncationControl()

Representation = Literal["mittag_leffler", "wright"]
InnerSeries = Callable[[int, float, np.ndarray, TruncationControl], SeriesBatch]


@dataclass(frozen=True)
class QuadratureConfig:
    """Composite Gauss-Legendre on dyadic panels for the forcing convolution."""

    nodes_per_panel: int = 16
    levels: int = 12  # dyadic panels toward the resolvent singularity
    chunk_rows: int = 8192  # quadrature nodes evaluated per batch

    def __post_init__(self) -> None:
        require(self.nodes_per_panel >= 2, "nodes_per_panel must be >= 2")
        require(self.levels >= 0, "levels must be >= 0")
        require(self.chunk_rows >= 1, "chunk_rows must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


def _as_mu_array(mu: float | Sequence[float] | np.ndarray, warn: bool = True) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(mu, dtype=float))
    require(arr.ndim == 1, "mu must be a scalar or a 1-d sequence", InputError)
    require(bool(np.all(np.isfinite(arr) & (arr >= 0))), "mu must be finite and >= 0")
    if warn and np.any(arr > 1.0):
        logger.warning("mu up to %.6g lies outside [0, 1]; series convergence degrades", arr.max())
    return arr


# ---------- inner series ----------
def _exact_inner(beta: float, z: np.ndarray) -> SeriesBatch:
    return SeriesBatch.exact(np.full(z.shape, sc.rgamma(beta), dtype=complex))


def _mittag_leffler_inner(params: FELParameters) -> InnerSeries:
    def inner(k: int, beta: float, z: np.ndarray, ctl: TruncationControl) -> SeriesBatch:
        if k == 0 or params.c == 0:
            return _exact_inner(beta, z)

        def log_coefficients(n: np.ndarray) -> np.ndarray:
            d = kernel_power_log_coefficients(params.c, params.x_cut, k, n, params.power_rule)
            return d - sc.gammaln(params.rho * n + beta)

        return power_series_batch(log_coefficients, z, ctl)

    return inner


def _wright_inner(params: FELParameters, scaled_cutoff: bool) -> InnerSeries:
    def inner(k: int, beta: float, z: np.ndarray, ctl: TruncationControl) -> SeriesBatch:
        if k == 0 or params.c == 0:
            return _exact_inner(beta, z)
        cutoff = None if scaled_cutoff else params.x_cut
        return wright_kernel_batch(params.c, k, params.x_cut, params.rho, beta, z, ctl, cutoff)

    return inner


def _inner_for(
    params: FELParameters, representation: Representation, scaled_cutoff: bool
) -> InnerSeries:
    if representation == "wright":
        return _wright_inner(params, scaled_cutoff)
    require(representation == "mittag_leffler", f"unknown representation {representation!r}")
    return _mittag_leffler_inner(params)


# ---------- outer series ----------
def _series_in_mu(
    params: FELParameters,
    mu: np.ndarray,
    offset: float,
    ctl: TruncationControl,
    inner: InnerSeries,
) -> SeriesBatch:
    if offset < 0 and np.any(mu == 0):
        raise DomainError(f"series behaves like mu^{offset:.6g} and is singular at mu = 0")
    ab = params.a + params.b_kernel
    z = 1j * params.zeta * mu**params.rho
    inner_ctl = ctl.inner()
    inner_err: dict[int, np.ndarray] = {}
    inner_ok: dict[int, np.ndarray] = {}

    def block(ks: np.ndarray) -> np.ndarray:
        out = np.zeros((mu.size, ks.size), dtype=complex)
        for j, k in enumerate(ks.tolist()):
            with np.errstate(over="ignore", under="ignore"):
                weight = params.omega**k * mu ** (offset + ab * k)
            if not np.any(weight):
                inner_err[k] = np.zeros(mu.size)
                inner_ok[k] = np.ones(mu.size, dtype=bool)
                continue
            series = inner(k, offset + 1.0 + ab * k, z, inner_ctl)
            out[:, j] = weight * series.values
            inner_err[k] = np.abs(weight) * series.err_estimates
            inner_ok[k] = series.converged
        return out

    outer = sum_series(block, mu.size, ctl, first_block=8)
    err = outer.err_estimates.astype(float).copy()
    ok = outer.converged.copy()
    for k, e in inner_err.items():
        used = k < outer.terms_used
        err += np.where(used, e, 0.0)
        ok &= ~used | inner_ok[k]
    return SeriesBatch(
        values=outer.values, err_estimates=err, terms_used=outer.terms_used, converged=ok
    )


def _offset(params: FELParameters, r: int, variant: InitKind) -> float:
    n = params.n
    if variant == "rl":
        require(1 <= r <= n, f"RL index r must lie in 1..{n}, got {r!r}")
        return params.a - r
    require(variant == "caputo", f"unknown variant {variant!r}")
    require(0 <= r <= n - 1, f"Caputo index r must lie in 0..{n - 1}, got {r!r}")
    return float(r)


def _warn(name: str, value: SeriesValue) -> SeriesValue:
    if not value.converged:
        logger.warning(
            "%s: series not converged (terms=%d, err~%.3g)",
            name,
            value.terms_used,
            value.err_estimate,
        )
    return value


def y_r_batch(
    params: FELParameters,
    r: int,
    mu: Sequence[float] | np.ndarray,
    variant: InitKind = "rl",
    ctl: TruncationControl = DEFAULT_CONTROL,
    representation: Representation = "mittag_leffler",
    scaled_cutoff: bool = True,
) -> SeriesBatch:
    """Fundamental solution y_r on an array of mu."""
    offset = _offset(params, r, variant)
    mu_arr = _as_mu_array(mu)
    inner = _inner_for(params, representation, scaled_cutoff)
    return _series_in_mu(params, mu_arr, offset, ctl, inner)


def kernel_aleph_batch(
    params: FELParameters,
    u: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    representation: Representation = "mittag_leffler",
    scaled_cutoff: bool = True,
    warn: bool = True,
) -> SeriesBatch:
    """Resolvent kernel aleph on an array of u."""
    u_arr = _as_mu_array(u, warn=warn)
    inner = _inner_for(params, representation, scaled_cutoff)
    return _series_in_mu(params, u_arr, params.a - 1.0, ctl, inner)


def y_r_rl(
    params: FELParameters, r: int, mu: float, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    """y_r for Riemann-Liouville data; 0 at mu = 0 when a > r, 1 when a = r."""
    return _warn("y_r_rl", y_r_batch(params, r, [mu], "rl", ctl).item())


def y_r_caputo(
    params: FELParameters, r: int, mu: float, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    return _warn("y_r_caputo", y_r_batch(params, r, [mu], "caputo", ctl).item())


def kernel_aleph(
    params: FELParameters, u: float, ctl: TruncationControl = DEFAULT_CONTROL
) -> SeriesValue:
    return _warn("kernel_aleph", kernel_aleph_batch(params, [u], ctl).item())


# Wright-form representations: same outer series, inner factors from the
# incomplete Wright function with cutoff x*k (scaled_cutoff) or x.
def y_r_rl_wright(
    params: FELParameters,
    r: int,
    mu: float,
    ctl: TruncationControl = DEFAULT_CONTROL,
    scaled_cutoff: bool = True,
) -> SeriesValue:
    batch = y_r_batch(params, r, [mu], "rl", ctl, "wright", scaled_cutoff)
    return _warn("y_r_rl_wright", batch.item())


def y_r_caputo_wright(
    params: FELParameters,
    r: int,
    mu: float,
    ctl: TruncationControl = DEFAULT_CONTROL,
    scaled_cutoff: bool = True,
) -> SeriesValue:
    batch = y_r_batch(params, r, [mu], "caputo", ctl, "wright", scaled_cutoff)
    return _warn("y_r_caputo_wright", batch.item())


def kernel_aleph_wright(
    params: FELParameters,
    u: float,
    ctl: TruncationControl = DEFAULT_CONTROL,
    scaled_cutoff: bool = True,
) -> SeriesValue:
    batch = kernel_aleph_batch(params, [u], ctl, "wright", scaled_cutoff)
    return _warn("kernel_aleph_wright", batch.item())


# ---------- forcing convolution ----------
@lru_cache(maxsize=8)
def _unit_panels(nodes: int, levels: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    edges = np.concatenate(([0.0], 2.0 ** -np.arange(levels, -1, -1, dtype=float)))
    lo, half = edges[:-1], np.diff(edges) / 2.0
    v = (lo[:, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    wv = (half[:, None] * w[None, :]).ravel()
    return v, wv


def forcing_convolution(
    params: FELParameters,
    forcing: Forcing,
    mu: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> SeriesBatch:
    """
    int_0^mu aleph(tau) g(mu - tau) dtau.

    With p = min(a, 1) the substitution tau = v^(1/p) removes the tau^(a-1)
    singularity; the v-range [0, mu^p] is split into dyadic panels toward 0.
    """
    mu_arr = _as_mu_array(mu, warn=False)
    forcing.check_covers(float(mu_arr.max(initial=0.0)))
    values = np.zeros(mu_arr.size, dtype=complex)
    err = np.zeros(mu_arr.size)
    used = np.zeros(mu_arr.size, dtype=int)
    ok = np.ones(mu_arr.size, dtype=bool)
    rows = np.flatnonzero(mu_arr > 0)
    if rows.size == 0:
        return SeriesBatch(values=values, err_estimates=err, terms_used=used, converged=ok)

    p = min(params.a, 1.0)
    v, wv = _unit_panels(quad.nodes_per_panel, quad.levels)
    span = mu_arr[rows] ** p
    vv = span[:, None] * v[None, :]
    tau = vv ** (1.0 / p)
    weights = (1.0 / p) * vv ** (1.0 / p - 1.0) * span[:, None] * wv[None, :]
    integrand = weights * forcing(mu_arr[rows][:, None] - tau)

    flat_tau = tau.ravel()
    aleph_val = np.empty(flat_tau.size, dtype=complex)
    aleph_err = np.empty(flat_tau.size)
    aleph_used = np.empty(flat_tau.size, dtype=int)
    aleph_ok = np.empty(flat_tau.size, dtype=bool)
    for start in range(0, flat_tau.size, quad.chunk_rows):
        sl = slice(start, start + quad.chunk_rows)
        batch = kernel_aleph_batch(params, flat_tau[sl], ctl, warn=False)
        aleph_val[sl] = batch.values
        aleph_err[sl] = batch.err_estimates
        aleph_used[sl] = batch.terms_used
        aleph_ok[sl] = batch.converged
    shape = tau.shape
    logger.debug("forcing convolution: %d points x %d nodes", shape[0], shape[1])

    values[rows] = np.sum(integrand * aleph_val.reshape(shape), axis=1)
    err[rows] = np.sum(np.abs(integrand) * aleph_err.reshape(shape), axis=1)
    used[rows] = aleph_used.reshape(shape).max(axis=1)
    ok[rows] = aleph_ok.reshape(shape).all(axis=1)
    return SeriesBatch(values=values, err_estimates=err, terms_used=used, converged=ok)


# ---------- full solutions ----------
def _solve(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: Sequence[float] | np.ndarray,
    ctl: TruncationControl,
    quad: QuadratureConfig,
) -> list[SolutionEvaluation]:
    init.check_against(params)
    mu = _as_mu_array(mu_grid)
    h = np.zeros(mu.size, dtype=complex)
    err = np.zeros(mu.size)
    used = np.zeros(mu.size, dtype=int)
    ok = np.ones(mu.size, dtype=bool)

    for r, coeff in init.items():
        if coeff == 0:
            continue
        offset = _offset(params, r, init.kind)
        batch = _series_in_mu(params, mu, offset, ctl, _mittag_leffler_inner(params))
        h += coeff * batch.values
        err += abs(coeff) * batch.err_estimates
        used = np.maximum(used, batch.terms_used)
        ok &= batch.converged

    if params.delta_f != 0:
        conv = forcing_convolution(params, forcing, mu, ctl, quad)
        h += params.delta_f * conv.values
        err += abs(params.delta_f) * conv.err_estimates
        used = np.maximum(used, conv.terms_used)
        ok &= conv.converged

    if not ok.all():
        logger.warning(
            "%s solution: %d of %d points not converged", init.kind, int((~ok).sum()), mu.size
        )
    return [
        SolutionEvaluation(
            mu=float(m),
            h=complex(v),
            err_estimate=float(e),
            outer_terms_used=int(u),
            converged=bool(c),
        )
        for m, v, e, u, c in zip(mu, h, err, used, ok)
    ]


def solve_rl(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[SolutionEvaluation]:
    """h = sum_r b_r y_r + delta int_0^mu aleph(mu - t) g(t) dt with RL data b_1..b_n."""
    require(init.kind == "rl", "solve_rl needs RL initial data", InputError)
    return _solve(params, init, forcing, mu_grid, ctl, quad)


def solve_caputo(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[SolutionEvaluation]:
    """h = sum_r a_r y_r + delta int_0^mu aleph(mu - t) g(t) dt with Caputo data a_0..a_{n-1}."""
    require(init.kind == "caputo", "solve_caputo needs Caputo initial data", InputError)
    return _solve(params, init, forcing, mu_grid, ctl, quad)


def solve(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
) -> list[SolutionEvaluation]:
    if init.kind == "rl":
        return solve_rl(params, init, forcing, mu_grid, ctl, quad)
    return solve_caputo(params, init, forcing, mu_grid, ctl, quad)


def solution_frame(evaluations: Sequence[SolutionEvaluation]) -> pd.DataFrame:
    """One row per mu: mu, re_h, im_h, abs_h, err_estimate."""
    return pd.DataFrame(
        [e.as_row() for e in evaluations], columns=["mu", "re_h", "im_h", "abs_h", "err_estimate"]
    )
