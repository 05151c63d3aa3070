# src/verification/residual.py
"""
Residual of the integro-differential equation for a solution sampled on a
uniform grid.

The left side is the Grunwald-Letnikov RL derivative of the solution minus
the part fixed by the declared initial data, which is the operator's kernel:

    RL:     h - sum_r b_r mu^(a-r) / Gamma(a-r+1)
    Caputo: h - sum_r a_r mu^r / r!

The right side is the Volterra convolution with the kernel evaluated from
the special-function layer (never from the solver), plus delta * g(mu).
"""
from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import pandas as pd
from numpy.polynomial.legendre import leggauss
from scipy import special as sc

from ..fel.params import FELParameters, Forcing, InitialData
from ..special.incomplete import prabhakar_batch
from ..special.series import TruncationControl
from ..utils.errors import InputError, require
from ..utils.log import get_logger
from .grid import GridFunction
from .operators import (
    caputo_fractional_derivative,
    rl_fractional_derivative,
    rl_fractional_integral,
)

logger = get_logger(__name__)

DEFAULT_CONTROL = TruncationControl()
CHECK_POINTS = 16
DEFAULT_TOLERANCE = 1e-3

_RHS_NODES = 20
_RHS_LEVELS = 24


@dataclass(frozen=True, eq=False)
class ResidualReport:
    mu_points: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    max_abs_residual: float
    rel_residual: float
    # |estimated initial value - declared value| per initial condition
    initial_errors: tuple[float, ...] = field(default=())
    # Caputo only: max |L1 derivative - rhs|, an independent left-hand side
    l1_max_abs_residual: float | None = None

    @property
    def residuals(self) -> np.ndarray:
        return self.lhs - self.rhs

    def passed(self, tol: float = DEFAULT_TOLERANCE) -> bool:
        return bool(self.rel_residual <= tol)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "mu": self.mu_points,
                "re_lhs": self.lhs.real,
                "im_lhs": self.lhs.imag,
                "re_rhs": self.rhs.real,
                "im_rhs": self.rhs.imag,
                "abs_residual": np.abs(self.residuals),
            }
        )

    def summary(self) -> dict[str, float]:
        out = {
            "max_abs_residual": self.max_abs_residual,
            "rel_residual": self.rel_residual,
            "max_initial_error": max(self.initial_errors, default=0.0),
        }
        if self.l1_max_abs_residual is not None:
            out["l1_max_abs_residual"] = self.l1_max_abs_residual
        return out


# ---------- right-hand side ----------
@lru_cache(maxsize=8)
def _graded_unit(levels: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(_RHS_NODES)
    edges = np.concatenate(([0.0], 2.0 ** np.arange(-levels, 1, dtype=float)))
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (x + 1.0))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def volterra_rhs_many(
    params: FELParameters,
    h: GridFunction,
    g: Forcing,
    mus: Sequence[float] | np.ndarray,
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> np.ndarray:
    """
    omega int_0^mu t^(b-1) E^{[c; x]}_{rho, b}(i zeta t^rho) h(mu - t) dt + delta g(mu)
    at each mu.
    """
    mu = np.asarray(mus, dtype=float)
    inside = bool(np.all((mu >= 0) & (mu <= h.mu_max * (1 + 1e-12))))
    require(inside, "mu outside the solution grid", InputError)
    out = np.zeros(mu.size, dtype=complex)

    if params.omega != 0:
        b = params.b_kernel
        p = min(b, 1.0)  # t = v^(1/p) flattens t^(b-1) near 0
        v_unit, w_unit = _graded_unit(_RHS_LEVELS)
        span = mu**p
        v = span[:, None] * v_unit[None, :]
        t = v ** (1.0 / p)
        jac = (1.0 / p) * v ** (1.0 / p - 1.0) * span[:, None] * w_unit[None, :]
        z = 1j * params.zeta * t.ravel() ** params.rho
        kernel = prabhakar_batch(params.c, params.rho, b, params.x_cut, z, ctl)
        if not kernel.all_converged:
            missed = int((~kernel.converged).sum())
            logger.warning("volterra_rhs: kernel series not converged at %d nodes", missed)
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.where(t > 0, t ** (b - 1.0), 0.0) * jac
        integrand = weight * kernel.values.reshape(t.shape) * h.interpolate(mu[:, None] - t)
        out += params.omega * integrand.sum(axis=1)

    if params.delta_f != 0:
        out += params.delta_f * g(mu)
    return out


def volterra_rhs(
    params: FELParameters,
    h: GridFunction,
    g: Forcing,
    mu: float,
    ctl: TruncationControl = DEFAULT_CONTROL,
) -> complex:
    return complex(volterra_rhs_many(params, h, g, [mu], ctl)[0])


# ---------- left-hand side ----------
def check_points(f: GridFunction, richardson: bool = True, count: int = CHECK_POINTS) -> np.ndarray:
    """Nodes near k * mu_max / count, k = 1..count (even indices when extrapolating)."""
    m = f.intervals
    if richardson:
        require(
            m % 2 == 0 and m >= 32,
            "Richardson residuals need an even grid of >= 32 intervals",
            InputError,
        )
    idx = np.rint(np.arange(1, count + 1) * m / count).astype(int)
    if richardson:
        idx = 2 * np.rint(idx / 2.0).astype(int)
    idx = np.unique(np.clip(idx, 8, m))
    return idx * f.step


def _derivative(rem: GridFunction, a: float, mus: np.ndarray, richardson: bool) -> np.ndarray:
    fine = np.array([rl_fractional_derivative(rem, a, m) for m in mus], dtype=complex)
    if not richardson:
        return fine
    coarse_grid = rem.subsample(2)
    coarse = np.array([rl_fractional_derivative(coarse_grid, a, m) for m in mus], dtype=complex)
    return 2.0 * fine - coarse


def _order_at_zero(f: GridFunction, q: float) -> complex:
    """D^q f (q > 0), I^-q f (q < 0) or f itself, linearly extrapolated to 0."""
    if q == 0:
        return complex(f.values[0])
    op: Callable[[GridFunction, float, float], complex]
    op, order = (rl_fractional_derivative, q) if q > 0 else (rl_fractional_integral, -q)
    v1 = op(f, order, 8 * f.step)
    v2 = op(f, order, 16 * f.step)
    return 2.0 * v1 - v2


def _report(
    mus: np.ndarray,
    lhs: np.ndarray,
    rhs: np.ndarray,
    exact_mismatch: float,
    initial_errors: list[float],
    l1_max_abs: float | None = None,
) -> ResidualReport:
    max_abs = float(np.max(np.abs(lhs - rhs)))
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))))
    worst = max(max_abs, exact_mismatch)
    if worst == 0:
        rel = 0.0
    else:
        rel = worst / scale if scale > 0 else math.inf
    return ResidualReport(
        mu_points=mus,
        lhs=lhs,
        rhs=rhs,
        max_abs_residual=max_abs,
        rel_residual=rel,
        initial_errors=tuple(initial_errors),
        l1_max_abs_residual=l1_max_abs,
    )


def residual_rl(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    solution: GridFunction,
    ctl: TruncationControl = DEFAULT_CONTROL,
    richardson: bool = True,
) -> ResidualReport:
    """
    Residual for RL data. Initial values at the node mu = 0 (r = a) enter the
    relative residual; fractional ones are reported in `initial_errors`.
    """
    require(init.kind == "rl", "residual_rl needs RL initial data", InputError)
    init.check_against(params)
    a = params.a
    for r, b_r in init.items():
        if a - r < 0 and b_r != 0:
            raise InputError(
                f"b_{r} != 0 makes h singular at 0; grid verification needs b_r = 0 for r > a"
            )

    def annihilated(t: np.ndarray) -> np.ndarray:
        terms = (b_r * t ** (a - r) / sc.gamma(a - r + 1.0) for r, b_r in init.items() if a >= r)
        return sum(terms)

    mus = check_points(solution, richardson)
    lhs = _derivative(solution.minus(annihilated), a, mus, richardson)
    rhs = volterra_rhs_many(params, solution, forcing, mus, ctl)

    exact = 0.0
    errors = []
    for r, b_r in init.items():
        q = a - r
        err = abs(_order_at_zero(solution, q) - b_r)
        errors.append(err)
        if q == 0:
            exact = max(exact, err)
    return _report(mus, lhs, rhs, exact, errors)


def residual_caputo(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    solution: GridFunction,
    ctl: TruncationControl = DEFAULT_CONTROL,
    richardson: bool = True,
) -> ResidualReport:
    """
    Residual for Caputo data. h(0) = a_0 enters the relative residual;
    h'(0) = a_1 is only reported. For a <= 2 the L1 Caputo derivative, started
    from the declared initial values, gives a second left-hand side whose
    residual is reported as `l1_max_abs_residual`.
    """
    require(init.kind == "caputo", "residual_caputo needs Caputo initial data", InputError)
    init.check_against(params)

    def annihilated(t: np.ndarray) -> np.ndarray:
        return sum(a_r * t**r / math.factorial(r) for r, a_r in init.items())

    mus = check_points(solution, richardson)
    lhs = _derivative(solution.minus(annihilated), params.a, mus, richardson)
    rhs = volterra_rhs_many(params, solution, forcing, mus, ctl)

    vals, step = solution.values, solution.step
    exact = abs(vals[0] - init.coefficients[0])
    errors = [exact]
    if len(init.coefficients) > 1:
        slope = (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * step)
        errors.append(abs(slope - init.coefficients[1]))

    l1: float | None = None
    if params.a <= 2:
        a, coeffs = params.a, init.coefficients
        l1_lhs = np.array(
            [caputo_fractional_derivative(solution, a, m, coeffs) for m in mus], dtype=complex
        )
        l1 = float(np.max(np.abs(l1_lhs - rhs)))
    return _report(mus, lhs, rhs, exact, errors, l1)


def residual(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    solution: GridFunction,
    ctl: TruncationControl = DEFAULT_CONTROL,
    richardson: bool = True,
) -> ResidualReport:
    if init.kind == "rl":
        return residual_rl(params, init, forcing, solution, ctl, richardson)
    return residual_caputo(params, init, forcing, solution, ctl, richardson)
