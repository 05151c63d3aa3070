# src/verification/operators.py
"""
Fractional operators on uniform grids, independent of the series solver.

- Grunwald-Letnikov sums for the Riemann-Liouville derivative (order a > 0)
  and integral (order q > 0), first order in h.
- L1-type product rule for the Caputo derivative, 0 < a <= 2.
"""
from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from scipy import special as sc

from ..utils.errors import DomainError, InputError, require
from .grid import GridFunction

MIN_DEPTH = 4


def gl_weights(order: float, count: int) -> np.ndarray:
    """(-1)^j binom(order, j) for j < count; a negative order gives the integral weights."""
    w = np.empty(count)
    w[0] = 1.0
    if count > 1:
        j = np.arange(1, count, dtype=float)
        w[1:] = np.cumprod(1.0 - (order + 1.0) / j)
    return w


def _node(f: GridFunction, mu: float) -> int:
    j = f.index_of(mu)
    require(
        j >= MIN_DEPTH, f"mu={mu!r} needs at least {MIN_DEPTH} grid steps behind it", InputError
    )
    return j


def _gl_sum(f: GridFunction, order: float, j: int) -> complex:
    w = gl_weights(order, j + 1)
    return complex(np.dot(w, f.values[j::-1]) * f.step ** (-order))


def rl_fractional_derivative(f: GridFunction, a: float, mu: float) -> complex:
    require(a > 0, f"derivative order must be > 0, got {a!r}")
    return _gl_sum(f, a, _node(f, mu))


def rl_fractional_integral(f: GridFunction, q: float, mu: float) -> complex:
    require(q > 0, f"integral order must be > 0, got {q!r}")
    return _gl_sum(f, -q, _node(f, mu))


def rl_fractional_derivative_many(f: GridFunction, a: float, mus: Sequence[float]) -> np.ndarray:
    return np.array([rl_fractional_derivative(f, a, m) for m in mus], dtype=complex)


def caputo_fractional_derivative(
    f: GridFunction, a: float, mu: float, initial_values: Sequence[complex] | None = None
) -> complex:
    """
    L1 scheme for 0 < a <= 1, its second-difference analogue for 1 < a <= 2.

    `initial_values` (f(0), f'(0)) replace the grid value and the one-sided
    difference at the origin when given.
    """
    require(a > 0, f"derivative order must be > 0, got {a!r}")
    m = math.ceil(a)
    if m > 2:
        raise DomainError(f"Caputo L1 scheme supports orders up to 2, got {a!r}")
    j = _node(f, mu)
    h = f.step
    vals = f.values[: j + 1].copy()
    init = list(initial_values or [])
    if init:
        vals[0] = complex(init[0])

    if m == 1:
        k = np.arange(j, dtype=float)
        b = (k + 1.0) ** (1.0 - a) - k ** (1.0 - a)
        b[0] = 1.0  # 0^(1-a) = 0 also in the limit a -> 1
        diffs = vals[1:] - vals[:-1]  # diffs[i-1] = f_i - f_{i-1}
        return complex(np.dot(b, diffs[::-1]) * h ** (-a) / sc.gamma(2.0 - a))

    if len(init) > 1:
        slope0 = complex(init[1])
    else:
        slope0 = (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * h)
    second = np.empty(j, dtype=complex)
    second[0] = 2.0 * (vals[1] - vals[0] - h * slope0)
    second[1:] = vals[2:] - 2.0 * vals[1:-1] + vals[:-2]
    k = np.arange(j, dtype=float)
    c = (k + 1.0) ** (2.0 - a) - k ** (2.0 - a)
    c[0] = 1.0
    return complex(np.dot(c, second[::-1]) * h ** (-a) / sc.gamma(3.0 - a))
