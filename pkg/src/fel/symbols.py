# src/fel/symbols.py
"""
Coefficients d^(k)_n of the k-th power of the incomplete binomial symbol

    (1 - w)^(-[c; x])  =  sum_n [c; x]_n w^n / n!,

shared by the time-domain kernels (w -> i zeta mu^rho, with the extra
1/Gamma(rho n + beta)) and the Laplace image (w -> i zeta s^-rho).

Three expansions of the k-th power are offered:

- "parameter":            [c k; x]_n / n!
- "parameter_and_cutoff": [c k; x k]_n / n!
- "convolution":          k-fold Cauchy product of [c; x]_n / n!

All three agree when x = 0. Only the Cauchy product is the k-th power of
the series for x > 0, so it is the one that makes the resolvent exact.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..special.incomplete import log_binomial_coefficients
from ..utils.errors import require
from .params import PowerRule

_MIN_TABLE = 32
_MAX_POWER_KEYS = 64

# (c, x, size) -> [d^(0), d^(1), ...], extended on demand
_power_tables: dict[tuple[float, float, int], list[np.ndarray]] = {}


def _table_size(n_max: int) -> int:
    return max(_MIN_TABLE, 1 << math.ceil(math.log2(n_max + 1)))


@lru_cache(maxsize=256)
def _base_table(c: float, x: float, size: int) -> np.ndarray:
    with np.errstate(under="ignore"):
        return np.exp(log_binomial_coefficients(c, x, np.arange(size)))


def _cauchy_power_table(c: float, x: float, k: int, size: int) -> np.ndarray:
    key = (c, x, size)
    powers = _power_tables.get(key)
    if powers is None:
        if len(_power_tables) >= _MAX_POWER_KEYS:
            _power_tables.pop(next(iter(_power_tables)))
        unit = np.zeros(size)
        unit[0] = 1.0
        unit.setflags(write=False)
        powers = _power_tables[key] = [unit]
    base = _base_table(c, x, size)
    while len(powers) <= k:
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            nxt = np.convolve(powers[-1], base)[:size]
        nxt.setflags(write=False)
        powers.append(nxt)
    return powers[k]


def kernel_power_log_coefficients(
    c: float, x: float, k: int, n: np.ndarray, rule: PowerRule = "parameter"
) -> np.ndarray:
    """ln d^(k)_n for the requested indices n."""
    require(k >= 0, f"power index must be >= 0, got {k!r}")
    n = np.asarray(n)
    if k == 0 or c == 0:
        return np.where(n == 0, 0.0, -np.inf)
    if rule == "parameter":
        return log_binomial_coefficients(c * k, x, n)
    if rule == "parameter_and_cutoff":
        return log_binomial_coefficients(c * k, x * k, n)
    idx = n.astype(int)
    table = _cauchy_power_table(float(c), float(x), int(k), _table_size(int(idx.max(initial=0))))
    with np.errstate(divide="ignore"):
        return np.log(table[idx])
