# src/verification/laplace.py
"""Forward Laplace transform by quadrature and fixed-Talbot inversion."""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import simpson

from ..utils.errors import DomainError, EvaluationError, require
from ..utils.log import get_logger
from .grid import GridFunction

logger = get_logger(__name__)

Sampler = Callable[[np.ndarray], np.ndarray]

TAIL_TOL = 1e-14
_NODES = 20
_NEAR_ZERO_LEVELS = 40
_MAX_PANELS = 20_000


@dataclass(frozen=True)
class LaplaceEstimate:
    value: complex
    tail_bound: float
    horizon: float


@lru_cache(maxsize=4)
def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return leggauss(n)


def _panel_sum(f: Sampler, s: complex, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    x, w = _gauss(_NODES)
    half = (hi - lo) / 2.0
    t = lo[:, None] + half[:, None] * (x[None, :] + 1.0)
    vals = np.asarray(f(t.ravel()), dtype=complex).reshape(t.shape)
    return np.sum(half[:, None] * w[None, :] * np.exp(-s * t) * vals, axis=1)


def _laplace_sampler(f: Sampler, s: complex, horizon: float | None) -> LaplaceEstimate:
    width = min(1.0, 2.0 / abs(s))
    # dyadic panels on [0, width] absorb integrable endpoint singularities
    powers = 2.0 ** -np.arange(_NEAR_ZERO_LEVELS, -1, -1, dtype=float)
    edges = np.concatenate(([0.0], width * powers))
    total = complex(np.sum(_panel_sum(f, s, edges[:-1], edges[1:])))
    start = width

    if horizon is not None:
        count = max(1, math.ceil((horizon - start) / width))
        lo = start + width * np.arange(count)
        hi = np.minimum(lo + width, horizon)
        total += complex(np.sum(_panel_sum(f, s, lo, hi)))
        end = horizon
    else:
        end = start
        quiet = 0
        for _ in range(_MAX_PANELS):
            part = complex(_panel_sum(f, s, np.array([end]), np.array([end + width]))[0])
            total += part
            end += width
            quiet = quiet + 1 if abs(part) <= TAIL_TOL * abs(total) else 0
            if quiet >= 2 and math.exp(-s.real * end) <= TAIL_TOL:
                break
        else:
            logger.warning("numerical Laplace: horizon cap reached at T=%.6g", end)

    tail_value = abs(complex(np.asarray(f(np.array([end])), dtype=complex)[0]))
    tail_bound = tail_value * math.exp(-s.real * end) / s.real
    logger.debug("numerical Laplace at s=%s: horizon %.6g, tail bound %.3g", s, end, tail_bound)
    return LaplaceEstimate(value=total, tail_bound=tail_bound, horizon=end)


def _laplace_grid(f: GridFunction, s: complex) -> LaplaceEstimate:
    t = f.nodes
    integrand = np.exp(-s * t) * f.values
    # odd interval counts get the quadratic end correction
    value = simpson(integrand.real, dx=f.step) + 1j * simpson(integrand.imag, dx=f.step)
    end = f.mu_max
    tail_bound = abs(f.values[-1]) * math.exp(-s.real * end) / s.real
    return LaplaceEstimate(value=complex(value), tail_bound=tail_bound, horizon=end)


def numerical_laplace(
    f: GridFunction | Sampler, s: complex, horizon: float | None = None
) -> LaplaceEstimate:
    """
    int_0^T e^(-s t) f(t) dt with a bound |f(T)| e^(-Re(s) T) / Re(s) on the
    neglected tail (assumes f does not grow past T).

    A sampler is integrated to `horizon`, or until panel contributions fall
    below 1e-14 of the running value; a GridFunction stops at its last node.
    """
    s = complex(s)
    if s.real <= 0:
        raise DomainError(f"numerical Laplace transform needs Re(s) > 0, got {s}")
    if isinstance(f, GridFunction):
        return _laplace_grid(f, s)
    require(horizon is None or horizon > 0, "horizon must be > 0")
    return _laplace_sampler(f, s, horizon)


def talbot_invert(F: Callable[[complex], complex], t: float, M: int = 32) -> complex:
    """
    Fixed Talbot inversion with r = 2M/5. Both halves of the contour are
    summed so complex-valued originals are recovered too.
    """
    require(t > 0, f"inversion time must be > 0, got {t!r}")
    require(M >= 2, f"Talbot node count must be >= 2, got {M!r}")
    r = 2.0 * M / 5.0
    theta = np.arange(1, M) * math.pi / M
    cot = 1.0 / np.tan(theta)
    p = (r / t) * theta * (cot + 1j)
    sigma = theta * (1.0 + cot**2) - cot
    try:
        upper = np.array([complex(F(complex(pk))) for pk in p])
        lower = np.array([complex(F(complex(pk))) for pk in np.conj(p)])
        base = complex(F(complex(r / t)))
    except OverflowError as exc:
        raise EvaluationError(f"image overflows on the Talbot contour at t={t!r}") from exc
    try:
        with np.errstate(over="raise", invalid="raise"):
            total = math.exp(r) * base
            total += np.sum(np.exp(p * t) * upper * (1.0 + 1j * sigma))
            total += np.sum(np.exp(np.conj(p) * t) * lower * (1.0 - 1j * sigma))
    except (OverflowError, FloatingPointError) as exc:
        raise EvaluationError(f"overflow on the Talbot contour at t={t!r}") from exc
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise EvaluationError(f"non-finite Talbot sum at t={t!r}")
    return complex(total / (5.0 * t))
