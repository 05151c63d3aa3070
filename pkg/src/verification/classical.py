# src/verification/classical.py
from __future__ import annotations

import math

import numpy as np

from ..utils.errors import InputError, require
from ..utils.log import get_logger
from .grid import MIN_INTERVALS, GridFunction

logger = get_logger(__name__)


def classical_fel_reference(
    g0: float, nu: float, mu_max: float = 1.0, intervals: int = 1024, h0: complex = 1.0
) -> GridFunction:
    """
    Direct integration of the small-signal FEL equation

        h'(mu) = -i pi g0 int_0^mu psi e^(i nu psi) h(mu - psi) dpsi,   h(0) = h0,

    trapezoidal in the memory integral and in time (second order). The
    kernel vanishes at psi = 0, so the memory term at the new node does not
    involve the unknown and the corrector step is explicit.
    """
    require(mu_max > 0, f"mu_max must be > 0, got {mu_max!r}", InputError)
    require(intervals >= MIN_INTERVALS, f"need at least {MIN_INTERVALS} intervals", InputError)
    gain = -1j * math.pi * g0
    dt = mu_max / intervals
    psi = dt * np.arange(intervals + 1)
    kernel = psi * np.exp(1j * nu * psi)

    h = np.empty(intervals + 1, dtype=complex)
    h[0] = h0
    memory_prev = 0j
    for j in range(1, intervals + 1):
        memory = dt * (np.dot(kernel[1:j], h[j - 1 : 0 : -1]) + 0.5 * kernel[j] * h[0])
        h[j] = h[j - 1] + 0.5 * dt * gain * (memory_prev + memory)
        memory_prev = memory
    logger.debug(
        "classical FEL reference: g0=%g nu=%g, %d steps, |h(end)|=%.6g",
        g0,
        nu,
        intervals,
        abs(h[-1]),
    )
    return GridFunction(h, dt)
