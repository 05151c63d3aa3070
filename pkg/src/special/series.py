# src/special/series.py
"""
Truncation policy for the infinite series in this package.

A series stops once `consecutive_small` successive terms are each below
rel_tol * |partial sum|. The error estimate is the magnitude of the first
omitted term plus the rounding bound eps * sum |term| (1 + |ln |term||), so
a sum that cancels most of its digits is reported as unconverged. Terms are
produced in column blocks for many evaluation points at once, so each row
(point) stops independently. Rows lost to cancellation can be re-summed in
mpmath at a precision raised until the rounding bound is below the tolerance.
"""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, replace
from typing import Any

import mpmath
import numpy as np

from ..utils.errors import require

ABS_FLOOR = 1e-300
EPS = float(np.finfo(float).eps)
GUARD_DIGITS = 10
START_DPS = 40
MAX_PRECISION_PASSES = 4

# indices (K,) -> terms (rows, K)
TermBlock = Callable[[np.ndarray], np.ndarray]
# n -> n-th power-series coefficient as an mpmath number at the working precision
PreciseCoefficient = Callable[[int], Any]


@dataclass(frozen=True)
class TruncationControl:
    rel_tol: float = 1e-12
    max_terms: int = 500
    consecutive_small: int = 3

    def __post_init__(self) -> None:
        require(math.isfinite(self.rel_tol) and self.rel_tol > 0, "rel_tol must be > 0")
        whole = int(self.max_terms) == self.max_terms
        require(whole and self.max_terms >= 1, "max_terms must be >= 1")
        require(self.consecutive_small >= 1, "consecutive_small must be >= 1")

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> TruncationControl:
        return cls(
            rel_tol=float(d.get("rel_tol", 1e-12)),
            max_terms=int(d.get("max_terms", 500)),
            consecutive_small=int(d.get("consecutive_small", 3)),
        )

    def inner(self) -> TruncationControl:
        """Budget for a series nested inside another one."""
        return replace(self, rel_tol=self.rel_tol / 10.0)

    def with_max_terms(self, max_terms: int) -> TruncationControl:
        return replace(self, max_terms=int(max_terms))


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    err_estimate: float
    terms_used: int
    converged: bool

    def scaled(self, factor: complex) -> SeriesValue:
        return replace(
            self, value=self.value * factor, err_estimate=self.err_estimate * abs(factor)
        )


@dataclass(frozen=True)
class SeriesBatch:
    """Row-wise results of one series evaluated at many points."""

    values: np.ndarray
    err_estimates: np.ndarray
    terms_used: np.ndarray
    converged: np.ndarray

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def item(self, i: int = 0) -> SeriesValue:
        return SeriesValue(
            value=complex(self.values[i]),
            err_estimate=float(self.err_estimates[i]),
            terms_used=int(self.terms_used[i]),
            converged=bool(self.converged[i]),
        )

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    @classmethod
    def exact(cls, values: np.ndarray, terms_used: int = 1) -> SeriesBatch:
        values = np.asarray(values, dtype=complex)
        return cls(
            values=values,
            err_estimates=np.zeros(values.shape, dtype=float),
            terms_used=np.full(values.shape, terms_used, dtype=int),
            converged=np.ones(values.shape, dtype=bool),
        )


def _truncate(
    matrix: np.ndarray, ctl: TruncationControl, exhausted: bool
) -> tuple[SeriesBatch, bool]:
    m, n = matrix.shape
    c = ctl.consecutive_small
    partial = np.cumsum(matrix, axis=1)
    mag = np.abs(matrix)
    with np.errstate(invalid="ignore"):
        small = (mag <= ctl.rel_tol * np.abs(partial)) | (mag < ABS_FLOOR)

    if n >= c + 1:
        # window j covers terms j..j+c-1 and leaves term j+c as the first omitted one
        window = np.lib.stride_tricks.sliding_window_view(small[:, : n - 1], c, axis=1).all(axis=2)
        found = window.any(axis=1)
        end = np.argmax(window, axis=1) + c - 1
    else:
        found = np.zeros(m, dtype=bool)
        end = np.zeros(m, dtype=int)

    if not exhausted and not found.all():
        return _EMPTY, False

    end = np.where(found, end, max(n - 2, 0))
    rows = np.arange(m)
    values = partial[rows, end]
    with np.errstate(divide="ignore", invalid="ignore"):
        # terms built as exp(log) carry a relative error growing with |ln term|
        weighted = np.where(mag > 0, mag * (1.0 + np.abs(np.log(mag))), 0.0)
    rounding = EPS * np.cumsum(weighted, axis=1)[rows, end]
    err = mag[rows, np.minimum(end + 1, n - 1)] + rounding
    used = end + 1
    with np.errstate(invalid="ignore"):
        converged = (
            found
            & (used < ctl.max_terms)
            & ((err <= ctl.rel_tol * np.abs(values)) | (np.abs(values) < ABS_FLOOR))
        )
    return SeriesBatch(values=values, err_estimates=err, terms_used=used, converged=converged), True


_EMPTY = SeriesBatch.exact(np.zeros(0))


def sum_series(
    terms: TermBlock, n_rows: int, ctl: TruncationControl, first_block: int = 32
) -> SeriesBatch:
    """Sum term columns produced by `terms` until every row meets the stopping rule."""
    limit = ctl.max_terms + 1
    blocks: list[np.ndarray] = []
    n_cols = 0
    size = min(first_block, limit)
    while True:
        idx = np.arange(n_cols, min(n_cols + size, limit))
        block = np.asarray(terms(idx), dtype=complex).reshape(n_rows, idx.size)
        blocks.append(block)
        n_cols += idx.size
        matrix = np.concatenate(blocks, axis=1) if len(blocks) > 1 else block
        batch, done = _truncate(matrix, ctl, exhausted=n_cols >= limit)
        if done:
            return batch
        size = n_cols


def _precise_pass(
    coefficient: PreciseCoefficient, z: complex, ctl: TruncationControl
) -> tuple[Any, Any, Any, int, bool]:
    w = mpmath.mpc(z)
    total = mpmath.mpc(0)
    largest = mpmath.mpf(0)
    run = 0
    used = 0
    while used < ctl.max_terms and run < ctl.consecutive_small:
        term = coefficient(used) * w**used
        total += term
        used += 1
        mag = abs(term)
        largest = max(largest, mag)
        small = mag <= ctl.rel_tol * abs(total) or mag < ABS_FLOOR
        run = run + 1 if small else 0
    omitted = abs(coefficient(used) * w**used)
    return total, largest, omitted, used, run >= ctl.consecutive_small


def sum_power_series_precise(
    coefficient: PreciseCoefficient, z: complex, ctl: TruncationControl
) -> SeriesValue:
    """
    sum_n coefficient(n) z^n in mpmath, same stopping rule as `sum_series`.

    The working precision grows until eps_mp * max |term| is below
    rel_tol * |sum|, or MAX_PRECISION_PASSES is reached.
    """
    tol_digits = max(0, math.ceil(-math.log10(ctl.rel_tol)))
    dps = max(START_DPS, tol_digits + GUARD_DIGITS)
    for _ in range(MAX_PRECISION_PASSES):
        with mpmath.workdps(dps):
            total, largest, omitted, used, found = _precise_pass(coefficient, z, ctl)
            rounding = largest * mpmath.mp.eps
            value = complex(total)
            err = float(omitted + rounding)
            size = abs(total)
            if size == 0 or largest == 0:
                break
            lost = float(mpmath.log10(largest / size))
        need = math.ceil(lost) + tol_digits + GUARD_DIGITS
        if need <= dps:
            break
        dps = need
    converged = (
        found
        and used < ctl.max_terms
        and (err <= ctl.rel_tol * abs(value) or abs(value) < ABS_FLOOR)
    )
    return SeriesValue(value=value, err_estimate=err, terms_used=used, converged=converged)


def refine_cancelled_rows(
    batch: SeriesBatch,
    z: np.ndarray,
    coefficient_at: PreciseCoefficient,
    ctl: TruncationControl,
) -> SeriesBatch:
    """
    Re-sum in mpmath the rows that met the stopping rule but lost their digits to
    cancellation (unconverged although fewer than max_terms terms were used).
    """
    rows = np.flatnonzero(~batch.converged & (batch.terms_used < ctl.max_terms))
    if rows.size == 0:
        return batch
    values = batch.values.copy()
    err = batch.err_estimates.copy()
    used = batch.terms_used.copy()
    ok = batch.converged.copy()
    # rows share coefficients; key on the binary precision they were computed at
    memo: dict[tuple[int, int], Any] = {}

    def cached(n: int) -> Any:
        key = (n, mpmath.mp.prec)
        if key not in memo:
            memo[key] = coefficient_at(n)
        return memo[key]

    for i in rows:
        fixed = sum_power_series_precise(cached, complex(z[i]), ctl)
        values[i], err[i] = fixed.value, fixed.err_estimate
        used[i], ok[i] = fixed.terms_used, fixed.converged
    return SeriesBatch(values=values, err_estimates=err, terms_used=used, converged=ok)


def power_terms(log_coefficients: np.ndarray, n: np.ndarray, z: np.ndarray) -> np.ndarray:
    """exp(log_coefficients[j]) * z**n[j] as a (len(z), len(n)) array, with 0**0 = 1."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_abs = np.log(np.abs(z))
        scale = np.where(n[None, :] == 0, 0.0, n[None, :] * log_abs[:, None])
        magnitude = np.exp(np.asarray(log_coefficients, dtype=float)[None, :] + scale)
    phase = np.exp(1j * n[None, :] * np.angle(z)[:, None])
    return magnitude * phase
