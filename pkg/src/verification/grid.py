# src/verification/grid.py
from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..utils.errors import InputError, require

MIN_INTERVALS = 16


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples on the uniform grid t_j = j * step, j = 0..M."""

    values: np.ndarray
    step: float

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", vals)
        require(vals.ndim == 1, "grid values must be one-dimensional", InputError)
        require(
            vals.size - 1 >= MIN_INTERVALS,
            f"grid needs at least {MIN_INTERVALS} intervals",
            InputError,
        )
        require(np.isfinite(self.step) and self.step > 0, "grid step must be > 0", InputError)
        require(bool(np.all(np.isfinite(vals))), "grid values must be finite", InputError)

    @property
    def intervals(self) -> int:
        return self.values.size - 1

    @property
    def nodes(self) -> np.ndarray:
        return self.step * np.arange(self.values.size)

    @property
    def mu_max(self) -> float:
        return self.step * self.intervals

    @classmethod
    def from_callable(
        cls, f: Callable[[np.ndarray], np.ndarray], mu_max: float, intervals: int
    ) -> GridFunction:
        step = mu_max / intervals
        return cls(np.asarray(f(step * np.arange(intervals + 1)), dtype=complex), step)

    @classmethod
    def from_samples(
        cls, mu: Sequence[float] | np.ndarray, values: Sequence[complex] | np.ndarray
    ) -> GridFunction:
        """Wrap samples that sit on a uniform grid starting at 0 (e.g. solver output)."""
        mu_arr = np.asarray(mu, dtype=float)
        require(mu_arr.size >= 2 and mu_arr[0] == 0.0, "samples must start at mu = 0", InputError)
        step = float(mu_arr[1] - mu_arr[0])
        require(
            bool(np.allclose(np.diff(mu_arr), step, rtol=1e-9, atol=0.0)),
            "samples are not uniformly spaced",
            InputError,
        )
        return cls(np.asarray(values, dtype=complex), step)

    def index_of(self, mu: float) -> int:
        j = int(round(mu / self.step))
        require(
            0 <= j <= self.intervals and abs(j * self.step - mu) <= 1e-9 * max(1.0, abs(mu)),
            f"mu={mu!r} is not a grid node",
            InputError,
        )
        return j

    def subsample(self, stride: int) -> GridFunction:
        divisible = self.intervals % stride == 0
        require(divisible, f"{self.intervals} intervals not divisible by {stride}", InputError)
        return GridFunction(self.values[::stride], self.step * stride)

    def shifted(self, offset: complex) -> GridFunction:
        return GridFunction(self.values + offset, self.step)

    def minus(self, f: Callable[[np.ndarray], np.ndarray]) -> GridFunction:
        return GridFunction(self.values - np.asarray(f(self.nodes), dtype=complex), self.step)

    def interpolate(self, t: np.ndarray, kind: str = "cubic") -> np.ndarray:
        """Piecewise-linear or not-a-knot cubic spline interpolation inside [0, mu_max]."""
        tt = np.asarray(t, dtype=float)
        x = self.nodes
        if kind == "linear":
            return np.interp(tt, x, self.values.real) + 1j * np.interp(tt, x, self.values.imag)
        require(kind == "cubic", f"unknown interpolation kind {kind!r}", InputError)
        re = CubicSpline(x, self.values.real)(tt)
        im = CubicSpline(x, self.values.imag)(tt)
        return re + 1j * im
