# src/fel/sweep.py
from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from typing import Any

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..special.series import TruncationControl
from ..utils.errors import InputError, require
from ..utils.log import get_logger
from .params import FELParameters, Forcing, InitialData
from .solver import DEFAULT_CONTROL, DEFAULT_QUADRATURE, QuadratureConfig, solution_frame, solve

logger = get_logger(__name__)

REAL_KEYS = ("a", "b_kernel", "c", "rho", "zeta", "x_cut")
COMPLEX_KEYS = ("omega", "delta_f")
# g0 is the small-signal gain of the classical model: omega = -i pi g0
DERIVED_KEYS = ("g0",)
SWEEPABLE = REAL_KEYS + COMPLEX_KEYS + DERIVED_KEYS


def sweep_points(axes: Mapping[str, Sequence[Any]]) -> list[dict[str, Any]]:
    """Cartesian product of the sweep axes, last axis varying fastest."""
    for key, values in axes.items():
        choices = ", ".join(SWEEPABLE)
        require(key in SWEEPABLE, f"cannot sweep over {key!r}; choose from {choices}", InputError)
        require(len(values) >= 1, f"sweep axis {key!r} is empty", InputError)
    require(not ("g0" in axes and "omega" in axes), "sweep g0 or omega, not both", InputError)
    keys = list(axes)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(axes[k] for k in keys))]


def apply_point(params: FELParameters, point: Mapping[str, Any]) -> FELParameters:
    changes: dict[str, Any] = {}
    for key, value in point.items():
        if key == "g0":
            changes["omega"] = -1j * math.pi * float(value)
        elif key in COMPLEX_KEYS:
            changes[key] = complex(value)
        else:
            changes[key] = float(value)
    return params.with_changes(**changes)


def _point_columns(point: Mapping[str, Any]) -> dict[str, float]:
    cols: dict[str, float] = {}
    for key, value in point.items():
        if key in COMPLEX_KEYS:
            z = complex(value)
            cols[f"re_{key}"] = z.real
            cols[f"im_{key}"] = z.imag
        else:
            cols[key] = float(value)
    return cols


def _solve_point(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: np.ndarray,
    point: Mapping[str, Any],
    ctl: TruncationControl,
    quad: QuadratureConfig,
) -> tuple[pd.DataFrame, bool]:
    evaluations = solve(apply_point(params, point), init, forcing, mu_grid, ctl, quad)
    df = solution_frame(evaluations)
    for i, (name, value) in enumerate(_point_columns(point).items()):
        df.insert(i, name, value)
    return df, all(e.converged for e in evaluations)


def run_sweep(
    params: FELParameters,
    init: InitialData,
    forcing: Forcing,
    mu_grid: Sequence[float] | np.ndarray,
    axes: Mapping[str, Sequence[Any]],
    ctl: TruncationControl = DEFAULT_CONTROL,
    quad: QuadratureConfig = DEFAULT_QUADRATURE,
    n_jobs: int = 1,
) -> tuple[pd.DataFrame, bool]:
    """
    Solve at every sweep point; one output row per (point, mu).

    Rows come back in sweep order whatever the worker count. Returns the
    frame and whether every point converged.
    """
    points = sweep_points(axes)
    mu = np.asarray(mu_grid, dtype=float)
    logger.info("sweep: %d points x %d mu values, n_jobs=%d", len(points), mu.size, n_jobs)
    results = Parallel(n_jobs=n_jobs)(
        delayed(_solve_point)(params, init, forcing, mu, point, ctl, quad) for point in points
    )
    frames = [df for df, _ in results]
    converged = all(ok for _, ok in results)
    return pd.concat(frames, ignore_index=True), converged
