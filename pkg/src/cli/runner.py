# src/cli/runner.py
from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from ..fel.solver import QuadratureConfig, solution_frame, solve
from ..fel.sweep import run_sweep
from ..special.incomplete import incomplete_ml_batch, incomplete_wright_batch
from ..special.series import SeriesBatch
from ..utils.errors import FelkitError
from ..utils.io import export_frame_csv, save_json
from ..utils.log import configure, get_logger
from ..verification.grid import GridFunction
from ..verification.residual import residual
from .config import RunConfig

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4


@dataclass
class Outcome:
    frame: pd.DataFrame
    converged: bool
    exit_code: int = EXIT_OK
    # extra top-level JSON fields (verify summary)
    summary: dict[str, Any] = field(default_factory=dict)


def _series_frame(z: list[complex], batch: SeriesBatch) -> pd.DataFrame:
    zs = np.asarray(z, dtype=complex)
    return pd.DataFrame(
        {
            "re_z": zs.real,
            "im_z": zs.imag,
            "re": batch.values.real,
            "im": batch.values.imag,
            "abs": np.abs(batch.values),
            "err_estimate": batch.err_estimates,
            "terms_used": batch.terms_used,
            "converged": batch.converged,
        }
    )


def _eval_ml(cfg: RunConfig) -> Outcome:
    batch = incomplete_ml_batch(cfg.alpha, cfg.beta, cfg.lam, cfg.x, cfg.z, cfg.control(), cfg.kind)
    return Outcome(_series_frame(cfg.z, batch), batch.all_converged)


def _eval_wright(cfg: RunConfig) -> Outcome:
    spec = cfg.wright_spec()
    if not spec.satisfies_entirety_condition:
        logger.info("entirety indicator %.6g does not exceed 1", spec.entirety_indicator)
    batch = incomplete_wright_batch(spec, cfg.z, cfg.control())
    return Outcome(_series_frame(cfg.z, batch), batch.all_converged)


def _solve(cfg: RunConfig) -> Outcome:
    evaluations = solve(
        cfg.fel_parameters(),
        cfg.initial_data(),
        cfg.forcing_function(),
        cfg.mu_grid(),
        cfg.control(),
    )
    return Outcome(solution_frame(evaluations), all(e.converged for e in evaluations))


def _verify(cfg: RunConfig) -> Outcome:
    params, init, forcing = cfg.fel_parameters(), cfg.initial_data(), cfg.forcing_function()
    inexact = params.power_rule != "convolution" and params.omega != 0 and params.c != 0
    if params.x_cut > 0 and inexact:
        logger.warning(
            "x = %g with power rule '%s' does not give the exact resolvent; "
            "expect a residual that does not shrink with the grid (use --power-rule convolution)",
            params.x_cut,
            params.power_rule,
        )
    mu = cfg.mu_grid()
    evaluations = solve(params, init, forcing, mu, cfg.control())
    solution = GridFunction.from_samples(mu, [e.h for e in evaluations])
    report = residual(params, init, forcing, solution, cfg.control(), cfg.richardson)
    passed = report.passed(cfg.tol_residual)
    msg = "max_abs_residual=%.3e rel_residual=%.3e (tol %.1e)"
    if passed:
        logger.info("[OK] " + msg, report.max_abs_residual, report.rel_residual, cfg.tol_residual)
    else:
        logger.error(msg, report.max_abs_residual, report.rel_residual, cfg.tol_residual)
    if report.l1_max_abs_residual is not None:
        logger.info("L1 cross-check: max_abs_residual=%.3e", report.l1_max_abs_residual)
    frame = solution_frame(evaluations)
    frame["max_abs_residual"] = report.max_abs_residual
    frame["rel_residual"] = report.rel_residual
    summary = {**report.summary(), "tol_residual": cfg.tol_residual, "passed": passed}
    return Outcome(
        frame,
        all(e.converged for e in evaluations),
        EXIT_OK if passed else EXIT_VERIFY_FAILED,
        summary,
    )


def _sweep(cfg: RunConfig) -> Outcome:
    frame, converged = run_sweep(
        cfg.fel_parameters(),
        cfg.initial_data(),
        cfg.forcing_function(),
        cfg.mu_grid(),
        cfg.sweep_axes(),
        cfg.control(),
        QuadratureConfig(),
        n_jobs=cfg.jobs,
    )
    return Outcome(frame, converged)


_HANDLERS: dict[str, Callable[[RunConfig], Outcome]] = {
    "eval-ml": _eval_ml,
    "eval-wright": _eval_wright,
    "solve": _solve,
    "verify": _verify,
    "sweep": _sweep,
}


def _write(cfg: RunConfig, outcome: Outcome) -> str:
    if cfg.format == "csv":
        return export_frame_csv(outcome.frame, cfg.output)
    records = outcome.frame.to_dict(orient="records")
    payload: Any = {"rows": records, **outcome.summary} if outcome.summary else records
    return save_json(payload, cfg.output)


def run(cfg: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    configure("INFO" if cfg.verbose else None, Path(cfg.log) if cfg.log else None)
    logger.info("felkit %s", cfg.command)
    try:
        outcome = _HANDLERS[cfg.command](cfg)
        target = _write(cfg, outcome)
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return EXIT_IO
    except FelkitError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    logger.info("wrote %d rows to %s", len(outcome.frame), target)

    if not outcome.converged:
        logger.warning("some series did not converge; see err_estimate")
        if cfg.strict:
            return EXIT_NOT_CONVERGED
    return outcome.exit_code
