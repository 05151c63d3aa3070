# tests/test_sweep.py
import math

import numpy as np
import pandas as pd
import pytest

from src.fel.params import Forcing, classical_fel_parameters
from src.fel.solver import solve
from src.fel.sweep import apply_point, run_sweep, sweep_points
from src.utils.errors import InputError


def test_sweep_points_last_axis_fastest():
    pts = sweep_points({"zeta": [1.0, 2.0], "omega": [0.1j, 0.2j, 0.3j]})
    assert len(pts) == 6
    assert pts[0] == {"zeta": 1.0, "omega": 0.1j}
    assert pts[1] == {"zeta": 1.0, "omega": 0.2j}
    assert pts[3] == {"zeta": 2.0, "omega": 0.1j}


def test_sweep_points_validation():
    with pytest.raises(InputError):
        sweep_points({"colour": [1.0]})
    with pytest.raises(InputError):
        sweep_points({"zeta": []})
    with pytest.raises(InputError):
        sweep_points({"g0": [0.1], "omega": [0.1j]})


def test_apply_point_maps_gain_to_coupling():
    params, _ = classical_fel_parameters(g0=0.1, nu=1.0)
    changed = apply_point(params, {"g0": 0.2, "zeta": 0.5})
    assert changed.omega == pytest.approx(-1j * math.pi * 0.2)
    assert changed.zeta == 0.5
    assert changed.a == params.a


def test_run_sweep_matches_single_solves():
    params, init = classical_fel_parameters(g0=0.1, nu=1.0)
    mu = np.linspace(0.0, 1.0, 5)
    df, converged = run_sweep(params, init, Forcing.constant(), mu, {"g0": [0.05, 0.2]})
    assert converged
    assert isinstance(df, pd.DataFrame)
    assert list(df.columns) == ["g0", "mu", "re_h", "im_h", "abs_h", "err_estimate"]
    assert len(df) == 10

    single = solve(apply_point(params, {"g0": 0.2}), init, Forcing.constant(), mu)
    tail = df[df["g0"] == 0.2]
    assert np.allclose(tail["re_h"], [e.h.real for e in single], rtol=0, atol=1e-15)
    assert np.allclose(tail["im_h"], [e.h.imag for e in single], rtol=0, atol=1e-15)


def test_run_sweep_is_worker_independent():
    params, init = classical_fel_parameters(g0=0.1, nu=1.0)
    mu = np.linspace(0.0, 1.0, 3)
    axes = {"zeta": [0.5, 1.0, 1.5], "omega": [0.1j, -0.3j]}
    serial, _ = run_sweep(params, init, Forcing.constant(), mu, axes, n_jobs=1)
    parallel, _ = run_sweep(params, init, Forcing.constant(), mu, axes, n_jobs=2)
    assert list(serial.columns[:3]) == ["zeta", "re_omega", "im_omega"]
    pd.testing.assert_frame_equal(serial, parallel)
