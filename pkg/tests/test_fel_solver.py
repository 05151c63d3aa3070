# tests/test_fel_solver.py
import math

import mpmath
import numpy as np
import pandas as pd
import pytest
from scipy import special as sc

from src.fel.laplace import h_laplace_image, kernel_laplace_symbol
from src.fel.params import (
    FELParameters,
    Forcing,
    InitialData,
    classical_fel_parameters,
    confluent_kernel_parameters,
    power_exponential_parameters,
)
from src.fel.solver import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    kernel_aleph,
    kernel_aleph_batch,
    kernel_aleph_wright,
    solution_frame,
    solve,
    solve_caputo,
    solve_rl,
    y_r_batch,
    y_r_caputo,
    y_r_caputo_wright,
    y_r_rl,
    y_r_rl_wright,
)
from src.fel.symbols import kernel_power_log_coefficients
from src.special.incomplete import prabhakar_batch
from src.special.series import TruncationControl
from src.utils.errors import DomainError, InputError
from src.verification.classical import classical_fel_reference
from src.verification.laplace import numerical_laplace, talbot_invert

INV_SQRT_PI_HALF = 0.25**-0.5 / math.gamma(0.5)  # 1.1283792...


def _h(evaluations):
    return np.array([e.h for e in evaluations])


# ---------- fundamental solutions ----------
def test_y_r_rl_without_coupling_is_power():
    params = FELParameters(a=0.5, b_kernel=1.3, c=2.0, zeta=1.0, x_cut=0.4)
    r = y_r_rl(params, 1, 0.25)
    assert r.converged
    assert r.value == pytest.approx(INV_SQRT_PI_HALF, rel=1e-13)
    assert r.value == pytest.approx(1.1283792, rel=1e-7)


def test_y_r_rl_leading_singularity():
    params = FELParameters(a=0.5, b_kernel=1.5, c=1.0, zeta=1.0, omega=0.3 + 0.2j, x_cut=0.2)
    gaps = []
    for mu in [1e-2, 1e-4, 1e-6]:
        v = y_r_rl(params, 1, mu).value
        gaps.append(abs(v * math.sqrt(mu) * math.gamma(0.5) - 1.0))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-10


def test_y_r_rl_with_zero_detuning_matches_direct_sum():
    omega = -1j * math.pi * 0.1
    params = FELParameters(a=1.0, b_kernel=2.0, c=2.0, rho=1.0, zeta=0.0, omega=omega)
    with mpmath.workdps(30):
        w = mpmath.mpc(omega)
        half = mpmath.mpf(0.5)
        terms = (w**k * half ** (3 * k) / mpmath.gamma(3 * k + 1) for k in range(100))
        expected = complex(sum(terms))
    got = y_r_rl(params, 1, 0.5)
    assert got.converged
    assert abs(got.value - expected) <= 1e-13 * abs(expected)


def test_y_r_caputo_without_coupling():
    params = FELParameters(a=1.5, b_kernel=1.0, c=1.0, zeta=2.0)
    for mu in [0.0, 0.3, 1.0]:
        assert y_r_caputo(params, 0, mu).value == pytest.approx(1.0, rel=1e-15)
    assert y_r_caputo(params, 1, 0.3).value == pytest.approx(0.3, rel=1e-14)


def test_y_r_caputo_initial_values():
    params = FELParameters(a=1.5, b_kernel=1.0, c=1.0, zeta=2.0, omega=0.7, x_cut=0.5)
    assert y_r_caputo(params, 0, 0.0).value == 1.0
    assert y_r_caputo(params, 1, 0.0).value == 0.0


def test_index_and_domain_errors():
    params = FELParameters(a=1.5, b_kernel=1.0)
    with pytest.raises(DomainError):
        y_r_rl(params, 3, 0.5)
    with pytest.raises(DomainError):
        y_r_caputo(params, 2, 0.5)
    # mu^(a - 2) blows up at the origin
    with pytest.raises(DomainError):
        y_r_rl(params, 2, 0.0)
    with pytest.raises(DomainError):
        y_r_rl(params, 1, -0.1)


def test_kernel_aleph_without_coupling():
    got = kernel_aleph(FELParameters(a=0.5, b_kernel=2.0), 0.25)
    assert got.value == pytest.approx(INV_SQRT_PI_HALF, rel=1e-13)
    params = FELParameters(a=1.0, b_kernel=2.0, zeta=1.0)
    for u in [0.01, 0.5, 1.0]:
        assert kernel_aleph(params, u).value == pytest.approx(1.0, rel=1e-15)


def test_kernel_aleph_matches_talbot_inversion_of_resolvent_image():
    params = FELParameters(
        a=0.8,
        b_kernel=2.0,
        c=1.0,
        rho=1.0,
        zeta=1.0,
        x_cut=0.5,
        omega=0.3,
        power_rule="convolution",
    )

    def image(s):
        symbol = kernel_laplace_symbol(params, s).value
        return s**-params.a / (1.0 - params.omega * s**-params.a * symbol)

    expected = talbot_invert(image, 0.5)
    got = kernel_aleph(params, 0.5)
    assert got.converged
    assert abs(got.value - expected) <= 1e-8 * abs(expected)


def test_aleph_is_first_rl_fundamental_solution():
    params = FELParameters(
        a=0.6, b_kernel=1.4, c=1.2, rho=0.9, zeta=1.5, omega=0.4 - 0.1j, x_cut=0.3
    )
    u = np.linspace(0.05, 1.0, 7)
    aleph = kernel_aleph_batch(params, u).values
    assert np.array_equal(aleph, y_r_batch(params, 1, u, "rl").values)


# ---------- inner representations ----------
def test_power_rules_agree_without_cutoff():
    mu = [0.2, 0.7, 1.0]
    base = FELParameters(a=0.7, b_kernel=1.2, c=1.5, rho=0.8, zeta=1.1, omega=0.5 + 0.5j)
    rules = ("parameter", "parameter_and_cutoff", "convolution")
    values = [y_r_batch(base.with_changes(power_rule=rule), 1, mu).values for rule in rules]
    assert np.allclose(values[0], values[1], rtol=1e-12, atol=0)
    assert np.allclose(values[0], values[2], rtol=1e-11, atol=0)


def test_convolution_power_handles_deep_powers():
    c, x, k = 0.5, 0.01, 1500
    got = kernel_power_log_coefficients(c, x, k, np.arange(4), "convolution")
    d0 = sc.gammaincc(c, x)
    d1 = sc.gammaincc(c + 1.0, x) * sc.gamma(c + 1.0) / sc.gamma(c)
    assert got[0] == pytest.approx(k * math.log(d0), rel=1e-10)
    assert got[1] == pytest.approx(math.log(k) + (k - 1) * math.log(d0) + math.log(d1), rel=1e-10)
    assert np.all(np.isfinite(got))

    # shallower powers come from the same cached table
    again = kernel_power_log_coefficients(c, x, 7, np.arange(4), "convolution")
    assert again[0] == pytest.approx(7 * math.log(d0), rel=1e-12)


def test_complete_reduction_matches_pochhammer_sum():
    a, b, c, rho, zeta, omega, mu = 0.7, 1.2, 1.5, 0.8, 1.1, 0.5 + 0.5j, 0.6
    params = FELParameters(a=a, b_kernel=b, c=c, rho=rho, zeta=zeta, omega=omega)
    z = 1j * zeta * mu**rho
    expected = 0j
    for k in range(30):
        beta = 1.0 + a + (a + b) * k - 1.0
        inner = sum(
            sc.poch(c * k, n) * z**n / (math.factorial(n) * sc.gamma(rho * n + beta))
            for n in range(50)
        )
        expected += omega**k * mu ** (a + (a + b) * k - 1.0) * inner
    got = y_r_rl(params, 1, mu, TruncationControl(rel_tol=1e-14)).value
    assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))


def test_wright_representation_matches_mittag_leffler_form():
    params = FELParameters(a=0.9, b_kernel=1.6, c=1.3, rho=1.0, zeta=0.8, omega=0.6j, x_cut=0.4)
    for mu in [0.3, 0.9]:
        fixed = y_r_rl_wright(params, 1, mu, scaled_cutoff=False).value
        assert fixed == pytest.approx(y_r_rl(params, 1, mu).value, rel=1e-10)
        scaled = y_r_rl_wright(params, 1, mu, scaled_cutoff=True).value
        ref = y_r_rl(params.with_changes(power_rule="parameter_and_cutoff"), 1, mu).value
        assert scaled == pytest.approx(ref, rel=1e-10)
    caputo = y_r_caputo_wright(params, 0, 0.7, scaled_cutoff=False).value
    assert caputo == pytest.approx(y_r_caputo(params, 0, 0.7).value, rel=1e-10)
    aleph = kernel_aleph_wright(params, 0.5, scaled_cutoff=False).value
    assert aleph == pytest.approx(kernel_aleph(params, 0.5).value, rel=1e-10)


# ---------- full solutions ----------
def test_solve_rl_homogeneous_without_coupling():
    params = FELParameters(a=0.5, b_kernel=1.0)
    (ev,) = solve_rl(params, InitialData.rl(1.0), Forcing.constant(), [0.25])
    assert ev.h == pytest.approx(INV_SQRT_PI_HALF, rel=1e-13)
    assert ev.converged and ev.err_estimate >= 0


def test_solve_rl_pure_forcing_integrates_once():
    params = FELParameters(a=1.0, b_kernel=2.0, delta_f=1.0)
    (ev,) = solve_rl(params, InitialData.rl(0.0), Forcing.constant(1.0), [0.5])
    assert ev.h == pytest.approx(0.5, rel=1e-12)


@pytest.mark.parametrize("g0, nu", [(0.05, 0.0), (0.1, 1.0), (0.2, 2.0)])
def test_solve_rl_matches_classical_fel_reference(g0, nu):
    params, init = classical_fel_parameters(g0=g0, nu=nu)
    mus = [0.25, 0.5, 1.0]
    h = _h(solve_rl(params, init, Forcing.constant(), mus))
    ref = classical_fel_reference(g0=g0, nu=nu, mu_max=1.0, intervals=2000)
    for mu, value in zip(mus, h):
        assert abs(value - ref.values[ref.index_of(mu)]) <= 1e-5


def test_solve_caputo_examples():
    params = FELParameters(a=0.75, b_kernel=1.5)
    h = _h(solve_caputo(params, InitialData.caputo(1.0), Forcing.constant(), [0.0, 0.3, 1.0]))
    assert np.allclose(h, 1.0, rtol=1e-15, atol=0)

    params = FELParameters(a=0.5, b_kernel=1.0, delta_f=1.0)
    (ev,) = solve_caputo(params, InitialData.caputo(0.0), Forcing.constant(1.0), [1.0])
    assert ev.h == pytest.approx(1.0 / math.gamma(1.5), rel=1e-10)


def test_solve_caputo_initial_conditions():
    params = FELParameters(a=1.5, b_kernel=1.0, c=1.0, rho=1.0, zeta=1.0, omega=0.3, x_cut=0.2)
    evaluations = solve_caputo(
        params, InitialData.caputo(1.0, 0.5), Forcing.constant(), [1e-3, 1e-4, 2e-4]
    )
    h1, h2, h3 = _h(evaluations)
    h0 = h2 - 1e-4 * (h1 - h2) / (1e-3 - 1e-4)
    assert abs(h0 - 1.0) <= 1e-6
    assert abs((h3 - h2) / 1e-4 - 0.5) <= 1e-4


def test_solve_dispatches_and_checks_kind():
    params = FELParameters(a=0.5, b_kernel=1.0, omega=0.2)
    init = InitialData.caputo(1.0)
    via_dispatch = _h(solve(params, init, Forcing.constant(), [0.4]))[0]
    direct = _h(solve_caputo(params, init, Forcing.constant(), [0.4]))[0]
    assert via_dispatch == pytest.approx(direct)
    with pytest.raises(InputError):
        solve_rl(params, InitialData.caputo(1.0), Forcing.constant(), [0.4])
    with pytest.raises(InputError):
        solve_caputo(params, InitialData.rl(1.0), Forcing.constant(), [0.4])
    with pytest.raises(InputError):
        solve(params, InitialData.rl(1.0, 0.0), Forcing.constant(), [0.4])


def test_sampled_forcing_must_cover_grid():
    params = FELParameters(a=1.0, b_kernel=2.0, delta_f=1.0)
    forcing = Forcing.sampled(np.linspace(0.0, 0.5, 11), np.ones(11))
    with pytest.raises(InputError):
        solve(params, InitialData.rl(0.0), forcing, [0.8])


def test_sampled_forcing_matches_builtin():
    params = FELParameters(a=0.8, b_kernel=1.5, c=1.0, zeta=0.5, omega=0.2, delta_f=0.7)
    t = np.linspace(0.0, 1.0, 2001)
    builtin = _h(solve(params, InitialData.rl(0.0), Forcing.polynomial([1.0, -0.5]), [0.5, 1.0]))
    sampled = _h(solve(params, InitialData.rl(0.0), Forcing.sampled(t, 1.0 - 0.5 * t), [0.5, 1.0]))
    assert np.allclose(sampled, builtin, rtol=1e-9, atol=1e-12)


def test_default_forcing_quadrature_matches_finer_rule():
    assert (DEFAULT_QUADRATURE.nodes_per_panel, DEFAULT_QUADRATURE.levels) == (16, 12)
    params = FELParameters(a=0.5, b_kernel=1.5, c=1.0, zeta=1.0, omega=0.3, delta_f=1.0)
    init, forcing, mu = InitialData.rl(0.0), Forcing.exp_inu(1.0, 2.0), [0.25, 1.0]
    coarse = _h(solve(params, init, forcing, mu))
    fine = _h(solve(params, init, forcing, mu, quad=QuadratureConfig(20, 24)))
    assert np.all(np.abs(coarse - fine) <= 1e-8 * np.maximum(np.abs(fine), 1.0))


def test_superposition():
    params = FELParameters(
        a=1.5, b_kernel=1.0, c=1.5, rho=1.0, zeta=0.7, omega=0.4 - 0.2j, delta_f=1.3, x_cut=0.3
    )
    mus = np.linspace(0.1, 1.0, 5)
    i1, i2 = InitialData.rl(1.0, -0.5j), InitialData.rl(0.2, 2.0)
    g1, g2 = Forcing.polynomial([1.0, 2.0]), Forcing.polynomial([0.5j, 0.0, 3.0])
    both = _h(solve(params, i1 + i2, Forcing.polynomial([1.0 + 0.5j, 2.0, 3.0]), mus))
    parts = _h(solve(params, i1, g1, mus)) + _h(solve(params, i2, g2, mus))
    assert np.allclose(both, parts, rtol=1e-9, atol=1e-12)


def test_solution_frame_columns():
    params, init = classical_fel_parameters(g0=0.1, nu=1.0)
    df = solution_frame(solve(params, init, Forcing.constant(), np.linspace(0.0, 1.0, 5)))
    assert isinstance(df, pd.DataFrame)
    assert list(df.columns) == ["mu", "re_h", "im_h", "abs_h", "err_estimate"]
    assert df.shape == (5, 5)
    assert df["re_h"].iloc[0] == 1.0
    assert (df["err_estimate"] >= 0).all()


# ---------- Laplace domain ----------
def test_kernel_laplace_symbol_examples():
    plain = kernel_laplace_symbol(FELParameters(a=1.0, b_kernel=2.0), 2.0)
    assert plain.value == pytest.approx(0.25)
    sym = kernel_laplace_symbol(FELParameters(a=1.0, b_kernel=2.0, c=2.0, zeta=1.0), 2.0)
    assert sym.value == pytest.approx(0.12 + 0.16j, rel=1e-12)
    sym = kernel_laplace_symbol(FELParameters(a=1.0, b_kernel=1.0, c=1.0, zeta=1.0), 2.0)
    assert sym.value == pytest.approx(0.4 + 0.2j, rel=1e-12)


def test_kernel_laplace_symbol_outside_disc():
    sym = kernel_laplace_symbol(FELParameters(a=1.0, b_kernel=1.0, c=1.0, zeta=3.0), 2.0)
    assert not sym.converged
    assert math.isnan(sym.value.real)


def test_h_laplace_image_examples():
    v = h_laplace_image(FELParameters(a=0.5, b_kernel=1.0), InitialData.rl(1.0), None, 2.0)
    assert v.value == pytest.approx(2.0**-0.5, rel=1e-14)

    params = FELParameters(a=1.0, b_kernel=1.0, delta_f=1.0)
    v = h_laplace_image(params, InitialData.rl(0.0), Forcing.constant().laplace, 3.0)
    assert v.value == pytest.approx(1.0 / 9.0, rel=1e-14)


@pytest.mark.parametrize(
    "b, rho, c, zeta, x",
    [(2.0, 1.0, 2.0, 1.0, 0.0), (1.5, 1.0, 1.0, 0.5, 1.0), (2.0, 0.5, 1.5, 1.0, 0.3)],
)
def test_kernel_laplace_symbol_matches_transform_of_kernel(b, rho, c, zeta, x):
    params = FELParameters(a=1.0, b_kernel=b, c=c, rho=rho, zeta=zeta, x_cut=x)

    def kernel(t):
        return t ** (b - 1.0) * prabhakar_batch(c, rho, b, x, 1j * zeta * t**rho).values

    for s in [2.0, 4.0, 8.0]:
        symbol = kernel_laplace_symbol(params, s)
        assert symbol.converged
        numeric = numerical_laplace(kernel, s).value
        assert abs(numeric - symbol.value) <= 1e-6 * abs(symbol.value)


COHERENCE_CASES = [
    classical_fel_parameters(g0=0.1, nu=1.0),
    (
        FELParameters(
            a=0.75,
            b_kernel=1.5,
            c=1.0,
            rho=1.0,
            zeta=1.0,
            omega=0.2,
            x_cut=1.0,
            power_rule="convolution",
        ),
        InitialData.caputo(1.0),
    ),
]


@pytest.mark.parametrize("params, init", COHERENCE_CASES, ids=["classical", "caputo"])
@pytest.mark.parametrize("s", [2.0, 3.0, 4.0, 6.0, 8.0])
def test_laplace_coherence_with_time_domain(params, init, s):
    def h(t):
        return _h(solve(params, init, Forcing.constant(), t))

    numeric = numerical_laplace(h, s)
    image = h_laplace_image(params, init, None, s)
    assert image.converged
    assert abs(numeric.value - image.value) <= 1e-6


# ---------- earlier models ----------
def test_classical_parameters_reproduce_kernel():
    params, init = classical_fel_parameters(g0=0.2, nu=1.5)
    t = np.linspace(0.05, 1.0, 9)
    z = 1j * params.zeta * t
    series = prabhakar_batch(params.c, 1.0, params.b_kernel, 0.0, z).values
    kernel = params.omega * t ** (params.b_kernel - 1) * series
    assert np.allclose(kernel, -1j * math.pi * 0.2 * t * np.exp(1.5j * t), rtol=1e-12)
    assert init.coefficients == (1.0,)


def test_power_exponential_parameters_reproduce_kernel():
    params, forcing = power_exponential_parameters(
        lam=0.3 - 0.4j, power=0.5, nu=2.0, forcing_amplitude=2.0
    )
    t = np.linspace(0.05, 1.0, 9)
    z = 1j * params.zeta * t
    series = prabhakar_batch(params.c, 1.0, params.b_kernel, 0.0, z).values
    kernel = params.omega * t ** (params.b_kernel - 1) * series
    assert np.allclose(kernel, (0.3 - 0.4j) * t**0.5 * np.exp(2.0j * t), rtol=1e-12)
    assert params.delta_f == 1.0
    assert np.allclose(forcing(t), 2.0 * np.exp(2.0j * t))


def test_confluent_kernel_parameters_reproduce_kernel():
    params = confluent_kernel_parameters(lam=0.5, power=1.0, beta=0.7, nu=1.2)
    for t in [0.1, 0.6, 1.0]:
        z = 1j * params.zeta * t
        series = prabhakar_batch(params.c, 1.0, params.b_kernel, 0.0, [z]).values[0]
        value = params.omega * t ** (params.b_kernel - 1) * series
        expected = 0.5 * t * complex(mpmath.hyp1f1(0.7, 2.0, z))
        assert value == pytest.approx(expected, rel=1e-12)
