# src/fel/params.py
"""
Inputs of the generalized FEL equation

    D^a h(mu) = omega * int_0^mu t^(b-1) E^{[c; x]}_{rho, b}(i zeta t^rho) h(mu - t) dt
                + delta_f * g(mu),

with D^a either Riemann-Liouville ("rl") or Caputo ("caputo").
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Literal

import numpy as np
from scipy import special as sc

from ..utils.errors import InputError, require

PowerRule = Literal["parameter", "parameter_and_cutoff", "convolution"]
InitKind = Literal["rl", "caputo"]
ForcingKind = Literal["exp_inu", "constant", "polynomial", "sampled"]

POWER_RULES: tuple[str, ...] = ("parameter", "parameter_and_cutoff", "convolution")


def _finite_complex(value: Any, name: str) -> complex:
    z = complex(value)
    finite = math.isfinite(z.real) and math.isfinite(z.imag)
    require(finite, f"{name} must be finite, got {value!r}")
    return z


@dataclass(frozen=True)
class FELParameters:
    a: float
    b_kernel: float
    c: float = 1.0
    rho: float = 1.0
    zeta: float = 0.0
    omega: complex = 0j
    delta_f: complex = 0j
    x_cut: float = 0.0
    # how the k-th power of the kernel symbol expands (see symbols.py)
    power_rule: PowerRule = "parameter"

    def __post_init__(self) -> None:
        for name in ("a", "b_kernel", "c", "rho", "zeta", "x_cut"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "omega", _finite_complex(self.omega, "omega"))
        object.__setattr__(self, "delta_f", _finite_complex(self.delta_f, "delta_f"))
        require(math.isfinite(self.a) and self.a > 0, f"a must be > 0, got {self.a!r}")
        require(
            math.isfinite(self.b_kernel) and self.b_kernel > 0,
            f"b_kernel must be > 0, got {self.b_kernel!r}",
        )
        require(math.isfinite(self.c) and self.c >= 0, f"c must be >= 0, got {self.c!r}")
        require(math.isfinite(self.rho) and self.rho > 0, f"rho must be > 0, got {self.rho!r}")
        require(math.isfinite(self.zeta), f"zeta must be finite, got {self.zeta!r}")
        require(
            math.isfinite(self.x_cut) and self.x_cut >= 0, f"x_cut must be >= 0, got {self.x_cut!r}"
        )
        require(self.power_rule in POWER_RULES, f"unknown power rule {self.power_rule!r}")

    @property
    def n(self) -> int:
        """Number of initial conditions, ceil(a)."""
        return math.ceil(self.a)

    def with_changes(self, **changes: Any) -> FELParameters:
        return replace(self, **changes)


@dataclass(frozen=True)
class InitialData:
    """
    RL data b_1..b_n, b_r = lim D^(a-r) h at 0+, or Caputo data a_0..a_{n-1},
    a_r = h^(r)(0).
    """

    kind: InitKind
    coefficients: tuple[complex, ...]

    def __post_init__(self) -> None:
        require(
            self.kind in ("rl", "caputo"), f"unknown initial-data kind {self.kind!r}", InputError
        )
        coeffs = tuple(_finite_complex(v, "initial value") for v in self.coefficients)
        require(len(coeffs) >= 1, "at least one initial value is required", InputError)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def rl(cls, *values: complex) -> InitialData:
        return cls("rl", tuple(values))

    @classmethod
    def caputo(cls, *values: complex) -> InitialData:
        return cls("caputo", tuple(values))

    @property
    def orders(self) -> range:
        n = len(self.coefficients)
        return range(1, n + 1) if self.kind == "rl" else range(0, n)

    def items(self) -> list[tuple[int, complex]]:
        return list(zip(self.orders, self.coefficients))

    def check_against(self, params: FELParameters) -> None:
        require(
            len(self.coefficients) == params.n,
            f"{self.kind} data needs ceil(a) = {params.n} values, got {len(self.coefficients)}",
            InputError,
        )

    def __add__(self, other: InitialData) -> InitialData:
        require(
            self.kind == other.kind and len(self.coefficients) == len(other.coefficients),
            "initial data of different kind or length cannot be added",
            InputError,
        )
        summed = tuple(p + q for p, q in zip(self.coefficients, other.coefficients))
        return InitialData(self.kind, summed)


@dataclass(frozen=True, eq=False)
class Forcing:
    """Forcing g(mu): built-in closed forms or samples on an increasing grid."""

    kind: ForcingKind
    amplitude: complex = 1.0
    nu: float = 0.0
    coefficients: tuple[complex, ...] = ()
    t: np.ndarray | None = field(default=None, repr=False)
    g: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def exp_inu(cls, amplitude: complex = 1.0, nu: float = 0.0) -> Forcing:
        return cls("exp_inu", amplitude=complex(amplitude), nu=float(nu))

    @classmethod
    def constant(cls, amplitude: complex = 1.0) -> Forcing:
        return cls("constant", amplitude=complex(amplitude))

    @classmethod
    def polynomial(cls, coefficients: tuple[complex, ...] | list[complex]) -> Forcing:
        coeffs = tuple(complex(v) for v in coefficients)
        require(len(coeffs) >= 1, "polynomial forcing needs at least one coefficient", InputError)
        return cls("polynomial", coefficients=coeffs)

    @classmethod
    def sampled(cls, t: np.ndarray, g: np.ndarray) -> Forcing:
        t_arr = np.asarray(t, dtype=float)
        g_arr = np.asarray(g, dtype=complex)
        same_shape = t_arr.ndim == 1 and t_arr.shape == g_arr.shape
        require(same_shape, "forcing samples: t and g differ in shape", InputError)
        require(t_arr.size >= 2, "forcing samples: need at least two points", InputError)
        increasing = bool(np.all(np.diff(t_arr) > 0))
        require(increasing, "forcing samples: t must be strictly increasing", InputError)
        require(bool(np.all(np.isfinite(g_arr))), "forcing samples: non-finite value", InputError)
        return cls("sampled", t=t_arr, g=g_arr)

    def __call__(self, t: np.ndarray | float) -> np.ndarray:
        tt = np.asarray(t, dtype=float)
        if self.kind == "exp_inu":
            return self.amplitude * np.exp(1j * self.nu * tt)
        if self.kind == "constant":
            return np.full(tt.shape, self.amplitude, dtype=complex)
        if self.kind == "polynomial":
            coeffs = np.asarray(self.coefficients, dtype=complex)
            return np.polynomial.polynomial.polyval(tt, coeffs)
        assert self.t is not None and self.g is not None
        return np.interp(tt, self.t, self.g.real) + 1j * np.interp(tt, self.t, self.g.imag)

    def check_covers(self, mu_max: float) -> None:
        if self.kind != "sampled":
            return
        assert self.t is not None
        require(
            self.t[0] <= 0.0 and self.t[-1] >= mu_max,
            f"forcing samples cover [{self.t[0]:g}, {self.t[-1]:g}], need [0, {mu_max:g}]",
            InputError,
        )

    def laplace(self, s: complex) -> complex:
        """Closed-form Laplace image G(s)."""
        require(
            self.kind != "sampled", "sampled forcing has no closed-form Laplace image", InputError
        )
        s = complex(s)
        if self.kind == "exp_inu":
            return self.amplitude / (s - 1j * self.nu)
        if self.kind == "constant":
            return self.amplitude / s
        return sum(cj * math.factorial(j) / s ** (j + 1) for j, cj in enumerate(self.coefficients))


@dataclass(frozen=True)
class SolutionEvaluation:
    mu: float
    h: complex
    err_estimate: float
    outer_terms_used: int
    converged: bool = True

    def as_row(self) -> dict[str, float]:
        return {
            "mu": self.mu,
            "re_h": self.h.real,
            "im_h": self.h.imag,
            "abs_h": abs(self.h),
            "err_estimate": self.err_estimate,
        }


# ---------- earlier models as special cases ----------
def classical_fel_parameters(g0: float, nu: float) -> tuple[FELParameters, InitialData]:
    """h' = -i pi g0 int_0^mu psi e^(i nu psi) h(mu - psi) dpsi with h(0) = 1."""
    params = FELParameters(a=1.0, b_kernel=2.0, c=2.0, rho=1.0, zeta=nu, omega=-1j * math.pi * g0)
    return params, InitialData.rl(1.0)


def power_exponential_parameters(
    lam: complex, power: float, nu: float, a: float = 1.0, forcing_amplitude: complex = 0j
) -> tuple[FELParameters, Forcing]:
    """
    D^a h = lam int_0^mu psi^power e^(i nu psi) h(mu - psi) dpsi + A e^(i nu mu).

    psi^power e^(i nu psi) = Gamma(power + 1) psi^power E^{power+1}_{1, power+1}(i nu psi).
    """
    require(power > -1, f"kernel power must be > -1, got {power!r}")
    params = FELParameters(
        a=a,
        b_kernel=power + 1.0,
        c=power + 1.0,
        rho=1.0,
        zeta=nu,
        omega=complex(lam) * float(sc.gamma(power + 1.0)),
        delta_f=1.0 if forcing_amplitude != 0 else 0.0,
    )
    return params, Forcing.exp_inu(forcing_amplitude if forcing_amplitude != 0 else 1.0, nu)


def confluent_kernel_parameters(
    lam: complex, power: float, beta: float, nu: float, a: float = 1.0
) -> FELParameters:
    """
    Kernel lam psi^power 1F1(beta; power + 1; i nu psi), using
    1F1(beta; gamma; z) = Gamma(gamma) E^beta_{1, gamma}(z).
    """
    require(power > -1, f"kernel power must be > -1, got {power!r}")
    require(beta >= 0, f"confluent parameter must be >= 0, got {beta!r}")
    return FELParameters(
        a=a,
        b_kernel=power + 1.0,
        c=beta,
        rho=1.0,
        zeta=nu,
        omega=complex(lam) * float(sc.gamma(power + 1.0)),
    )
