# src/cli/config.py
"""
Command-line and config-file parsing for `felkit`.

Precedence: RunConfig defaults < config file (flat `key = value`) < flags.
File keys are the long flag names; hyphens and underscores are equivalent.
"""
from __future__ import annotations

import argparse
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from dotenv import dotenv_values
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    field_validator,
    model_validator,
)

from .. import __version__
from ..fel.params import POWER_RULES, FELParameters, Forcing, InitialData, PowerRule
from ..fel.sweep import COMPLEX_KEYS, SWEEPABLE
from ..special.incomplete import WrightSpec
from ..special.series import TruncationControl
from ..utils.config import get_settings
from ..utils.errors import FelkitError, InputError
from ..utils.io import load_forcing_csv

FORCING_FORMS = "exp:A:nu, const:A, poly:c0,c1,... or file:PATH"
COMMANDS = ("eval-ml", "eval-wright", "solve", "verify", "sweep")
EQUATION_COMMANDS = ("solve", "verify", "sweep")


class UsageError(InputError):
    """Invalid or conflicting command-line / config-file values (exit code 2)."""


def parse_complex(text: Any) -> complex:
    """'0.2-0.3i', '2', '-i', '1e-3+4i' -> complex; the imaginary unit may be i or j."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex value")
    if s[-1] in "iI":
        s = s[:-1] + "j"
        if s in ("j", "+j", "-j"):
            s = s.replace("j", "1j")
        elif s[-2] in "+-":
            s = s[:-1] + "1j"
    try:
        return complex(s)
    except ValueError as exc:
        raise ValueError(f"not a complex number: {text!r} (use the form re+imi)") from exc


def _split(value: Any, sep: str = ",") -> Any:
    if isinstance(value, str):
        return [p.strip() for p in value.split(sep) if p.strip()]
    return value


ComplexValue = Annotated[complex, BeforeValidator(parse_complex)]


def parse_forcing(text: str) -> Forcing:
    """
    exp:A:nu      A e^(i nu mu)
    const:A       constant A
    poly:c0,c1..  sum c_j mu^j
    file:PATH     CSV samples (t, g) or (t, re, im)
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "exp":
            amp, _, nu = rest.partition(":")
            return Forcing.exp_inu(parse_complex(amp or "1"), float(nu or 0.0))
        if kind == "const":
            return Forcing.constant(parse_complex(rest or "1"))
        if kind == "poly":
            return Forcing.polynomial([parse_complex(v) for v in _split(rest)])
        if kind == "file":
            t, g = load_forcing_csv(rest)
            return Forcing.sampled(t, g)
    except (ValueError, OSError, FelkitError) as exc:
        raise UsageError(f"bad forcing {text!r}: {exc}") from exc
    raise UsageError(f"unknown forcing {text!r}; use {FORCING_FORMS}")


def _parse_pairs(value: Any) -> Any:
    if not isinstance(value, str):
        return value
    pairs = []
    for item in _split(value):
        first, sep, second = item.partition(":")
        if not sep:
            raise ValueError(f"Wright pair {item!r} must look like a:alpha")
        pairs.append((float(first), float(second)))
    return pairs


def _parse_grid(value: Any) -> Any:
    if not isinstance(value, str):
        return value
    parts = value.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid {value!r} must look like mu_min:mu_max:points")
    return (float(parts[0]), float(parts[1]), int(parts[2]))


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    command: Literal["eval-ml", "eval-wright", "solve", "verify", "sweep"]
    config: str | None = None

    # equation
    a: float | None = None
    bkernel: float = 1.0
    c: float = 1.0
    rho: float = 1.0
    zeta: float = 0.0
    x: float = 0.0
    omega: ComplexValue = 0j
    delta: ComplexValue = 0j
    init: list[ComplexValue] | None = None
    variant: Literal["rl", "caputo"] = "rl"
    forcing: str = "const:1"
    power_rule: PowerRule = "parameter"
    grid: tuple[float, float, int] = (0.0, 1.0, 101)

    # truncation
    rel_tol: float = 1e-12
    max_terms: int = 500
    consecutive_small: int = 3

    # eval-ml / eval-wright
    alpha: float = 1.0
    beta: float = 1.0
    lam: float = 1.0
    z: list[ComplexValue] = Field(default_factory=lambda: [0j])
    kind: Literal["upper", "lower"] = "upper"
    upper: list[tuple[float, float]] = Field(default_factory=list)
    lower: list[tuple[float, float]] = Field(default_factory=list)
    upper_cutoff: float | None = None
    lower_cutoff: float | None = None

    # verify / sweep
    tol_residual: float = 1e-3
    richardson: bool = True
    sweep: list[str] = Field(default_factory=list)
    jobs: int = Field(default_factory=lambda: get_settings().jobs)

    # output
    format: Literal["csv", "json"] = "csv"
    output: str | None = None
    strict: bool = False
    log: str | None = None
    verbose: bool = False

    _forcing: Forcing | None = PrivateAttr(default=None)

    @field_validator("init", "z", mode="before")
    @classmethod
    def split_value_lists(cls, v: Any) -> Any:
        return _split(v)

    @field_validator("sweep", mode="before")
    @classmethod
    def split_sweeps(cls, v: Any) -> Any:
        return _split(v, ";")

    @field_validator("upper", "lower", mode="before")
    @classmethod
    def parse_pairs(cls, v: Any) -> Any:
        return _parse_pairs(v)

    @field_validator("grid", mode="before")
    @classmethod
    def parse_grid(cls, v: Any) -> Any:
        return _parse_grid(v)

    @field_validator("forcing")
    @classmethod
    def check_forcing_spec(cls, v: str) -> str:
        kind = v.partition(":")[0].strip().lower()
        if kind not in ("exp", "const", "poly", "file"):
            raise ValueError(f"unknown forcing {v!r}; use {FORCING_FORMS}")
        return v

    @model_validator(mode="after")
    def check_command(self) -> RunConfig:
        self.control()
        if self.command in EQUATION_COMMANDS:
            if self.a is None:
                raise ValueError(f"--a is required for {self.command}")
            if not self.init:
                raise ValueError(f"--init is required for {self.command}")
            params = self.fel_parameters()
            if len(self.init) != params.n:
                raise ValueError(f"--init needs ceil(a) = {params.n} values, got {len(self.init)}")
            mu_min, mu_max, points = self.grid
            if points < 2 or not (0 <= mu_min <= mu_max) or not math.isfinite(mu_max):
                raise ValueError(
                    f"--grid {self.grid} must satisfy 0 <= mu_min <= mu_max and points >= 2"
                )
            self._forcing = parse_forcing(self.forcing)
        if self.command == "verify":
            mu_min, _, points = self.grid
            intervals = points - 1
            if mu_min != 0 or intervals < 32 or (self.richardson and intervals % 2):
                raise ValueError(
                    "verify needs --grid 0:mu_max:points with >= 32 intervals, "
                    "an even number unless --no-richardson"
                )
        if self.command == "sweep":
            if not self.sweep:
                raise ValueError("sweep needs at least one --sweep key=v1,v2,...")
            self.sweep_axes()
        if self.command == "eval-ml" and not (self.alpha > 0 and self.beta > 0 and self.lam > 0):
            raise ValueError("eval-ml needs --alpha, --beta, --lam > 0")
        if self.command == "eval-wright":
            self.wright_spec()
        if self.jobs == 0:
            raise ValueError("--jobs must be nonzero")
        return self

    # ---------- domain objects ----------
    def fel_parameters(self) -> FELParameters:
        assert self.a is not None
        return FELParameters(
            a=self.a,
            b_kernel=self.bkernel,
            c=self.c,
            rho=self.rho,
            zeta=self.zeta,
            omega=self.omega,
            delta_f=self.delta,
            x_cut=self.x,
            power_rule=self.power_rule,
        )

    def initial_data(self) -> InitialData:
        return InitialData(self.variant, tuple(self.init or ()))

    def forcing_function(self) -> Forcing:
        if self._forcing is None:
            self._forcing = parse_forcing(self.forcing)
        return self._forcing

    def control(self) -> TruncationControl:
        return TruncationControl.from_dict(
            self.model_dump(include={"rel_tol", "max_terms", "consecutive_small"})
        )

    def mu_grid(self) -> np.ndarray:
        mu_min, mu_max, points = self.grid
        return np.linspace(mu_min, mu_max, points)

    def wright_spec(self) -> WrightSpec:
        return WrightSpec(
            upper_pairs=tuple(self.upper),
            lower_pairs=tuple(self.lower),
            upper_cutoff=self.upper_cutoff,
            lower_cutoff=self.lower_cutoff,
            variant=self.kind,
        )

    def sweep_axes(self) -> dict[str, list[Any]]:
        axes: dict[str, list[Any]] = {}
        for entry in self.sweep:
            key, sep, values = entry.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in SWEEPABLE:
                keys = ", ".join(SWEEPABLE)
                raise ValueError(f"bad sweep {entry!r}; use key=v1,v2 with key in {keys}")
            parse = parse_complex if key in COMPLEX_KEYS else float
            axes[key] = [parse(v) for v in _split(values)]
            if not axes[key]:
                raise ValueError(f"sweep {key!r} has no values")
        return axes


# ---------- argparse ----------
def _default(name: str) -> str:
    field = RunConfig.model_fields[name]
    if field.default_factory is not None:
        value = field.default_factory()
    else:
        value = field.default
    return f"default: {value}"


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--format", choices=["csv", "json"], help=_default("format"))
    p.add_argument("--output", help="output path, '-' for stdout (default: stdout)")
    p.add_argument("--log", help="append log lines to this file")
    p.add_argument("--verbose", action="store_true", help="INFO-level logging")
    p.add_argument("--strict", action="store_true", help="exit 3 when any series fails to converge")
    p.add_argument("--rel-tol", type=float, help=_default("rel_tol"))
    p.add_argument("--max-terms", type=int, help=_default("max_terms"))
    p.add_argument("--consecutive-small", type=int, help=_default("consecutive_small"))


def _add_equation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=float, help="fractional order a > 0 (required)")
    p.add_argument("--bkernel", type=float, help=f"kernel exponent b > 0, {_default('bkernel')}")
    p.add_argument("--c", type=float, help=f"incomplete parameter c >= 0, {_default('c')}")
    p.add_argument("--rho", type=float, help=_default("rho"))
    p.add_argument("--zeta", type=float, help=_default("zeta"))
    p.add_argument("--x", type=float, help=f"incomplete cutoff x >= 0, {_default('x')}")
    p.add_argument("--omega", help="coupling, e.g. 0.2-0.3i (default: 0)")
    p.add_argument("--delta", help="forcing weight (default: 0)")
    p.add_argument(
        "--init", help="comma-separated initial values (b_1..b_n or a_0..a_{n-1}; required)"
    )
    p.add_argument("--variant", choices=["rl", "caputo"], help=_default("variant"))
    p.add_argument("--forcing", help=f"{FORCING_FORMS}, {_default('forcing')}")
    p.add_argument("--power-rule", choices=list(POWER_RULES), help=_default("power_rule"))
    p.add_argument("--grid", help="mu_min:mu_max:points (default: 0:1:101)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="felkit",
        description=(
            "Incomplete special functions and series solutions of the generalized FEL equation."
        ),
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--version", action="version", version=f"felkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    quiet = argparse.SUPPRESS
    ml = sub.add_parser(
        "eval-ml", help="incomplete Mittag-Leffler function", argument_default=quiet
    )
    _add_common(ml)
    ml.add_argument("--alpha", type=float, help=_default("alpha"))
    ml.add_argument("--beta", type=float, help=_default("beta"))
    ml.add_argument("--lam", type=float, help=f"Pochhammer parameter, {_default('lam')}")
    ml.add_argument("--x", type=float, help=_default("x"))
    ml.add_argument("--z", help="comma-separated arguments (default: 0)")
    ml.add_argument("--kind", choices=["upper", "lower"], help=_default("kind"))

    wr = sub.add_parser("eval-wright", help="incomplete Wright function", argument_default=quiet)
    _add_common(wr)
    wr.add_argument("--upper", help="numerator pairs a1:alpha1,a2:alpha2,... (required)")
    wr.add_argument("--lower", help="denominator pairs b1:beta1,...")
    wr.add_argument("--upper-cutoff", type=float, help="cutoff of the first numerator gamma")
    wr.add_argument("--lower-cutoff", type=float, help="cutoff of the first denominator gamma")
    wr.add_argument("--kind", choices=["upper", "lower"], help=_default("kind"))
    wr.add_argument("--z", help="comma-separated arguments (default: 0)")

    for name, text in (
        ("solve", "series solution on a mu grid"),
        ("verify", "solve, then check the equation residual"),
        ("sweep", "solve over a cartesian parameter grid"),
    ):
        p = sub.add_parser(name, help=text, argument_default=quiet)
        _add_common(p)
        _add_equation(p)
        if name == "verify":
            p.add_argument("--tol-residual", type=float, help=_default("tol_residual"))
            p.add_argument(
                "--no-richardson",
                dest="richardson",
                action="store_false",
                help="raw first-order residual",
            )
        if name == "sweep":
            keys = ", ".join(SWEEPABLE)
            p.add_argument(
                "--sweep", action="append", help=f"key=v1,v2,... (repeatable); keys: {keys}"
            )
            p.add_argument("--jobs", type=int, help="parallel workers (default: FELKIT_JOBS or 1)")
    return parser


def _normalize(key: str) -> str:
    return key.strip().lstrip("-").replace("-", "_")


def read_config_file(path: str | Path) -> dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"config file not found: {p}")
    return {_normalize(k): v for k, v in dotenv_values(p).items() if v is not None}


def _describe(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        msg = str(e["msg"]).removeprefix("Value error, ")
        loc = ".".join(str(p) for p in e["loc"])
        if e["type"] == "extra_forbidden":
            parts.append(f"unknown key '{loc}'")
        elif loc:
            parts.append(f"--{loc.split('.')[0].replace('_', '-')}: {msg}")
        else:
            parts.append(msg)
    return "; ".join(parts)


def parse_config(
    argv: Sequence[str] | None = None,
    config_file: str | Path | None = None,
    parser: argparse.ArgumentParser | None = None,
) -> RunConfig:
    """Merge defaults, the config file and the flags into a validated RunConfig."""
    parser = parser or build_parser()
    flags = vars(parser.parse_args(argv))
    command = flags.pop("command")
    path = flags.get("config", config_file)
    values: dict[str, Any] = read_config_file(path) if path else {}
    values.pop("command", None)
    values.update(flags)
    if path:
        values["config"] = str(path)
    try:
        return RunConfig.model_validate({"command": command, **values})
    except ValidationError as exc:
        raise UsageError(_describe(exc)) from exc
