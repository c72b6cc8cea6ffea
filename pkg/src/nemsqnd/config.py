"""Flat key-value run configuration shared by every CLI subcommand.

Format: UTF-8 text, one ``key = value`` per line, ``#`` starts a
comment, blank lines ignored.  Unknown and duplicate keys are rejected.
Units are SI at this boundary (henry, farad, meter, kilogram, rad/s);
every frequency key, including the mechanical ``nu``, is angular.

The defaults describe a desk-scale device: two matched 6e9 rad/s
resonators whose coupling capacitor is ten times their own capacitance,
a 10 nm gap, and a mechanical mass tuned so the zero-point spread is
1e-3 of the gap (making the phonon-conditioned coupling a millionth of
the bare one).  The drive keeps the steady amplitude of resonator 2 at
5 and its decay a hundred times the exchange rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

from .circuit import (
    EPS0,
    HBAR,
    EffectiveParams,
    PhysicalCircuitParams,
    effective_params,
)
from .entanglement import ALPHA_CAP, TERM_CAP, CoherentTriple
from .errors import ConfigError
from .readout import ReadoutParams


def _desk_defaults() -> dict[str, float]:
    d = 1e-8
    area = 1e-10
    nu = 2.0 * math.pi * 1e9
    c_eq = EPS0 * area / d
    c1 = c_eq / 10.0
    omega = 6e9
    l1 = 1.0 / (omega**2 * c1)
    m = HBAR / (d**2 * nu * 1e-6)  # pins |theta/theta0| to 1e-6
    omega_tilde = math.sqrt(omega**2 + 0.5 / (c_eq * l1))
    c_tilde1 = 1.0 / (1.0 / c1 + 0.5 / c_eq)
    theta0 = omega_tilde * c_tilde1 / (4.0 * c_eq)
    kappa2 = 100.0 * theta0
    return {
        "L1": l1, "L2": l1, "C1": c1, "C2": c1,
        "d": d, "A": area, "m": m, "nu": nu,
        "kappa1": 1e7, "kappa2": kappa2, "F_im": 2.5 * kappa2,
    }


_DESK = _desk_defaults()


def _bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


#: key -> (caster, default)
KEYS: dict[str, tuple] = {
    # circuit, SI units
    "L1": (float, _DESK["L1"]),
    "L2": (float, _DESK["L2"]),
    "C1": (float, _DESK["C1"]),
    "C2": (float, _DESK["C2"]),
    "d": (float, _DESK["d"]),
    "A": (float, _DESK["A"]),
    "m": (float, _DESK["m"]),
    "nu": (float, _DESK["nu"]),
    "n_b": (float, 0.0),
    # readout drive and decay rates (rad/s); F as a re/im pair
    "kappa1": (float, _DESK["kappa1"]),
    "kappa2": (float, _DESK["kappa2"]),
    "F_re": (float, 0.0),
    "F_im": (float, _DESK["F_im"]),
    # coherent amplitudes as re/im pairs
    "alpha_re": (float, 2.0),
    "alpha_im": (float, 0.0),
    "beta_re": (float, 2.0),
    "beta_im": (float, 0.0),
    "gamma_re": (float, 2.0),
    "gamma_im": (float, 0.0),
    "n_terms": (int, 30),
    # output grids
    "entropy_points": (int, 201),
    "theta_t_max": (float, 2.0 * math.pi),
    "alpha_max": (float, 3.0),
    "alpha_points": (int, 21),
    "current_points": (int, 200),
    "current_tau_max": (float, 10.0),
    # classical validation run
    "classical_toy": (_bool, True),
    "classical_x0_over_d": (float, math.sqrt(2.0) * 1e-3),
    "classical_nu_factor": (float, 20.0),
    "classical_periods": (int, 250),
    "classical_samples": (int, 8192),
    "classical_rtol": (float, 1e-10),
    # brute-force oracle sizing
    "oracle_dim": (int, 30),
    # tolerances (every one strictly positive)
    "tol_current_ode": (float, 1e-8),
    "tol_elimination": (float, 1e-2),
    "tol_entropy_oracle": (float, 1e-6),
    "tol_cat_fidelity": (float, 1e-10),
    "tol_separability": (float, 1e-8),
    "tol_classical_peak": (float, 2e-2),
    "resonance_rtol": (float, 1e-9),
    # verification knob: scales theta on the analytic side of the
    # oracle comparison; anything but 1.0 must make `verify` fail
    "verify_theta_scale": (float, 1.0),
}

_POSITIVE = {
    "L1", "L2", "C1", "C2", "d", "A", "m", "nu", "kappa1", "kappa2",
    "theta_t_max", "current_tau_max", "classical_x0_over_d",
    "classical_nu_factor", "classical_rtol", "verify_theta_scale",
    "tol_current_ode", "tol_elimination", "tol_entropy_oracle",
    "tol_cat_fidelity", "tol_separability", "tol_classical_peak",
    "resonance_rtol",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated configuration; one field per config key."""

    L1: float
    L2: float
    C1: float
    C2: float
    d: float
    A: float
    m: float
    nu: float
    n_b: float
    kappa1: float
    kappa2: float
    F_re: float
    F_im: float
    alpha_re: float
    alpha_im: float
    beta_re: float
    beta_im: float
    gamma_re: float
    gamma_im: float
    n_terms: int
    entropy_points: int
    theta_t_max: float
    alpha_max: float
    alpha_points: int
    current_points: int
    current_tau_max: float
    classical_toy: bool
    classical_x0_over_d: float
    classical_nu_factor: float
    classical_periods: int
    classical_samples: int
    classical_rtol: float
    oracle_dim: int
    tol_current_ode: float
    tol_elimination: float
    tol_entropy_oracle: float
    tol_cat_fidelity: float
    tol_separability: float
    tol_classical_peak: float
    resonance_rtol: float
    verify_theta_scale: float

    def __post_init__(self):
        for name in _POSITIVE:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.n_b < 0:
            raise ConfigError("n_b must be nonnegative")
        if not 1 <= self.n_terms <= TERM_CAP:
            raise ConfigError(f"n_terms must be in [1, {TERM_CAP}]")
        if self.entropy_points < 2 or self.alpha_points < 2:
            raise ConfigError("entropy_points and alpha_points must be >= 2")
        if self.current_points < 2:
            raise ConfigError("current_points must be >= 2")
        if not 0 <= self.alpha_max <= ALPHA_CAP:
            raise ConfigError(f"alpha_max must be in [0, {ALPHA_CAP}]")
        if self.classical_periods < 1:
            raise ConfigError("classical_periods must be >= 1")
        if self.classical_samples < 1024:
            raise ConfigError("classical_samples must be >= 1024 for the spectral fit")
        if self.classical_x0_over_d >= 1.0:
            raise ConfigError("classical_x0_over_d must stay below 1 (gap contact)")
        if self.oracle_dim < 2:
            raise ConfigError("oracle_dim must be >= 2")

    # -- assembled domain objects ------------------------------------

    def physical(self) -> PhysicalCircuitParams:
        return PhysicalCircuitParams(
            L1=self.L1, L2=self.L2, C1=self.C1, C2=self.C2,
            d=self.d, A=self.A, m=self.m, nu=self.nu,
        )

    def effective(self) -> EffectiveParams:
        return effective_params(
            self.physical(), n_b=self.n_b, resonance_rtol=self.resonance_rtol
        )

    def readout(self, strict: bool = False) -> ReadoutParams:
        eff = self.effective()
        return ReadoutParams(
            F=complex(self.F_re, self.F_im),
            kappa1=self.kappa1, kappa2=self.kappa2,
            theta0=eff.theta0, theta=eff.theta,
            omega_tilde=eff.omega_tilde1, L=self.L1, strict=strict,
        )

    def triple(
        self,
        alpha: complex | None = None,
        beta: complex | None = None,
        gamma: complex | None = None,
    ) -> CoherentTriple:
        """Coherent amplitudes from the config, with optional overrides."""
        return CoherentTriple(
            alpha=complex(self.alpha_re, self.alpha_im) if alpha is None else alpha,
            beta=complex(self.beta_re, self.beta_im) if beta is None else beta,
            gamma=complex(self.gamma_re, self.gamma_im) if gamma is None else gamma,
        )


def parse_config_text(text: str) -> RunConfig:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        caster = KEYS[key][0]
        try:
            values[key] = caster(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    merged = {name: default for name, (_, default) in KEYS.items()}
    merged.update(values)
    return RunConfig(**merged)


def load_config(path: str | Path | None) -> RunConfig:
    """Read a config file; with ``path=None`` return pure defaults."""
    if path is None:
        return parse_config_text("")
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid UTF-8: {exc}") from None
    return parse_config_text(text)


def default_config_text() -> str:
    """The effective defaults, serialized in config-file syntax."""
    lines = []
    for name, (_, default) in KEYS.items():
        if isinstance(default, bool):
            rendered = "true" if default else "false"
        elif isinstance(default, int):
            rendered = str(default)
        else:
            rendered = repr(float(default))
        lines.append(f"{name} = {rendered}")
    return "\n".join(lines) + "\n"


# keep the dataclass and the key table in lockstep
assert {f.name for f in fields(RunConfig)} == set(KEYS), "RunConfig fields must match KEYS"
