"""Problem definition and unit handling for the 1D photon-gas cooling model.

The waveguide supports harmonically spaced modes omega_k = k*Delta (k = 1..k_max)
coupled to an Ohmic support bath at temperature T and, pairwise (k, k+1), to a
lossy "waste" mode at omega_w through a three-wave process.  Everything internal
is dimensionless:

* energies in units of hbar*Delta, so x = hbar*Delta/(k_B*T) is the inverse
  support temperature and mode k has energy k;
* rates in units of g**2/Gamma, so the engineered exchange rate on link k is
  kappa_k = 1/(k*(k+1)) and the bare loss rate is gamma_k = G*k with
  G = gamma*Gamma/g**2 (gamma = Delta/Q).

Frequencies given in MHz on the physical side are ordinary frequencies and are
multiplied by 2*pi on entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - runtime floor is 3.10
    import tomli as tomllib

# CODATA 2018 (exact by SI definition)
HBAR = 1.054571817e-34  # J s
KB = 1.380649e-23  # J / K

#: switch to the Laurent series below this argument to avoid cancellation
_SERIES_CUTOFF = 1e-8

#: default cutoff rule: smallest k with x*k > 40, hard cap
K_MAX_CAP = 20_000


def bose_einstein(a):
    """Bose-Einstein occupation 1/(exp(a) - 1) for a > 0.

    Scalar or array.  For a < 1e-8 the direct formula loses all significant
    digits, so the Laurent series 1/a - 1/2 + a/12 is used instead (the next
    term, -a**3/720, is below double precision there).
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0.0):
        raise ValueError("bose_einstein requires a > 0")
    small = a < _SERIES_CUTOFF
    with np.errstate(over="ignore"):
        direct = 1.0 / np.expm1(np.where(small, 1.0, a))
    series = 1.0 / np.where(small, a, 1.0) - 0.5 + a / 12.0
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PhysicalInputs:
    """Laboratory-frame description of a run (the config-file schema)."""

    support_temperature_mk: float
    waste_temperature_mk: float
    mode_spacing_mhz: float
    omega_w_over_delta: float
    quality_factor: float
    coupling_g_mhz: float
    waste_decay_mhz: float
    k_max: int | None = None
    big_g: float | None = None  # explicit override of the derived gamma*Gamma/g**2

    def __post_init__(self):
        for name in ("support_temperature_mk", "waste_temperature_mk",
                     "mode_spacing_mhz", "omega_w_over_delta",
                     "quality_factor", "coupling_g_mhz", "waste_decay_mhz"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        if self.k_max is not None and self.k_max < 2:
            raise ValueError("k_max must be at least 2")
        if self.big_g is not None and self.big_g < 0.0:
            raise ValueError("big_g must be nonnegative")


@dataclass(frozen=True)
class ModelSpec:
    """Dimensionless model parameters.

    x      : hbar*Delta / (k_B*T), inverse support temperature
    theta  : T_w / T, waste temperature ratio
    r      : omega_w / Delta, waste frequency in mode-spacing units
    big_g  : gamma*Gamma / g**2, thermalization-to-cooling rate ratio
    k_max  : number of retained modes
    """

    x: float
    theta: float
    r: float
    big_g: float
    k_max: int

    def __post_init__(self):
        if not self.x > 0.0:
            raise ValueError("x must be positive")
        if not self.theta > 0.0:
            raise ValueError("theta must be positive")
        if not self.r > 0.0:
            raise ValueError("r must be positive")
        if self.big_g < 0.0:
            raise ValueError("big_g must be nonnegative")
        if self.k_max < 2:
            raise ValueError("k_max must be at least 2")

    @property
    def x_waste(self) -> float:
        """hbar*omega_w/(k_B*T_w), exponent of the waste occupation."""
        return self.x * self.r / self.theta

    @property
    def t_low_over_t(self) -> float:
        """Target temperature ratio T_low/T = theta/r of the engineered bath."""
        return self.theta / self.r

    def with_k_max(self, k_max: int) -> "ModelSpec":
        return replace(self, k_max=k_max)


def default_k_max(x: float) -> int:
    """Smallest k with x*k > 40 (occupation ~ 4e-18 at the edge), capped."""
    if not x > 0.0:
        raise ValueError("x must be positive")
    return min(K_MAX_CAP, int(np.floor(40.0 / x)) + 1)


def dimensionless_from_physical(inputs: PhysicalInputs) -> ModelSpec:
    """Reduce laboratory parameters to the internal dimensionless set."""
    delta = 2.0 * np.pi * inputs.mode_spacing_mhz * 1e6  # rad/s
    temp = inputs.support_temperature_mk * 1e-3  # K
    x = HBAR * delta / (KB * temp)
    theta = inputs.waste_temperature_mk / inputs.support_temperature_mk
    if inputs.big_g is not None:
        big_g = inputs.big_g
    else:
        gamma = delta / inputs.quality_factor
        big_gamma = 2.0 * np.pi * inputs.waste_decay_mhz * 1e6
        g = 2.0 * np.pi * inputs.coupling_g_mhz * 1e6
        big_g = gamma * big_gamma / g**2
    k_max = inputs.k_max if inputs.k_max is not None else default_k_max(x)
    return ModelSpec(x=x, theta=theta, r=inputs.omega_w_over_delta,
                     big_g=big_g, k_max=k_max)


def physical_from_dimensionless(spec: ModelSpec, *, support_temperature_mk: float,
                                coupling_g_mhz: float,
                                waste_decay_mhz: float) -> PhysicalInputs:
    """Re-anchor a dimensionless spec to SI, inverting dimensionless_from_physical.

    The reduction collapses (Q, g, Gamma) into G, so the coupling and waste
    linewidth must be re-supplied; Q is reconstructed from G.
    """
    temp = support_temperature_mk * 1e-3
    delta = spec.x * KB * temp / HBAR  # rad/s
    g = 2.0 * np.pi * coupling_g_mhz * 1e6
    big_gamma = 2.0 * np.pi * waste_decay_mhz * 1e6
    if spec.big_g <= 0.0:
        raise ValueError("cannot reconstruct a quality factor for big_g = 0")
    quality = delta * big_gamma / (spec.big_g * g**2)
    return PhysicalInputs(
        support_temperature_mk=support_temperature_mk,
        waste_temperature_mk=spec.theta * support_temperature_mk,
        mode_spacing_mhz=delta / (2.0 * np.pi * 1e6),
        omega_w_over_delta=spec.r,
        quality_factor=quality,
        coupling_g_mhz=coupling_g_mhz,
        waste_decay_mhz=waste_decay_mhz,
        k_max=spec.k_max,
    )


def mode_numbers(spec: ModelSpec) -> np.ndarray:
    return np.arange(1, spec.k_max + 1, dtype=float)


def thermal_occupations(spec: ModelSpec) -> np.ndarray:
    """Support-bath Bose-Einstein occupations n_k^th, k = 1..k_max."""
    return bose_einstein(spec.x * mode_numbers(spec))


def waste_occupation(spec: ModelSpec) -> float:
    """Thermal occupation of the waste mode at its own frequency/temperature."""
    return float(bose_einstein(spec.x_waste))


def thermal_number(spec: ModelSpec, *, extended: bool = False) -> float:
    """Total thermal photon number sum_k n_k^th."""
    if extended:
        return _extended_sum(spec.x, spec.k_max, weight_power=0)
    return float(np.sum(thermal_occupations(spec)))


def thermal_energy(spec: ModelSpec, *, extended: bool = False) -> float:
    """Total thermal energy sum_k k*n_k^th in units of hbar*Delta.

    With extended=True the sum is evaluated with mpmath (50 significant
    digits) and rounded once at the end; useful for x < 0.01 where millions
    of near-equal terms accumulate.
    """
    if extended:
        return _extended_sum(spec.x, spec.k_max, weight_power=1)
    k = mode_numbers(spec)
    return float(np.sum(k * bose_einstein(spec.x * k)))


def _extended_sum(x: float, k_max: int, *, weight_power: int) -> float:
    import mpmath as mp

    with mp.workdps(50):
        xm = mp.mpf(x)
        total = mp.fsum(mp.mpf(k)**weight_power / mp.expm1(xm * k)
                        for k in range(1, k_max + 1))
        return float(total)


@dataclass(frozen=True)
class RateSchedule:
    """Dimensionless rates of the kinetic equations for a given spec.

    kappa[k-1] = 1/(k*(k+1)) for links k = 1..k_max-1 (units g**2/Gamma)
    gamma[k-1] = G*k        for modes k = 1..k_max
    """

    kappa: np.ndarray
    gamma: np.ndarray
    n_w: float
    n_th: np.ndarray


def rate_schedule(spec: ModelSpec) -> RateSchedule:
    k = mode_numbers(spec)
    kappa = 1.0 / (k[:-1] * (k[:-1] + 1.0))
    gamma = spec.big_g * k
    return RateSchedule(kappa=kappa, gamma=gamma, n_w=waste_occupation(spec),
                        n_th=thermal_occupations(spec))


_CONFIG_KEYS = {
    "support_temperature_mk", "waste_temperature_mk", "mode_spacing_mhz",
    "omega_w_over_delta", "quality_factor", "coupling_g_mhz",
    "waste_decay_mhz", "k_max", "big_g",
}


def read_config_mapping(path: str | Path) -> dict:
    """Read a TOML or JSON file into a plain dict, without key validation.

    A run manifest (JSON with a "resolved_params" section) is unwrapped to
    that section, which is what makes re-running from a manifest work.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".toml":
        data = tomllib.loads(text)
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = tomllib.loads(text)
    if "resolved_params" in data:  # manifest re-run
        data = data["resolved_params"]
    return data


def load_config(path: str | Path) -> PhysicalInputs:
    """Read a TOML or JSON config file into PhysicalInputs."""
    data = read_config_mapping(path)
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    if "k_max" in data and data["k_max"] is not None:
        data["k_max"] = int(data["k_max"])
    return PhysicalInputs(**data)
