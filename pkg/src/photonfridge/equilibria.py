"""Idealized engineered-bath equilibria and condensation observables.

With the support bath switched off (G = 0+) the engineered process drives the
gas to a Bose-Einstein distribution at the reduced temperature
T_low = T_w * Delta/omega_w, with a chemical potential mu < 1 (in units of
hbar*Delta, i.e. strictly below the fundamental mode):

    n_k = 1/(exp(x_low*(k - mu)) - 1),   x_low = x*r/theta.

Which mu is selected depends on the conserved quantity: pure number-conserving
cooling fixes sum n_k, while cooling in contact with an Ohmic support bath
pins the total energy, sum k*n_k = sum k*n_k^th.  Both solvers work in the
transformed variable u = -log(1 - mu), which stays well-conditioned when mu
approaches the condensation pole at 1.

The tl_* functions are thermodynamic-limit closed forms (x -> 0 at fixed
t = T_low/T).  They are oracles for tests and comparisons, never silently
substituted for the finite-size solvers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NotConverged
from .model import ModelSpec, bose_einstein, thermal_energy, thermal_number

_REL_TOL = 1e-10
_MAX_ELEMENTS = 2_000_000
_U_LIMIT = 700.0  # |u| beyond this over/underflows exp(-u); far outside use


@dataclass(frozen=True)
class EngineeredDistribution:
    """A solved engineered-thermal state: occupations at T_low with mu < 1."""

    t_low_over_t: float
    mu: float
    occupations: np.ndarray


@dataclass(frozen=True)
class CondensationCurve:
    """Condensate fraction and chemical potential along a T_low/T grid.

    The energy-constrained branch is the G -> 0+ cooled steady state; the
    fixed-number branch is the ordinary equilibrium of the same number of
    massive bosons at T_low, for contrast (it shows no sharp feature).
    """

    t_grid: np.ndarray
    mu_energy: np.ndarray
    fraction_energy: np.ndarray
    n_ph_energy: np.ndarray
    mu_number: np.ndarray
    fraction_number: np.ndarray
    x: float
    k_max: int


def x_low_of(spec: ModelSpec) -> float:
    """Inverse reduced temperature x_low = x*r/theta = x/(T_low/T)."""
    return spec.x * spec.r / spec.theta


def engineered_distribution(spec: ModelSpec, mu: float,
                            k_max: int | None = None) -> np.ndarray:
    """Bose-Einstein occupations at T_low with chemical potential mu < 1."""
    if mu >= 1.0:
        raise ValueError("mu must lie below the fundamental mode (mu < 1)")
    k_max = spec.k_max if k_max is None else k_max
    k = np.arange(1, k_max + 1, dtype=float)
    return bose_einstein(x_low_of(spec) * (k - mu))


def condensate_fraction(n: np.ndarray) -> float:
    """Share n_1 / sum(n_k) of photons in the fundamental mode."""
    total = float(np.sum(n))
    if not total > 0.0:
        raise ValueError("occupation vector has no photons")
    return float(n[0]) / total


def _occ_sum(spec: ModelSpec, u: float, k_max: int, power: int) -> float:
    x_low = x_low_of(spec)
    k = np.arange(1, k_max + 1, dtype=float)
    # x_low*(k - mu) = x_low*(k - 1) + x_low*exp(-u): cancellation-free near mu = 1
    with np.errstate(over="ignore"):
        arg = x_low * (k - 1.0) + x_low * np.exp(-u)
    n = bose_einstein(arg)
    return float(np.sum(n)) if power == 0 else float(np.sum(k**power * n))


def _solve_u(spec: ModelSpec, target: float, k_max: int, power: int) -> float:
    """Find u with sum k^power * n_k(mu(u)) = target; the sum is monotone in u."""
    if not target > 0.0:
        raise ValueError("constraint target must be positive")

    def f(u: float) -> float:
        return _occ_sum(spec, u, k_max, power) - target

    u_lo, u_hi = -1.0, 1.0
    while f(u_lo) > 0.0:
        u_lo *= 2.0
        if u_lo < -_U_LIMIT:
            raise NotConverged("no lower bracket for the chemical potential")
    while f(u_hi) < 0.0:
        u_hi *= 2.0
        if u_hi > _U_LIMIT:
            raise NotConverged("no upper bracket for the chemical potential")

    u = brentq(f, u_lo, u_hi, xtol=1e-15, rtol=8.9e-16, maxiter=300)
    value = _occ_sum(spec, u, k_max, power)
    if abs(value - target) > _REL_TOL * target:
        raise NotConverged(
            "chemical-potential solve stalled at relative residual "
            f"{abs(value - target) / target:.3e} (target {target:.6e})",
            residual=abs(value - target) / target)
    return u


def _distribution_from_u(spec: ModelSpec, u: float, k_max: int) -> EngineeredDistribution:
    mu = 1.0 - np.exp(-u)
    return EngineeredDistribution(t_low_over_t=spec.t_low_over_t, mu=mu,
                                  occupations=engineered_distribution(spec, mu, k_max=k_max))


def solve_mu_for_number(spec: ModelSpec, n_target: float,
                        k_max: int | None = None) -> EngineeredDistribution:
    """Engineered distribution holding a fixed total photon number.

    This is the stationary state of the pure number-conserving cooling
    process, whose photon number stays at its initial value N_0.
    """
    k_max = spec.k_max if k_max is None else k_max
    return _distribution_from_u(spec, _solve_u(spec, n_target, k_max, power=0), k_max)


def solve_mu_for_energy(spec: ModelSpec, e_target: float | None = None,
                        k_max: int | None = None) -> EngineeredDistribution:
    """Engineered distribution holding a fixed total energy (default E_th).

    This is the G -> 0+ limit of cooling in contact with the Ohmic support
    bath, whose stationarity enforces sum k*n_k = sum k*n_k^th.
    """
    k_max = spec.k_max if k_max is None else k_max
    if e_target is None:
        e_target = thermal_energy(spec.with_k_max(k_max))
    return _distribution_from_u(spec, _solve_u(spec, e_target, k_max, power=1), k_max)


# ---------------------------------------------------------------------------
# Thermodynamic-limit closed forms (x -> 0 at fixed t = T_low/T)
# ---------------------------------------------------------------------------

def tl_ground_occupation(t_ratio: float, inv_x: float) -> float:
    """Fundamental-mode occupation (pi^2/6)*inv_x^2*(1 - t^2) for t < 1."""
    if not 0.0 < t_ratio < 1.0:
        raise ValueError("condensed-branch closed form requires 0 < T_low/T < 1")
    return (np.pi**2 / 6.0) * inv_x**2 * (1.0 - t_ratio**2)


def tl_mu_eff(t_ratio: float, inv_x: float) -> float:
    """Chemical potential (units hbar*Delta) on the condensed side, t < 1."""
    if not 0.0 < t_ratio < 1.0:
        raise ValueError("condensed-branch closed form requires 0 < T_low/T < 1")
    return 1.0 - (6.0 / np.pi**2) * (t_ratio / inv_x) / (1.0 - t_ratio**2)


def tl_excited_number(t_ratio: float, inv_x: float) -> float:
    """Leading excited-state number v*log(v), v = t*inv_x = k_B*T_low/(hbar*Delta)."""
    if not 0.0 < t_ratio < 1.0:
        raise ValueError("excited-number estimate requires 0 < T_low/T < 1")
    v = t_ratio * inv_x
    if not v > 1.0:
        raise ValueError("excited-number estimate requires k_B*T_low > hbar*Delta")
    return v * np.log(v)


def tl_mu_hot(t_ratio: float) -> float:
    """Hot-side chemical potential in units of k_B*T_low: log((pi^2/6)/t^2)."""
    if not t_ratio > 1.0:
        raise ValueError("hot-side closed form requires T_low/T > 1")
    if t_ratio < 3.0:
        warnings.warn("tl_mu_hot is a t >> 1 asymptote; below t = 3 treat it as "
                      "a rough estimate", stacklevel=2)
    return float(np.log((np.pi**2 / 6.0) / t_ratio**2))


# ---------------------------------------------------------------------------
# Condensation curves: energy-constrained vs fixed-number equilibrium
# ---------------------------------------------------------------------------

def equilibrium_comparison(spec: ModelSpec, t_grid) -> CondensationCurve:
    """Sweep T_low/T over t_grid at fixed support x.

    Each grid point re-anchors the reduced temperature via r/theta = 1/t.  The
    energy branch fixes sum k*n_k = E_th(spec); the comparison branch fixes
    sum n_k = N_th(spec) (massive-boson equilibrium at T_low).  All points
    share one cutoff sized for the hottest point, so the branches are compared
    under identical truncation.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0 or np.any(t_grid <= 0.0):
        raise ValueError("t grid must be nonempty and positive")
    if np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t grid must be strictly increasing")
    k_needed = int(np.ceil(40.0 * float(np.max(t_grid)) / spec.x)) + 1
    k_max = min(max(spec.k_max, k_needed), _MAX_ELEMENTS)

    base = spec.with_k_max(k_max)
    e_target = thermal_energy(base)
    n_target = thermal_number(base)

    mu_e = np.empty_like(t_grid)
    fr_e = np.empty_like(t_grid)
    n_e = np.empty_like(t_grid)
    mu_n = np.empty_like(t_grid)
    fr_n = np.empty_like(t_grid)
    for i, t in enumerate(t_grid):
        point = ModelSpec(x=spec.x, theta=spec.theta, r=spec.theta / t,
                          big_g=spec.big_g, k_max=k_max)
        energy = solve_mu_for_energy(point, e_target)
        mu_e[i] = energy.mu
        fr_e[i] = condensate_fraction(energy.occupations)
        n_e[i] = float(np.sum(energy.occupations))
        number = solve_mu_for_number(point, n_target)
        mu_n[i] = number.mu
        fr_n[i] = condensate_fraction(number.occupations)
    return CondensationCurve(t_grid=t_grid, mu_energy=mu_e, fraction_energy=fr_e,
                             n_ph_energy=n_e, mu_number=mu_n, fraction_number=fr_n,
                             x=spec.x, k_max=k_max)
