"""Feasibility analysis of the superconducting-circuit implementation.

The engineered cooling element is a chain of N_c SNAIL couplers between the
waveguide and the waste mode.  From the circuit parameters (impedances,
Josephson energy, drive amplitude) this module derives the reduced-phase
zero-point amplitudes, the three-wave coupling strength g, the induced
Kerr/Lamb frequency shifts of the fundamental mode, and the dissipation
ratio G, and checks them against the validity conditions of the dispersive
treatment.

Conventions: reduced phases are dimensionless (phase over the reduced flux
quantum hbar/2e); every derived rate is an angular frequency in rad/s; MHz
and GHz inputs are ordinary frequencies and get their 2*pi on entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PhotonFridgeError
from .meanfield import steady_state
from .model import (HBAR, PhysicalInputs, bose_einstein, default_k_max,
                    dimensionless_from_physical, waste_occupation)

# CODATA 2018 (exact by SI definition)
E_CHARGE = 1.602176634e-19  # C

#: artifact thresholds for the "much smaller than" validity conditions
WEAK_COUPLING_RATIO = 0.2  # g/Gamma
WEAK_DISSIPATION_G = 1e-2  # G
CAPACITIVE_RATIO = 1e-5  # C_c/(l*C)


@dataclass(frozen=True)
class CircuitParams(PhysicalInputs):
    """Circuit-level description: physical run inputs plus coupler data."""

    waveguide_impedance_ohm: float = field(kw_only=True)
    waste_impedance_ohm: float = field(kw_only=True)
    josephson_energy_ghz: float = field(kw_only=True)
    drive_amplitude: float = field(kw_only=True)
    snail_count: int = field(kw_only=True)
    # optional capacitive-coupling estimate, C_c and the total line capacitance
    coupling_capacitance_pf: float | None = field(default=None, kw_only=True)
    line_capacitance_pf: float | None = field(default=None, kw_only=True)

    def __post_init__(self):
        super().__post_init__()
        if not self.waveguide_impedance_ohm > 0.0:
            raise ValueError("waveguide_impedance_ohm must be positive")
        if not self.waste_impedance_ohm > 0.0:
            raise ValueError("waste_impedance_ohm must be positive")
        if not self.josephson_energy_ghz > 0.0:
            raise ValueError("josephson_energy_ghz must be positive")
        if not 0.0 <= self.drive_amplitude < 1.0:
            raise ValueError("drive_amplitude must lie in [0, 1)")
        if int(self.snail_count) != self.snail_count or self.snail_count < 1:
            raise ValueError("snail_count must be a positive integer")
        for name in ("coupling_capacitance_pf", "line_capacitance_pf"):
            value = getattr(self, name)
            if value is not None and not value > 0.0:
                raise ValueError(f"{name} must be positive when given")


@dataclass(frozen=True)
class ShiftBreakdown:
    """Contributions to the frequency shift of the fundamental mode (rad/s).

    total collects the terms that act on mode 1 itself: its self-Kerr, the
    cross-Kerr with the waste occupation, and the drive-induced Lamb shift.
    waveguide_cross_kerr is the coefficient 4*K_1_se/k evaluated at the
    nearest neighbour k = 2; it shifts that mode, not mode 1, and is
    reported for context only.
    """

    self_kerr: float
    waveguide_cross_kerr: float
    waste_cross_kerr: float
    lamb: float
    total: float


@dataclass(frozen=True)
class CheckResult:
    """One validity condition with its margin (value/threshold; < 1 passes)."""

    name: str
    inequality: str
    value: float
    threshold: float
    margin: float
    passed: bool
    advisory: bool = False
    note: str = ""


@dataclass(frozen=True)
class FeasibilityReport:
    phase_zpf_waveguide: float
    phase_zpf_waste: float
    coupling_g: float  # rad/s
    big_g_derived: float
    shifts: ShiftBreakdown
    checks: tuple
    passed: bool  # every non-advisory, non-skipped check passed
    n_ph: float
    target_n1: float

    def lines(self) -> list:
        """Human-readable table, one line per check."""
        out = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            kind = " (advisory)" if c.advisory else ""
            out.append(
                f"[{status}]{kind} {c.name}: {c.inequality} "
                f"(value {c.value:.4g}, threshold {c.threshold:.4g}, "
                f"margin {c.margin:.3g}x)"
                + (f" -- {c.note}" if c.note else "")
            )
        return out


def phase_zpf(params: CircuitParams):
    """Reduced-phase zero-point amplitudes (phi_1_0, phi_w_0).

    phi_k_0 = sqrt((4/pi)*(Z*e**2/hbar)/k) for waveguide mode k and
    phi_w_0 = sqrt(2*Z_w*e**2/hbar) for the lumped waste mode.
    """
    phi_1 = math.sqrt(
        (4.0 / math.pi) * params.waveguide_impedance_ohm * E_CHARGE**2 / HBAR
    )
    phi_w = math.sqrt(2.0 * params.waste_impedance_ohm * E_CHARGE**2 / HBAR)
    return phi_1, phi_w


def coupling_strength(params: CircuitParams) -> float:
    """Three-wave coupling g = eps*(E_J/hbar)*phi_w*phi_1**2/(18*N_c**2).

    In a chain of N_c identical couplers each one carries 1/N_c of the total
    phase drop, so the cubic coefficient picks up a factor 1/N_c**2.
    Returns an angular frequency in rad/s.
    """
    phi_1, phi_w = phase_zpf(params)
    e_j_over_hbar = 2.0 * math.pi * params.josephson_energy_ghz * 1e9
    return (
        params.drive_amplitude * e_j_over_hbar * phi_w * phi_1**2
        / (18.0 * params.snail_count**2)
    )


def big_g_from_circuit(params: CircuitParams) -> float:
    """Dissipation ratio gamma*Gamma/g**2 from the circuit-derived g.

    Infinite when the drive is off (g = 0): thermalization always wins.
    """
    g = coupling_strength(params)
    delta = 2.0 * math.pi * params.mode_spacing_mhz * 1e6
    gamma = delta / params.quality_factor
    big_gamma = 2.0 * math.pi * params.waste_decay_mhz * 1e6
    if g == 0.0:
        return math.inf
    return gamma * big_gamma / g**2


def frequency_shifts(params: CircuitParams, n_1: float,
                     n_w: float) -> ShiftBreakdown:
    """Quartic-order shifts of the fundamental mode at given occupations."""
    if n_1 < 0.0 or n_w < 0.0:
        raise ValueError("occupations must be nonnegative")
    phi_1, phi_w = phase_zpf(params)
    e_j_over_hbar = 2.0 * math.pi * params.josephson_energy_ghz * 1e9
    n_c = params.snail_count
    self_kerr = 6.0 * e_j_over_hbar * phi_1**4 * n_1 / (81.0 * n_c**3)
    waveguide_cross = 4.0 * self_kerr / 2.0  # coefficient at neighbour k = 2
    waste_cross = (
        24.0 * e_j_over_hbar * phi_1**2 * phi_w**2 * n_w / (81.0 * n_c**3)
    )
    lamb = (
        6.0 * e_j_over_hbar * params.drive_amplitude**2 * phi_1**2
        / (81.0 * n_c)
    )
    return ShiftBreakdown(
        self_kerr=self_kerr,
        waveguide_cross_kerr=waveguide_cross,
        waste_cross_kerr=waste_cross,
        lamb=lamb,
        total=self_kerr + waste_cross + lamb,
    )


def resonance_choice(n: int):
    """Waste and drive frequencies (omega_w/Delta, omega_d/Delta) for step n.

    The quarter-integer offsets keep omega_w - omega_d = Delta exact while
    2*omega_w +- omega_d never hits a mode multiple m*Delta.
    """
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer")
    return 1.25 + 0.5 * n, 0.25 + 0.5 * n


def detuned_kappa(k: int, omega_k_shift: float, params: CircuitParams) -> float:
    """Effective link rate with a residual detuning Omega_k (rad/s).

    kappa_k = (g**2/(k*(k+1))) * Gamma/(Gamma**2 + Omega_k**2); at zero
    detuning this is the ideal g**2/(Gamma*k*(k+1)).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    g = coupling_strength(params)
    big_gamma = 2.0 * math.pi * params.waste_decay_mhz * 1e6
    if not big_gamma > 0.0:
        raise ValueError("waste linewidth must be positive")
    return (
        g**2 / (k * (k + 1.0)) * big_gamma
        / (big_gamma**2 + omega_k_shift**2)
    )


def _check(name, inequality, value, threshold, *, advisory=False, note=""):
    if math.isnan(value):
        margin = math.nan
        passed = False
    else:
        margin = value / threshold if threshold != 0.0 else math.inf
        passed = value < threshold
    return CheckResult(name=name, inequality=inequality, value=value,
                       threshold=threshold, margin=margin, passed=passed,
                       advisory=advisory, note=note)


def validate(params: CircuitParams, target_n1: float | None = None,
             n_ph: float | None = None) -> FeasibilityReport:
    """Evaluate the validity conditions; failures are reported, not raised.

    N_ph and the condensate occupation default to a mean-field solve of the
    operating point (explicit big_g if set, else the coupling_g_mhz input);
    if that solve is unavailable the thermal values stand in, with a note on
    the affected checks.
    """
    phi_1, phi_w = phase_zpf(params)
    g = coupling_strength(params)
    delta = 2.0 * math.pi * params.mode_spacing_mhz * 1e6
    big_gamma = 2.0 * math.pi * params.waste_decay_mhz * 1e6
    big_g_derived = big_g_from_circuit(params)

    spec = dimensionless_from_physical(params)
    n_w = waste_occupation(spec)
    solve_note = ""
    if n_ph is None or target_n1 is None:
        thermal = bose_einstein(spec.x)  # n_1^th
        try:
            report = steady_state(spec)
            solved_n1 = float(report.occupations[0])
            solved_n_ph = report.total_number
        except PhotonFridgeError as err:
            solved_n1 = thermal
            solved_n_ph = thermal_number_direct(spec.x, spec.k_max)
            solve_note = f"mean-field solve unavailable ({err}); thermal fallback"
        if target_n1 is None:
            target_n1 = solved_n1
        if n_ph is None:
            n_ph = solved_n_ph

    shifts = frequency_shifts(params, target_n1, n_w)

    checks = [
        _check(
            "waste_phase_bound",
            "phi_w_0*sqrt(n_w)/N_c < 1",
            phi_w * math.sqrt(n_w) / params.snail_count,
            1.0,
            note=solve_note,
        ),
        _check(
            "waveguide_phase_bound",
            "phi_1_0*sqrt(N_ph)/N_c < 1",
            phi_1 * math.sqrt(n_ph) / params.snail_count,
            1.0,
            note=solve_note,
        ),
        _check(
            "fundamental_shift",
            "|delta_1(n_1)| < Gamma",
            abs(shifts.total),
            big_gamma,
            note=solve_note,
        ),
        _check(
            "waste_linewidth",
            "Gamma < Delta/4",
            big_gamma,
            delta / 4.0,
        ),
        _check(
            "weak_coupling",
            "g/Gamma < 0.2",
            g / big_gamma,
            WEAK_COUPLING_RATIO,
            advisory=True,
            note="threshold is an artifact reading of 'much smaller than'",
        ),
        _check(
            "weak_dissipation",
            "G < 1e-2",
            big_g_derived,
            WEAK_DISSIPATION_G,
            note="G infinite: drive off, no cooling" if g == 0.0 else "",
        ),
    ]
    if (params.coupling_capacitance_pf is not None
            and params.line_capacitance_pf is not None):
        ratio = params.coupling_capacitance_pf / params.line_capacitance_pf
        checks.append(
            _check(
                "capacitive_coupling",
                "C_c/(l*C) < 1e-5",
                ratio,
                CAPACITIVE_RATIO,
                advisory=True,
                note="informational: residual loss of order a few Hz",
            )
        )

    passed = all(c.passed for c in checks if not c.advisory)
    return FeasibilityReport(
        phase_zpf_waveguide=phi_1,
        phase_zpf_waste=phi_w,
        coupling_g=g,
        big_g_derived=big_g_derived,
        shifts=shifts,
        checks=tuple(checks),
        passed=passed,
        n_ph=float(n_ph),
        target_n1=float(target_n1),
    )


def thermal_number_direct(x: float, k_max: int | None = None) -> float:
    """Sum of Bose-Einstein occupations without building a ModelSpec."""
    if k_max is None:
        k_max = default_k_max(x)
    k = np.arange(1, k_max + 1, dtype=float)
    return float(np.sum(bose_einstein(x * k)))
