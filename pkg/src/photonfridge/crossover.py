"""Estimate of the number of efficiently cooled modes.

For small G the lowest modes settle on the engineered (cold) branch while the
high modes stay thermal; the boundary mode k_c shows up as a local maximum of
the mode energies E_k = k*n_k.  Balancing the engineered tail against the
thermal one gives the implicit relation

    G * k**4 * exp(b*k) = (r/(r - 1)) * exp(x_w),

with b = x_w - x and x_w = x*r/theta the waste-side exponent (the relation is
derived for theta = 1; other waste temperatures enter only through x_w and the
result should be read as an extrapolation).  Solving for k yields the closed
form

    k_c = 4*W((b/4) * a**(1/4)) / b,    a = exp(x_w) / ((1 - 1/r)*G),

where W is the principal branch of the Lambert function.  This module
provides the Lambert evaluator, the bracketed root of the implicit relation,
the closed form, and a numeric estimate taken from the E_k profile of a full
steady-state solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoCrossoverRoot
from .meanfield import SolverOptions, steady_state
from .model import ModelSpec, mode_numbers

_BRANCH_POINT = -math.exp(-1.0)


@dataclass(frozen=True)
class CrossoverResult:
    """The three k_c estimates for one parameter set."""

    kc_implicit: float
    kc_closed: float
    kc_numeric: float
    spec: ModelSpec


def lambert_w0(z: float) -> float:
    """Principal branch of the Lambert function, W(z)*exp(W(z)) = z.

    Defined for z >= -1/e.  Halley iteration from a piecewise initial
    guess: a Taylor series near zero, a branch-point expansion near -1/e,
    log(1 + z) in between, and the asymptote log z - log log z for z > e.
    """
    z = float(z)
    if math.isnan(z):
        raise ValueError("lambert_w0: argument is NaN")
    if z < _BRANCH_POINT:
        if z > _BRANCH_POINT * (1.0 + 1e-12):
            return -1.0  # rounding placed z a hair below the branch point
        raise ValueError(
            f"lambert_w0: argument {z} below the branch point -1/e"
        )

    if z > math.e:
        w = math.log(z)
        w -= math.log(w)
    elif z > 0.25:
        w = math.log1p(z)
    elif z > -0.25:
        w = z * (1.0 + z * (-1.0 + 1.5 * z))  # W = z - z**2 + (3/2)z**3 + ...
    else:
        p = math.sqrt(max(2.0 * (1.0 + math.e * z), 0.0))
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0)))

    for _ in range(100):
        if w == -1.0:
            break  # exactly at the branch point
        ew = math.exp(w)
        f = w * ew - z
        w1 = w + 1.0
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w -= dw
        if abs(dw) <= 1e-16 * (2.0 + abs(w)):
            break
    return w


def _log_balance(spec: ModelSpec):
    """Exponent b and log of the constant side of the balance relation."""
    if not spec.big_g > 0.0:
        raise ValueError("crossover estimates require big_g > 0")
    if not spec.r > 1.0:
        raise ValueError("crossover estimates require r > 1")
    x_w = spec.x_waste
    b = x_w - spec.x
    if not b > 0.0:
        raise ValueError(
            "crossover estimates require the waste exponent x*r/theta to "
            "exceed the support exponent x (no cold branch otherwise)"
        )
    log_c = math.log(spec.r / (spec.r - 1.0)) + x_w
    return b, log_c


def kc_closed(spec: ModelSpec) -> float:
    """Closed-form k_c = 4*W((b/4)*a**(1/4))/b via the Lambert function."""
    b, log_c = _log_balance(spec)
    log_a = log_c - math.log(spec.big_g)
    return 4.0 * lambert_w0(0.25 * b * math.exp(0.25 * log_a)) / b


def kc_implicit(spec: ModelSpec) -> float:
    """Bracketed root of the implicit balance relation on [1, k_max].

    The left side log(G) + 4*log(k) + b*k is strictly increasing, so a sign
    change on the bracket pins the root uniquely.  No sign change means the
    balance point falls outside the asymptotic regime the relation was
    derived for.
    """
    b, log_c = _log_balance(spec)
    log_g = math.log(spec.big_g)

    def h(k: float) -> float:
        return log_g + 4.0 * math.log(k) + b * k - log_c

    lo, hi = 1.0, float(spec.k_max)
    if h(lo) > 0.0:
        raise NoCrossoverRoot(
            "balance relation already positive at k = 1; no crossover root"
        )
    if h(hi) < 0.0:
        raise NoCrossoverRoot(
            f"balance relation still negative at k_max = {spec.k_max}; "
            "no crossover root in bracket"
        )
    return float(brentq(h, lo, hi, xtol=1e-12, rtol=4.0 * np.finfo(float).eps))


def kc_numeric(spec: ModelSpec, opts: SolverOptions | None = None) -> float:
    """k_c read off a full steady-state solve as the bump in E_k = k*n_k.

    The profile starts at the condensate peak (the global maximum at k = 1),
    descends to a valley, and climbs back to a local maximum where the cold
    branch hands over to the thermal tail.  The discrete maximum after the
    valley is refined by a parabola through its neighbours.  Monotone
    profiles, or a maximum sitting on the truncation boundary, have no
    interior bump to report.

    Not meaningful for staggered (period-2) profiles at n_w << 1, where E_k
    zig-zags and local extrema stop tracking the crossover.
    """
    report = steady_state(spec, opts)
    e = mode_numbers(spec) * report.occupations

    last = e.size - 1
    valley = 0
    while valley < last and e[valley + 1] < e[valley]:
        valley += 1
    if valley == last:
        raise NoCrossoverRoot(
            "mode energies decrease monotonically; no interior maximum"
        )
    j = valley + int(np.argmax(e[valley:]))
    if j == valley or j == last:
        raise NoCrossoverRoot(
            "mode-energy maximum sits on the profile boundary; "
            "no interior maximum"
        )
    curvature = e[j - 1] - 2.0 * e[j] + e[j + 1]
    if curvature >= 0.0:
        return float(j + 1)
    return float(j + 1) + 0.5 * (e[j - 1] - e[j + 1]) / curvature


def crossover_estimates(
    spec: ModelSpec, opts: SolverOptions | None = None
) -> CrossoverResult:
    """All three k_c estimates bundled for one parameter set."""
    return CrossoverResult(
        kc_implicit=kc_implicit(spec),
        kc_closed=kc_closed(spec),
        kc_numeric=kc_numeric(spec, opts),
        spec=spec,
    )
