"""Stationary solutions of the mean-field kinetic equations.

The mode occupations obey

    dn_k/dtau = J_{k,k+1} - J_{k-1,k} - gamma_k*(n_k - n_k^th),
    J_{k,k+1} = kappa_k*[n_w*(n_{k+1} - n_k) + (n_k + 1)*n_{k+1}],

with zero currents outside the chain (J_{0,1} = J_{K,K+1} = 0) and rates in
units g**2/Gamma.  Summing the equations telescopes the currents away, so any
steady state satisfies sum_k gamma_k*(n_k - n_k^th) = 0; with the Ohmic
schedule gamma_k = G*k this pins the total energy to its thermal value.

steady_state exploits that identity twice.  It iterates on the deviation
d = n - n^th rather than on n, so the stiff gamma_k*d_k term is evaluated
without cancellation even when G is huge; and it replaces the last Newton
equation by the exact energy row sum_k k*d_k = 0, which is algebraically
implied by the others but enforces the energy constraint to machine precision
even when G is tiny (a residual of 1e-12 on the raw equations would bound the
energy error only by 1e-12/G).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csc_matrix, diags
from scipy.sparse.linalg import splu

from .errors import CutoffNotConverged, DegenerateSteadyState, NotConverged
from .model import (K_MAX_CAP, ModelSpec, RateSchedule, default_k_max,
                    mode_numbers, rate_schedule)

_PTC_BUDGET = 2000
_PTC_EXIT_FACTOR = 1e-4  # leave pseudo-time once the residual dropped this much


@dataclass(frozen=True)
class SolverOptions:
    residual_tol: float = 1e-12
    max_newton_iters: int = 200
    damping_min: float = 1e-4
    pseudo_time_step: float = 0.1

    def __post_init__(self):
        if not self.residual_tol > 0.0:
            raise ValueError("residual_tol must be positive")
        if self.max_newton_iters < 1:
            raise ValueError("max_newton_iters must be at least 1")
        if not 0.0 < self.damping_min <= 1.0:
            raise ValueError("damping_min must lie in (0, 1]")
        if not self.pseudo_time_step > 0.0:
            raise ValueError("pseudo_time_step must be positive")


@dataclass(frozen=True)
class SteadyStateReport:
    """Converged occupations plus derived observables.

    total_number and total_energy are defined as float(np.sum(occupations))
    and float(np.sum(k*occupations)); tests recompute them the same way.
    """

    occupations: np.ndarray
    total_number: float
    total_energy: float
    condensate_fraction: float
    currents: np.ndarray
    converged: bool
    iterations: int
    residual: float
    spec: ModelSpec = field(repr=False)


def current(k: int, n: np.ndarray, sched: RateSchedule) -> float:
    """Mean-field current J_{k,k+1} on link k (1-based, 1 <= k <= k_max-1)."""
    if not 1 <= k <= len(n) - 1:
        raise IndexError(f"link index {k} outside 1..{len(n) - 1}")
    i = k - 1
    return float(sched.kappa[i] * (sched.n_w * (n[i + 1] - n[i])
                                   + (n[i] + 1.0) * n[i + 1]))


def currents(n: np.ndarray, sched: RateSchedule) -> np.ndarray:
    """All link currents J_{k,k+1}, k = 1..k_max-1."""
    n = np.asarray(n, dtype=float)
    return sched.kappa * (sched.n_w * (n[1:] - n[:-1]) + (n[:-1] + 1.0) * n[1:])


def _current_divergence(n: np.ndarray, sched: RateSchedule) -> np.ndarray:
    """J_{k,k+1} - J_{k-1,k} with zero boundary currents."""
    j = currents(n, sched)
    out = np.empty(len(n))
    out[0] = j[0]
    out[1:-1] = j[1:] - j[:-1]
    out[-1] = -j[-1]
    return out


def rhs(n: np.ndarray, sched: RateSchedule) -> np.ndarray:
    """Time derivative dn/dtau of the kinetic equations."""
    n = np.asarray(n, dtype=float)
    return _current_divergence(n, sched) - sched.gamma * (n - sched.n_th)


def jacobian(n: np.ndarray, sched: RateSchedule):
    """Exact tridiagonal d(rhs)/dn as a sparse CSR matrix."""
    lower, diag, upper = _jacobian_bands(np.asarray(n, dtype=float), sched)
    return diags([lower, diag, upper], [-1, 0, 1], format="csr")


def _jacobian_bands(n, sched):
    kappa, n_w = sched.kappa, sched.n_w
    diag = -sched.gamma.astype(float).copy()
    diag[:-1] += kappa * (n[1:] - n_w)
    diag[1:] -= kappa * (n_w + n[:-1] + 1.0)
    lower = -kappa * (n[1:] - n_w)
    upper = kappa * (n_w + n[:-1] + 1.0)
    return lower, diag, upper


def staggering_diagnostic(n: np.ndarray) -> float:
    """Fraction of the total variation carried by the period-two component.

    Returns |sum_k (-1)^k (n_{k+1} - n_k)| / sum_k |n_{k+1} - n_k|, in [0, 1]:
    0 for smooth monotone profiles, 1 for a pure zigzag.  Purely a diagnostic
    for the directional-flow regime at n_w << 1; no quantitative onset claim.
    """
    d = np.diff(np.asarray(n, dtype=float))
    total = float(np.sum(np.abs(d)))
    if total == 0.0:
        return 0.0
    signs = np.where(np.arange(1, len(d) + 1) % 2 == 0, 1.0, -1.0)
    return abs(float(np.sum(signs * d))) / total


def _rhs_from_deviation(d: np.ndarray, sched: RateSchedule) -> np.ndarray:
    """rhs evaluated so the gamma term never suffers n - n^th cancellation."""
    return _current_divergence(sched.n_th + d, sched) - sched.gamma * d


class _Workspace:
    """Shared state for one steady_state call."""

    def __init__(self, spec: ModelSpec, sched: RateSchedule, opts: SolverOptions):
        self.sched = sched
        self.opts = opts
        self.k = mode_numbers(spec)
        self.e_scale = max(float(np.sum(self.k * sched.n_th)), 1.0)
        size = spec.k_max
        # sparsity pattern of the energy-row-replaced Jacobian, built once:
        # tridiagonal rows 0..K-2, dense last row
        rows = [np.arange(size - 1), np.arange(size - 2) + 1,
                np.arange(size - 1), np.full(size, size - 1)]
        cols = [np.arange(size - 1), np.arange(size - 2),
                np.arange(size - 1) + 1, np.arange(size)]
        self._rows = np.concatenate(rows)
        self._cols = np.concatenate(cols)
        self._shape = (size, size)

    def metric(self, d: np.ndarray) -> tuple[float, float]:
        """(scaled kinetic residual, |energy row|/E_th) at deviation d."""
        r = _rhs_from_deviation(d, self.sched)
        scaled = float(np.max(np.abs(r) / np.maximum(self.sched.n_th + d, 1.0)))
        s = float(np.sum(self.k * d))
        return scaled, abs(s) / self.e_scale

    def newton_system(self, d: np.ndarray):
        """Residual vector and Jacobian with the last row replaced by energy."""
        n = self.sched.n_th + d
        r = _rhs_from_deviation(d, self.sched)
        lower, diag, upper = _jacobian_bands(n, self.sched)
        f = np.empty(len(d))
        f[:-1] = r[:-1]
        f[-1] = np.sum(self.k * d) / self.e_scale
        data = np.concatenate([diag[:-1], lower[:-1], upper, self.k / self.e_scale])
        jac = csc_matrix((data, (self._rows, self._cols)), shape=self._shape)
        return f, jac

    def ptc_matrix(self, d: np.ndarray, dt: float):
        """Implicit-Euler operator I/dt - J (plain tridiagonal)."""
        lower, diag, upper = _jacobian_bands(self.sched.n_th + d, self.sched)
        return diags([-lower, 1.0 / dt - diag, -upper], [-1, 0, 1], format="csc")


def _newton_phase(ws: _Workspace, d: np.ndarray, iters_used: int):
    opts = ws.opts
    n_th = ws.sched.n_th
    best = max(ws.metric(d))
    stalled = False
    while iters_used < opts.max_newton_iters:
        if best <= opts.residual_tol:
            return d, best, iters_used, False
        f, jac = ws.newton_system(d)
        try:
            step = splu(jac).solve(-f)
        except RuntimeError:  # singular factorization
            stalled = True
            break
        iters_used += 1
        damping = 1.0
        accepted = False
        while damping >= opts.damping_min:
            cand = d + damping * step
            if np.min(n_th + cand) >= 0.0:
                m = max(ws.metric(cand))
                if m < best:
                    d, best, accepted = cand, m, True
                    break
            damping *= 0.5
        if not accepted:
            stalled = True
            break
    return d, best, iters_used, stalled or best > opts.residual_tol


def _ptc_phase(ws: _Workspace, d: np.ndarray, iters_used: int, budget: int):
    """Implicit-Euler marching toward the Newton basin."""
    opts = ws.opts
    n_th = ws.sched.n_th
    dt = opts.pseudo_time_step
    scaled, _ = ws.metric(d)
    target = max(scaled * _PTC_EXIT_FACTOR, opts.residual_tol)
    for _ in range(budget):
        if scaled <= target:
            break
        r = _rhs_from_deviation(d, ws.sched)
        try:
            step = splu(ws.ptc_matrix(d, dt)).solve(r)
        except RuntimeError:
            dt *= 0.25
            if dt < 1e-14:
                break
            continue
        iters_used += 1
        cand = d + step
        if np.min(n_th + cand) >= 0.0:
            new_scaled, _ = ws.metric(cand)
            if new_scaled < scaled * 1.5:  # tolerate mild transients
                d, scaled = cand, new_scaled
                dt *= 2.0
                continue
        dt *= 0.25
        if dt < 1e-14:
            break
    return d, iters_used


def steady_state(spec: ModelSpec, opts: SolverOptions | None = None,
                 init: np.ndarray | None = None) -> SteadyStateReport:
    """Solve the kinetic equations for the stationary occupations.

    Damped Newton iteration on the deviation from thermal, warm-startable via
    `init`; falls back to implicit-Euler pseudo-time marching when a Newton
    step cannot reduce the residual.  Raises DegenerateSteadyState for G = 0
    (the stationary manifold is then the one-parameter engineered family;
    use equilibria.engineered_distribution with an explicit photon number)
    and NotConverged when the iteration budget is exhausted.
    """
    if spec.big_g == 0.0:
        raise DegenerateSteadyState(
            "G = 0 leaves a one-parameter family of stationary states; use "
            "equilibria.engineered_distribution / solve_mu_for_number with an "
            "explicit photon number N_0 instead")
    opts = SolverOptions() if opts is None else opts
    sched = rate_schedule(spec)
    if init is not None:
        init = np.asarray(init, dtype=float)
        if init.shape != sched.n_th.shape:
            raise ValueError("init must have length k_max")
        if np.min(init) < 0.0:
            raise ValueError("init must be nonnegative")
        d = init - sched.n_th
    else:
        d = np.zeros_like(sched.n_th)

    ws = _Workspace(spec, sched, opts)
    iters = 0
    best = max(ws.metric(d))
    for _round in range(3):
        d, best, iters, stalled = _newton_phase(ws, d, iters)
        if not stalled:
            break
        if iters >= opts.max_newton_iters:
            break
        d, iters = _ptc_phase(ws, d, iters, _PTC_BUDGET)
    scaled, energy_part = ws.metric(d)
    best = max(scaled, energy_part)
    if best > opts.residual_tol:
        raise NotConverged(
            f"steady-state residual {best:.3e} above tolerance "
            f"{opts.residual_tol:.1e} after {iters} iterations",
            residual=best, iterations=iters)

    n = sched.n_th + d
    total_number = float(np.sum(n))
    return SteadyStateReport(
        occupations=n,
        total_number=total_number,
        total_energy=float(np.sum(ws.k * n)),
        condensate_fraction=float(n[0]) / total_number,
        currents=currents(n, sched),
        converged=True,
        iterations=iters,
        residual=best,
        spec=spec,
    )


def adapt_cutoff(spec: ModelSpec, opts: SolverOptions | None = None,
                 observable_tol: float = 1e-6) -> ModelSpec:
    """Grow k_max from the model default until observables stop moving.

    Solves at the default cutoff and at twice that, doubling until N_ph, E_ph
    and n_1 all agree to observable_tol relative between successive solves;
    returns the spec at the smaller cutoff of the first agreeing pair.
    """
    if not observable_tol > 0.0:
        raise ValueError("observable_tol must be positive")
    k_lo = default_k_max(spec.x)
    report_lo = steady_state(spec.with_k_max(k_lo), opts)
    while True:
        k_hi = 2 * k_lo
        if k_hi > K_MAX_CAP:
            raise CutoffNotConverged(
                f"observables still moving at the k_max cap ({K_MAX_CAP})")
        report_hi = steady_state(spec.with_k_max(k_hi), opts)
        pairs = (
            (report_lo.total_number, report_hi.total_number),
            (report_lo.total_energy, report_hi.total_energy),
            (report_lo.occupations[0], report_hi.occupations[0]),
        )
        if all(abs(a - b) <= observable_tol * max(abs(a), abs(b)) for a, b in pairs):
            return spec.with_k_max(k_lo)
        k_lo, report_lo = k_hi, report_hi
