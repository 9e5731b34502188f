"""Exact stochastic sampling of the configuration-space master equation.

In the Fock basis the master equation stays diagonal, so the dynamics is a
classical jump process over occupation configurations (n_1, ..., n_K).  Four
channel kinds exist, with propensities given by the Fock matrix elements of
the jump operators (rates in units g**2/Gamma):

    cool_down(k): kappa_k*(n_w+1)*(n_k+1)*n_{k+1}   (n_k, n_{k+1}) -> (+1, -1)
    cool_up(k):   kappa_k*n_w*(n_{k+1}+1)*n_k       (n_k, n_{k+1}) -> (-1, +1)
    loss(k):      gamma_k*(n_k^th+1)*n_k            n_k -> n_k - 1
    gain(k):      gamma_k*n_k^th*(n_k+1)            n_k -> n_k + 1

Trajectories follow the standard two-uniform recipe: waiting time
-ln(r1)/A with A the total propensity, channel chosen by a cumulative scan
against r2*A in a fixed canonical order (cooling pairs by link, then bath
pairs by mode).  Sampling happens at fixed simulated-time intervals so that
stationary expectations are time-weighted, not jump-weighted.

Trajectories are independent: each owns a counter-split seed and a
hand-rolled splitmix64 stream, and accumulates integer sums and histograms.
Merging those integers in trajectory order makes the estimates bit-identical
for any worker count.  Standard errors come from treating each trajectory as
one batch.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import AbsorbingState
from .model import ModelSpec, RateSchedule, rate_schedule, thermal_occupations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_REFRESH_EVERY = 4096  # full propensity rebuild cadence (kills float drift)

COOL_DOWN = "cool_down"
COOL_UP = "cool_up"
LOSS = "loss"
GAIN = "gain"


@dataclass(frozen=True)
class FockConfiguration:
    """Integer occupations plus the trajectory clock (units Gamma/g**2)."""

    occupations: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        occ = np.asarray(self.occupations, dtype=np.int64)
        if occ.ndim != 1 or occ.size < 1:
            raise ValueError("occupations must be a nonempty 1-d integer array")
        if np.any(occ < 0):
            raise ValueError("occupations must be nonnegative")
        object.__setattr__(self, "occupations", occ)


@dataclass(frozen=True)
class JumpChannel:
    kind: str
    k: int  # 1-based link index (cooling) or mode index (bath)
    propensity: float


@dataclass(frozen=True)
class McEstimate:
    """Steady-state estimates pooled over all trajectories.

    Standard errors treat each trajectory as one batch; histograms are
    normalized per mode (the top bin absorbs any overflow counts).
    """

    mean_occupations: np.ndarray
    stderr_occupations: np.ndarray
    g2: np.ndarray
    g2_stderr: np.ndarray
    histograms: np.ndarray  # shape (k_max, hist_cap), rows sum to 1
    sample_count: int
    master_seed: int


def _splitmix64(state: int):
    """Advance a splitmix64 state; return (new_state, uniform in (0, 1])."""
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, ((z >> 11) + 1) * 2.0 ** -53


def _trajectory_seed(master_seed: int, index: int) -> int:
    """Counter-based seed split: disjoint splitmix64 start states."""
    return (master_seed + (index + 1) * _GOLDEN) & _MASK64


def propensities(c: FockConfiguration, sched: RateSchedule) -> list:
    """Jump channels with nonzero propensity, in canonical order."""
    n = c.occupations
    k_max = n.size
    if sched.gamma.size != k_max:
        raise ValueError("configuration length does not match the schedule")
    channels = []
    for k in range(1, k_max):
        down = sched.kappa[k - 1] * (sched.n_w + 1.0) * (n[k - 1] + 1.0) * n[k]
        up = sched.kappa[k - 1] * sched.n_w * (n[k] + 1.0) * n[k - 1]
        if down > 0.0:
            channels.append(JumpChannel(COOL_DOWN, k, down))
        if up > 0.0:
            channels.append(JumpChannel(COOL_UP, k, up))
    for k in range(1, k_max + 1):
        loss = sched.gamma[k - 1] * (sched.n_th[k - 1] + 1.0) * n[k - 1]
        gain = sched.gamma[k - 1] * sched.n_th[k - 1] * (n[k - 1] + 1.0)
        if loss > 0.0:
            channels.append(JumpChannel(LOSS, k, loss))
        if gain > 0.0:
            channels.append(JumpChannel(GAIN, k, gain))
    return channels


def apply_channel(c: FockConfiguration, channel: JumpChannel,
                  dt: float) -> FockConfiguration:
    n = c.occupations.copy()
    k = channel.k
    if channel.kind == COOL_DOWN:
        n[k - 1] += 1
        n[k] -= 1
    elif channel.kind == COOL_UP:
        n[k - 1] -= 1
        n[k] += 1
    elif channel.kind == LOSS:
        n[k - 1] -= 1
    elif channel.kind == GAIN:
        n[k - 1] += 1
    else:
        raise ValueError(f"unknown channel kind {channel.kind!r}")
    # bookkeeping guard: cooling conserves the total, baths shift it by one
    delta = int(n.sum() - c.occupations.sum())
    expected = {COOL_DOWN: 0, COOL_UP: 0, LOSS: -1, GAIN: 1}[channel.kind]
    assert delta == expected, "channel bookkeeping violated"
    return FockConfiguration(occupations=n, time=c.time + dt)


def step(c: FockConfiguration, sched: RateSchedule, draws) -> FockConfiguration:
    """One jump: advance time by -ln(r1)/A and fire the channel picked by r2.

    Reference implementation; the sampling loops use the compiled kernel
    below, which consumes uniforms in the same (r1, r2) order and scans
    channels in the same canonical order.
    """
    r1, r2 = draws
    if not (0.0 < r1 <= 1.0 and 0.0 < r2 <= 1.0):
        raise ValueError("draws must lie in (0, 1]")
    channels = propensities(c, sched)
    total = sum(ch.propensity for ch in channels)
    if total <= 0.0:
        raise AbsorbingState(
            "all jump channels have zero propensity; configuration is absorbing"
        )
    dt = -math.log(r1) / total
    target = r2 * total
    acc = 0.0
    chosen = channels[-1]  # fallback should rounding leave the scan short
    for ch in channels:
        acc += ch.propensity
        if target <= acc:
            chosen = ch
            break
    return apply_channel(c, chosen, dt)


@njit(cache=True, nogil=True)
def _kernel_refresh(n, kappa, gamma, n_w, n_th, prop):
    k_max = n.shape[0]
    for k in range(k_max - 1):
        prop[2 * k] = kappa[k] * (n_w + 1.0) * (n[k] + 1.0) * n[k + 1]
        prop[2 * k + 1] = kappa[k] * n_w * (n[k + 1] + 1.0) * n[k]
    base = 2 * (k_max - 1)
    for k in range(k_max):
        prop[base + 2 * k] = gamma[k] * (n_th[k] + 1.0) * n[k]
        prop[base + 2 * k + 1] = gamma[k] * n_th[k] * (n[k] + 1.0)
    total = 0.0
    for i in range(prop.shape[0]):
        total += prop[i]
    return total


@njit(cache=True, nogil=True)
def _kernel_update(n, kappa, gamma, n_w, n_th, prop, lo, hi, total):
    # refresh channels touching modes lo..hi (0-based, inclusive)
    k_max = n.shape[0]
    base = 2 * (k_max - 1)
    link_lo = lo - 1 if lo > 0 else 0
    link_hi = hi if hi < k_max - 2 else k_max - 2
    for k in range(link_lo, link_hi + 1):
        old = prop[2 * k] + prop[2 * k + 1]
        prop[2 * k] = kappa[k] * (n_w + 1.0) * (n[k] + 1.0) * n[k + 1]
        prop[2 * k + 1] = kappa[k] * n_w * (n[k + 1] + 1.0) * n[k]
        total += prop[2 * k] + prop[2 * k + 1] - old
    for k in range(lo, hi + 1):
        old = prop[base + 2 * k] + prop[base + 2 * k + 1]
        prop[base + 2 * k] = gamma[k] * (n_th[k] + 1.0) * n[k]
        prop[base + 2 * k + 1] = gamma[k] * n_th[k] * (n[k] + 1.0)
        total += prop[base + 2 * k] + prop[base + 2 * k + 1] - old
    return total


@njit(cache=True, nogil=True)
def _kernel_trajectory(n0, kappa, gamma, n_w, n_th, seed, burn_in, interval,
                       samples, s1, s2, hist):
    """Run one trajectory; accumulate into s1, s2, hist. Returns 0, or 1 if
    the configuration became absorbing before all samples were taken."""
    k_max = n0.shape[0]
    hist_cap = hist.shape[1]
    n = n0.copy()
    prop = np.zeros(4 * k_max - 2)
    total = _kernel_refresh(n, kappa, gamma, n_w, n_th, prop)
    state = seed
    t = 0.0
    taken = 0
    next_sample = burn_in + interval
    jumps = 0
    while taken < samples:
        if total <= 0.0:
            total = _kernel_refresh(n, kappa, gamma, n_w, n_th, prop)
            if total <= 0.0:
                return 1
        state = state + np.uint64(0x9E3779B97F4A7C15)
        z = state
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        r1 = (np.float64(z >> np.uint64(11)) + 1.0) * 2.0 ** -53
        t_new = t + (-math.log(r1) / total)

        while taken < samples and next_sample <= t_new:
            # sample the pre-jump configuration occupying [t, t_new)
            for k in range(k_max):
                v = n[k]
                s1[k] += v
                s2[k] += v * v
                b = v if v < hist_cap - 1 else hist_cap - 1
                hist[k, b] += 1
            taken += 1
            next_sample = burn_in + (taken + 1) * interval
        if taken >= samples:
            break

        state = state + np.uint64(0x9E3779B97F4A7C15)
        z = state
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
        r2 = (np.float64(z >> np.uint64(11)) + 1.0) * 2.0 ** -53
        target = r2 * total

        acc = 0.0
        chosen = -1
        last_nonzero = -1
        for i in range(prop.shape[0]):
            p = prop[i]
            if p > 0.0:
                last_nonzero = i
                acc += p
                if target <= acc:
                    chosen = i
                    break
        if chosen < 0:
            chosen = last_nonzero
        if chosen < 0:
            return 1

        base = 2 * (k_max - 1)
        if chosen < base:
            k = chosen >> 1
            if chosen & 1 == 0:
                n[k] += 1
                n[k + 1] -= 1
            else:
                n[k] -= 1
                n[k + 1] += 1
            total = _kernel_update(n, kappa, gamma, n_w, n_th, prop,
                                   k, k + 1, total)
        else:
            k = (chosen - base) >> 1
            if (chosen - base) & 1 == 0:
                n[k] -= 1
            else:
                n[k] += 1
            total = _kernel_update(n, kappa, gamma, n_w, n_th, prop,
                                   k, k, total)
        jumps += 1
        if jumps % _REFRESH_EVERY == 0:
            total = _kernel_refresh(n, kappa, gamma, n_w, n_th, prop)
        t = t_new
    return 0


def initial_configuration(spec: ModelSpec) -> FockConfiguration:
    """Thermal occupations rounded to the nearest integers, at time zero."""
    return FockConfiguration(
        occupations=np.rint(thermal_occupations(spec)).astype(np.int64)
    )


def sample_steady(
    spec: ModelSpec,
    n_trajectories: int,
    burn_in_time: float | None = None,
    sample_interval: float = 1.0,
    samples_per_trajectory: int = 100,
    master_seed: int = 0,
    threads: int = 1,
    hist_cap: int = 512,
) -> McEstimate:
    """Sample the steady state with independent Gillespie trajectories.

    Each trajectory starts from the rounded thermal configuration, discards
    everything before burn_in_time (default 20/gamma_1, the slowest bare
    relaxation time), then records the configuration every sample_interval
    of simulated time.  Identical master_seed and parameters give
    bit-identical estimates for any thread count.
    """
    if n_trajectories < 1:
        raise ValueError("need at least one trajectory")
    if samples_per_trajectory < 1:
        raise ValueError("need at least one sample per trajectory")
    if burn_in_time is None:
        if spec.big_g <= 0.0:
            raise ValueError(
                "the default burn-in 20/gamma_1 needs big_g > 0; "
                "pass burn_in_time explicitly"
            )
        burn_in_time = 20.0 / spec.big_g
    if not burn_in_time > 0.0:
        raise ValueError("burn_in_time must be positive")
    if not sample_interval > 0.0:
        raise ValueError("sample_interval must be positive")
    if hist_cap < 2:
        raise ValueError("hist_cap must be at least 2")

    sched = rate_schedule(spec)
    n0 = initial_configuration(spec).occupations
    master_seed = int(master_seed) & _MASK64
    k_max = spec.k_max

    def run(index: int):
        s1 = np.zeros(k_max, dtype=np.int64)
        s2 = np.zeros(k_max, dtype=np.int64)
        hist = np.zeros((k_max, hist_cap), dtype=np.int64)
        status = _kernel_trajectory(
            n0, sched.kappa, sched.gamma, sched.n_w, sched.n_th,
            np.uint64(_trajectory_seed(master_seed, index)),
            float(burn_in_time), float(sample_interval),
            samples_per_trajectory, s1, s2, hist,
        )
        return status, s1, s2, hist

    if threads > 1 and n_trajectories > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(n_trajectories)))
    else:
        results = [run(i) for i in range(n_trajectories)]

    for index, (status, _, _, _) in enumerate(results):
        if status != 0:
            raise AbsorbingState(
                f"trajectory {index} reached an absorbing configuration "
                f"before taking all samples",
                trajectory=index,
            )

    # merge in trajectory order; integer sums make this order-insensitive
    s1 = np.stack([r[1] for r in results])  # (T, k_max)
    s2 = np.stack([r[2] for r in results])
    hist = np.zeros((k_max, hist_cap), dtype=np.int64)
    for r in results:
        hist += r[3]

    per_traj = samples_per_trajectory
    count = n_trajectories * per_traj
    mean = s1.sum(axis=0) / count
    if n_trajectories > 1:
        traj_means = s1 / per_traj
        stderr = traj_means.std(axis=0, ddof=1) / math.sqrt(n_trajectories)
    else:
        stderr = np.full(k_max, math.inf)

    pair_sum = (s2 - s1).sum(axis=0)  # sum of n*(n-1) over all samples
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = np.where(mean > 0.0, pair_sum / count / mean**2, math.nan)
        if n_trajectories > 1:
            traj_g2 = ((s2 - s1) / per_traj) / (s1 / per_traj) ** 2
            g2_stderr = traj_g2.std(axis=0, ddof=1) / math.sqrt(n_trajectories)
            g2_stderr = np.where(np.all(s1 > 0, axis=0), g2_stderr, math.nan)
        else:
            g2_stderr = np.full(k_max, math.inf)

    return McEstimate(
        mean_occupations=mean,
        stderr_occupations=stderr,
        g2=np.asarray(g2, dtype=float),
        g2_stderr=np.asarray(g2_stderr, dtype=float),
        histograms=hist / count,
        sample_count=count,
        master_seed=master_seed,
    )


def g2_estimator(samples, n_batches: int | None = None):
    """Equal-time second-order correlation of integer samples of one mode.

    Returns (g2, stderr) with g2 = mean(n*(n-1)) / mean(n)**2 pooled over all
    samples and the standard error from contiguous batch means.  A zero
    pooled mean leaves g2 undefined: (nan, nan).
    """
    samples = np.asarray(samples, dtype=np.int64)
    if samples.ndim == 1:
        if samples.size < 2:
            raise ValueError("need at least two samples")
        if n_batches is None:
            n_batches = min(16, samples.size)
        if not 1 <= n_batches <= samples.size:
            raise ValueError("n_batches must lie in 1..len(samples)")
        usable = samples.size - samples.size % n_batches
        batches = samples[:usable].reshape(n_batches, -1).astype(float)
    elif samples.ndim == 2:
        if samples.size < 2:
            raise ValueError("need at least two samples")
        batches = samples.astype(float)
    else:
        raise ValueError("samples must be a 1-d or 2-d integer array")

    flat = samples.astype(float).ravel()
    mean = flat.mean()
    if mean == 0.0:
        return math.nan, math.nan
    g2 = float((flat * (flat - 1.0)).mean() / mean**2)

    n_batches = batches.shape[0]
    if n_batches < 2:
        return g2, math.inf
    batch_means = batches.mean(axis=1)
    if np.any(batch_means == 0.0):
        return g2, math.nan
    batch_g2 = (batches * (batches - 1.0)).mean(axis=1) / batch_means**2
    return g2, float(batch_g2.std(ddof=1) / math.sqrt(n_batches))
