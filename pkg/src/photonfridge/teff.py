"""Operative effective temperature of a nonequilibrium occupation vector.

A weakly coupled probe with transition energy k*Delta exchanges photons with
the gas through all energy-conserving mode pairs (q, q+k).  Comparing the
resulting absorption and emission rates with a thermal reservoir defines a
per-transition effective temperature

    T_eff(k)/T = x*k / ln( sum_q (n_{q+k} + 1)*n_q / sum_q (n_q + 1)*n_{q+k} ),

with q = 1..k_max-k.  For a Bose-Einstein input the ratio is exp(x*k) termwise
and T_eff(k) = T exactly; for the engineered distribution it is exp(x_low*k)
and T_eff(k) = T_low.  A ratio of exactly 1 means the probe sees an infinite
temperature, and a ratio below 1 a population inversion (negative
temperature); both come back flagged instead of silently averaged.

Averaging the per-transition values over a spectral range 1..K gives the
single effective temperature a broadband probe would thermalize to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FlaggedConstituent
from .model import ModelSpec

FLAG_NONE = ""
FLAG_INFINITE = "infinite"
FLAG_INVERSION = "inversion"


@dataclass(frozen=True)
class TeffValue:
    """Effective temperature at one transition, in units of T."""

    k: int
    value: float
    flag: str = FLAG_NONE


@dataclass(frozen=True)
class TeffTable:
    """Per-transition effective temperatures plus their range averages.

    per_k[i] holds T_eff(k)/T for k = i + 1; flags[i] is empty for a plain
    finite value, "infinite" when the rate ratio is exactly 1, and
    "inversion" when it is below 1.
    """

    per_k: np.ndarray
    flags: tuple
    x: float

    def value(self, k: int) -> TeffValue:
        if not 1 <= k <= self.per_k.size:
            raise ValueError(f"transition index {k} outside 1..{self.per_k.size}")
        return TeffValue(k=k, value=float(self.per_k[k - 1]), flag=self.flags[k - 1])

    def spectral_average(self, big_k: int) -> float:
        """Mean of T_eff(k)/T over k = 1..big_k.

        Refuses to average flagged entries; a probe with an inverted or
        infinite constituent temperature has no meaningful mean.
        """
        if not 1 <= big_k <= self.per_k.size:
            raise ValueError(
                f"spectral range {big_k} outside 1..{self.per_k.size}"
            )
        for i in range(big_k):
            if self.flags[i]:
                raise FlaggedConstituent(
                    f"T_eff at transition k = {i + 1} is flagged "
                    f"'{self.flags[i]}'; spectral average undefined",
                    k=i + 1,
                )
        return float(np.mean(self.per_k[:big_k]))


def _rate_sums(n: np.ndarray, k: int):
    low = n[:-k]  # n_q for q = 1..k_max-k
    high = n[k:]  # n_{q+k}
    num = float(np.dot(high + 1.0, low))
    den = float(np.dot(low + 1.0, high))
    return num, den


def teff_at_frequency(spec: ModelSpec, n: np.ndarray, k: int) -> TeffValue:
    """Effective temperature seen by a probe at transition energy k*Delta."""
    n = np.asarray(n, dtype=float)
    if n.ndim != 1 or n.size != spec.k_max:
        raise ValueError("occupation vector must have length spec.k_max")
    if not 1 <= k <= spec.k_max - 1:
        raise ValueError(f"transition index {k} outside 1..{spec.k_max - 1}")
    num, den = _rate_sums(n, k)
    if num == 0.0:
        raise ValueError(
            f"no occupied mode can emit at transition k = {k}; "
            "effective temperature undefined"
        )
    if den == 0.0:
        # nothing to absorb from above: the probe sees a zero-temperature bath
        return TeffValue(k=k, value=0.0)
    if num == den:
        return TeffValue(k=k, value=math.inf, flag=FLAG_INFINITE)
    value = spec.x * k / math.log(num / den)
    if num < den:
        return TeffValue(k=k, value=value, flag=FLAG_INVERSION)
    return TeffValue(k=k, value=value)


def teff_table(
    spec: ModelSpec, n: np.ndarray, k_limit: int | None = None
) -> TeffTable:
    """Tabulate T_eff(k)/T for k = 1..k_limit (default k_max - 1)."""
    if k_limit is None:
        k_limit = spec.k_max - 1
    if not 1 <= k_limit <= spec.k_max - 1:
        raise ValueError(f"k_limit {k_limit} outside 1..{spec.k_max - 1}")
    values = np.empty(k_limit)
    flags = []
    for k in range(1, k_limit + 1):
        entry = teff_at_frequency(spec, n, k)
        values[k - 1] = entry.value
        flags.append(entry.flag)
    return TeffTable(per_k=values, flags=tuple(flags), x=spec.x)


def teff_range(spec: ModelSpec, n: np.ndarray, big_k: int) -> float:
    """Spectral-range average (1/K)*sum_{k<=K} T_eff(k)/T."""
    if not 1 <= big_k <= spec.k_max - 1:
        raise ValueError(f"spectral range {big_k} outside 1..{spec.k_max - 1}")
    total = 0.0
    for k in range(1, big_k + 1):
        entry = teff_at_frequency(spec, n, k)
        if entry.flag:
            raise FlaggedConstituent(
                f"T_eff at transition k = {k} is flagged '{entry.flag}'; "
                "spectral average undefined",
                k=k,
            )
        total += entry.value
    return total / big_k
