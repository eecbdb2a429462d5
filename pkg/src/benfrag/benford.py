"""Significand statistics over collections of positive reals.

All inputs are log10 values, never raw magnitudes, so statistics survive
products far below double-precision range; rebasing to base B divides by
log10(B). Significand-at-most comparisons happen in mantissa space with
ties at machine precision resolved toward inclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

TIE_TOL = 1e-14


def _as_log_array(log_values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.asarray(log_values, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("log values must be finite")
    return arr


def mantissas(log_values, base: int = 10) -> np.ndarray:
    """Fractional part of log_B x, in [0, 1)."""
    if base < 2:
        raise ValueError("base must be >= 2")
    frac = np.mod(_as_log_array(log_values) / math.log10(base), 1.0)
    return np.where(frac >= 1.0, 0.0, frac)  # mod can round up to 1.0


def significand(base: int, log_value):
    """B^frac(log_B x): the leading factor of x in base-B scientific
    notation, in [1, B)."""
    scalar = np.isscalar(log_value)
    sig = float(base) ** mantissas(np.atleast_1d(log_value), base)
    return float(sig[0]) if scalar else sig


def phi_s(base: int, s: float, log_value):
    """Indicator of significand(x) <= s, for s in [1, B)."""
    if not 1.0 <= s < base:
        raise ValueError(f"threshold s must lie in [1, {base}), got {s}")
    scalar = np.isscalar(log_value)
    hit = (mantissas(np.atleast_1d(log_value), base) <= math.log(s, base) + TIE_TOL).astype(int)
    return int(hit[0]) if scalar else hit


def benford_cdf(base: int, s: float) -> float:
    """log_B(s): the ideal probability of a significand at most s."""
    if base < 2:
        raise ValueError("base must be >= 2")
    if not 1.0 <= s <= base:
        raise ValueError(f"s must lie in [1, {base}], got {s}")
    return math.log(s, base)


def digit_law(base: int) -> np.ndarray:
    """Ideal leading-digit frequencies log_B((d+1)/d), d = 1..B-1."""
    if base < 2:
        raise ValueError("base must be >= 2")
    d = np.arange(1, base)
    return np.log((d + 1) / d) / math.log(base)


def leading_digit_counts(log_values, base: int = 10) -> np.ndarray:
    """Observed counts of leading digits 1..B-1."""
    mant = mantissas(log_values, base)
    boundaries = np.log(np.arange(2, base)) / math.log(base)
    digits = np.searchsorted(boundaries - TIE_TOL, mant, side="right")
    return np.bincount(digits, minlength=base - 1)


def _ks_uniform(sorted_mantissas: np.ndarray) -> float:
    n = sorted_mantissas.size
    ranks = np.arange(1, n + 1)
    d_plus = np.max(ranks / n - sorted_mantissas)
    d_minus = np.max(sorted_mantissas - (ranks - 1) / n)
    return float(max(d_plus, d_minus))


def mantissa_discrepancy(log_values, base: int = 10) -> float:
    """Kolmogorov-Smirnov distance of the mantissas from uniform [0, 1);
    equals sup_s |P(s) - log_B s| over the significand curve."""
    return _ks_uniform(np.sort(mantissas(log_values, base)))


def chi_square_digits(log_values, base: int = 10) -> tuple[float, int]:
    """Pearson statistic of the leading-digit counts against the ideal
    law, with B - 2 degrees of freedom."""
    counts = leading_digit_counts(log_values, base)
    n = int(counts.sum())
    if n < 5 * (base - 1):
        raise ValueError(f"need at least {5 * (base - 1)} values for base {base}, got {n}")
    expected = n * digit_law(base)
    stat = float(np.sum((counts - expected) ** 2 / expected))
    return stat, base - 2


@dataclass
class SignificandStats:
    """Aggregated mantissa and digit statistics for one collection."""

    base: int
    count: int
    digit_counts: np.ndarray
    mantissa_samples: np.ndarray  # sorted, in [0, 1)
    P_of_s: Callable[[float], float] = field(compare=False)
    curve: np.ndarray | None = None  # rows (s, P(s), log_B s)

    def ks(self) -> float:
        return _ks_uniform(self.mantissa_samples)

    def merge(self, other: "SignificandStats") -> "SignificandStats":
        """Combine two aggregations; associative and commutative."""
        if self.base != other.base:
            raise ValueError("cannot merge stats over different bases")
        merged = np.sort(np.concatenate([self.mantissa_samples, other.mantissa_samples]))
        return _build_stats(self.base, merged, self.digit_counts + other.digit_counts)


def _proportion_fn(base: int, sorted_mantissas: np.ndarray) -> Callable[[float], float]:
    def proportion(s: float) -> float:
        if not 1.0 <= s < base:
            raise ValueError(f"threshold s must lie in [1, {base}), got {s}")
        edge = math.log(s, base) + TIE_TOL
        return float(np.searchsorted(sorted_mantissas, edge, side="right")) / sorted_mantissas.size

    return proportion


def _build_stats(base: int, sorted_mantissas: np.ndarray, digit_counts: np.ndarray,
                 s_grid: Sequence[float] | None = None) -> SignificandStats:
    fn = _proportion_fn(base, sorted_mantissas)
    curve = None
    if s_grid is not None:
        rows = [(float(s), fn(float(s)), benford_cdf(base, float(s))) for s in s_grid]
        curve = np.asarray(rows)
    return SignificandStats(
        base=base,
        count=sorted_mantissas.size,
        digit_counts=digit_counts,
        mantissa_samples=sorted_mantissas,
        P_of_s=fn,
        curve=curve,
    )


def proportion_curve(log_values, base: int = 10,
                     s_grid: Sequence[float] | None = None) -> SignificandStats:
    """Empirical P(s) = #{significand <= s} / count, plus digit counts.

    P(1) is the fraction of significands exactly 1 (mantissa 0). The
    curve over `s_grid`, when given, is stored as (s, P(s), log_B s)
    rows.
    """
    mant = np.sort(mantissas(log_values, base))
    counts = leading_digit_counts(log_values, base)
    return _build_stats(base, mant, counts, s_grid)


def default_s_grid(base: int = 10, size: int = 64) -> np.ndarray:
    """Logarithmically spaced thresholds strictly inside (1, B)."""
    u = np.linspace(0.0, 1.0, size + 2)[1:-1]
    return float(base) ** u
