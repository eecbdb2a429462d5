"""Mellin-transform values and product error bounds for cut densities.

For a density f on (0, 1) the transform at the points 1 - i*theta(l),
theta(l) = 2*pi*l / ln(B), is

    M(l) = integral_0^1 f(t) t^(-i*theta) dt,

the l-th Fourier coefficient of the log-base-B mantissa density. A
product of n independent cuts has mantissa distribution within
(b - a) * sum_{l != 0} |M(l)|^n of uniform on any interval [a, b] mod 1;
truncated versions of that sum are what this module reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .density import Density
from .quadrature import adaptive_simpson

DEFAULT_LMAX = 1000
_QUAD_TOL = 1e-10
_magnitude_cache: dict[tuple[str, int, int], np.ndarray] = {}


@dataclass(frozen=True)
class MellinPoint:
    """Transform value at 1 - 2*pi*i*ell / ln(base)."""

    ell: int
    base: int
    value: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class MellinReport:
    """Truncated condition sum for a product of `factors` equal cuts."""

    density: dict[str, Any]
    base: int
    factors: int
    lmax: int
    magnitudes: np.ndarray = field(repr=False)  # |M(l)|, l = 1..lmax
    condition_sum: float
    tail_estimate: float
    symmetrized: bool = True


def frequency(ell: int, base: int) -> float:
    """theta(l) = 2*pi*l / ln(base); ln, not log10, so that the uniform
    density's closed form 1 / (1 - i*theta) holds."""
    return 2.0 * math.pi * ell / math.log(base)


def analytic_uniform(ell: int, base: int) -> complex:
    """Closed form for the uniform density: 1 / (1 - i*theta)."""
    if ell == 0:
        return complex(1.0, 0.0)
    return 1.0 / (1.0 - 1j * frequency(ell, base))


def mellin_quadrature(d: Density, ell: int, base: int = 10, *, tol: float = _QUAD_TOL) -> complex:
    """Transform value by adaptive Simpson on real and imaginary parts.

    Substituting t = exp(-x) turns the integral into
    integral_0^inf f(exp(-x)) exp(-x) exp(i*theta*x) dx, whose
    oscillation is uniform in x; it is truncated where the exp(-x)
    envelope falls below tol / 10 and panelled at half-periods pi/theta.
    """
    theta = frequency(ell, base)
    lo_t, hi_t = d.support()
    x_lo = -math.log(hi_t) if hi_t < 1.0 else 0.0
    x_cap = math.log(max(d.pdf_bound(), 1.0) * 10.0 / tol)
    x_hi = x_cap if lo_t <= 0.0 else min(-math.log(lo_t), x_cap)
    if x_hi <= x_lo:
        return complex(0.0, 0.0)

    def envelope(x: np.ndarray) -> np.ndarray:
        t = np.exp(-x)
        return d.pdf(t) * t

    breaks = [-math.log(p) for p in d.breakpoints() if math.exp(-x_hi) < p < math.exp(-x_lo)]
    panels = max(8, math.ceil(abs(theta) * (x_hi - x_lo) / math.pi))
    re, _ = adaptive_simpson(
        lambda x: envelope(x) * np.cos(theta * x),
        x_lo, x_hi, tol=tol, breakpoints=breaks, min_panels=panels,
    )
    im, _ = adaptive_simpson(
        lambda x: envelope(x) * np.sin(theta * x),
        x_lo, x_hi, tol=tol, breakpoints=breaks, min_panels=panels,
    )
    return complex(re, im)


def mellin_at(d: Density, ell: int, base: int = 10) -> MellinPoint:
    """Transform value; exact 1 at l = 0, closed form for the uniform
    density, adaptive quadrature otherwise."""
    if base < 2:
        raise ValueError("base must be >= 2")
    if ell == 0:
        return MellinPoint(0, base, complex(1.0, 0.0))
    if d.kind == "uniform":
        return MellinPoint(ell, base, analytic_uniform(ell, base))
    return MellinPoint(ell, base, mellin_quadrature(d, ell, base))


def _magnitudes(d: Density, base: int, lmax: int) -> np.ndarray:
    """|M(l)| for l = 1..lmax of the symmetrized density, cached by
    density descriptor."""
    sym = d.symmetrize()
    key = (json.dumps(sym.descriptor(), sort_keys=True), base, lmax)
    hit = _magnitude_cache.get(key)
    if hit is not None:
        return hit
    if sym.kind == "uniform":
        theta = 2.0 * math.pi * np.arange(1, lmax + 1) / math.log(base)
        mags = 1.0 / np.sqrt(1.0 + theta * theta)
    else:
        mags = np.array([abs(mellin_quadrature(sym, ell, base)) for ell in range(1, lmax + 1)])
    _magnitude_cache[key] = mags
    return mags


def condition_sum(d: Density, factors: int, base: int = 10, lmax: int = DEFAULT_LMAX) -> MellinReport:
    """Sum over 0 < |l| <= lmax of |M(l)|^factors, on the symmetrized density.

    Conjugate symmetry of real densities pairs +l with -l, so the sum is
    2 * sum_{l=1..lmax}, accumulated in ascending l. The tail beyond lmax
    is estimated by integral comparison against the |M| ~ c/l decay; for
    factors = 1 that comparison integral diverges and the tail is +inf.
    """
    if factors < 1:
        raise ValueError("factors must be >= 1")
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    if base < 2:
        raise ValueError("base must be >= 2")
    sym = d.symmetrize()
    mags = _magnitudes(d, base, lmax)
    terms = mags ** factors
    total = 2.0 * float(np.add.reduce(terms))
    if factors == 1:
        tail = math.inf
    else:
        tail = 2.0 * float(mags[-1] ** factors) * lmax / (factors - 1)
    return MellinReport(
        density=sym.descriptor(),
        base=base,
        factors=factors,
        lmax=lmax,
        magnitudes=mags,
        condition_sum=total,
        tail_estimate=tail,
    )


def expectation_error_bound(
    d: Density,
    factors: int,
    base: int = 10,
    interval: tuple[float, float] = (0.0, 1.0),
    lmax: int = DEFAULT_LMAX,
) -> float:
    """(b - a) times the condition sum: bounds the deviation of the
    product-of-`factors`-cuts mantissa from uniform on [a, b]."""
    a, b = interval
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError("interval must satisfy 0 <= a <= b <= 1")
    if a == b:
        return 0.0
    return (b - a) * condition_sum(d, factors, base, lmax).condition_sum


def dependence_bound(
    d: Density,
    total_factors: int,
    shared: int,
    base: int = 10,
    interval: tuple[float, float] = (0.0, 1.0),
    lmax: int = DEFAULT_LMAX,
) -> float:
    """Error bound left after two pieces share `shared` leading cuts.

    The pieces' remaining products have total_factors - (shared + 1)
    independent factors each; the bound is (b - a) times the truncated
    condition sum at that exponent. With shared = total_factors - 1 the
    exponent is 0, every term is 1, and the truncated sum is 2 * lmax.
    """
    a, b = interval
    if not (0.0 <= a <= b <= 1.0):
        raise ValueError("interval must satisfy 0 <= a <= b <= 1")
    if not 0 <= shared <= total_factors - 1:
        raise ValueError("shared factor count must satisfy 0 <= shared <= total_factors - 1")
    remaining = total_factors - (shared + 1)
    if remaining == 0:
        return (b - a) * 2.0 * lmax
    return (b - a) * condition_sum(d, remaining, base, lmax).condition_sum
