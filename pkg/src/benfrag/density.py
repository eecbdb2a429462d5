"""Cut-proportion densities on the open unit interval.

Four base shapes are supported — uniform, power (f(t) = (a+1) t^a),
triangular with a given mode, and piecewise-linear tables — plus two
derived forms: the mirrored density f(1 - t) and the half-sum
symmetrization (f(t) + f(1 - t)) / 2. Every density validates its own
normalization by quadrature at construction and samples by exact
inverse-CDF transform of a counter-addressed uniform stream, so sampling
is reproducible across runs and thread counts.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .quadrature import adaptive_simpson
from .rng import RngSpec, uniform_at, uniform_block

NORMALIZATION_TOL = 1e-9
QUAD_TOL = 1e-10
_KINDS = ("uniform", "power", "triangular", "table")
# Namespace for redraw-round sub-streams; keeps boundary rejections a pure
# function of (seed, stream, index, round).
_REDRAW_NAMESPACE = 0x52454452_00000000
_MAX_REDRAW_ROUNDS = 64


@dataclass(frozen=True, eq=False)
class Density:
    """A probability density on (0, 1).

    Do not call the constructor directly in normal use; the factories
    `uniform`, `power`, `triangular`, `table` and the `mirror` /
    `symmetrize` methods produce validated instances.
    """

    kind: str
    alpha: float | None = None
    mode: float | None = None
    knots: np.ndarray | None = None  # (k, 2) normalized [t, f(t)] rows
    mirrored: bool = False
    symmetrized: bool = False

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "power":
            if self.alpha is None or not math.isfinite(self.alpha) or self.alpha < 0:
                raise ValueError(
                    "power density needs alpha >= 0; densities unbounded at an endpoint "
                    "cannot be certified by the construction quadrature"
                )
        if self.kind == "triangular":
            if self.mode is None or not 0.0 <= self.mode <= 1.0:
                raise ValueError("triangular density needs a mode in [0, 1]")
        if self.kind == "table":
            self._validate_knots()
        integral, _ = adaptive_simpson(
            self.pdf, 0.0, 1.0, tol=QUAD_TOL, breakpoints=self.breakpoints()
        )
        if abs(integral - 1.0) > NORMALIZATION_TOL:
            raise ValueError(
                f"density does not integrate to 1 (quadrature gives {integral:.12g})"
            )

    def _validate_knots(self) -> None:
        knots = self.knots
        if knots is None or knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 2:
            raise ValueError("table density needs at least two (t, f) knots")
        t, f = knots[:, 0], knots[:, 1]
        if not (np.all(np.isfinite(knots)) and np.all(f >= 0.0)):
            raise ValueError("table knots must be finite with f >= 0")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("table knots must lie inside [0, 1]; the sampler cannot "
                             "guarantee (0, 1) support otherwise")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("table knot positions must be strictly increasing")
        area = float(np.trapezoid(f, t))
        if not area > 0.0:
            raise ValueError("table density has zero mass")

    # ------------------------------------------------------------------
    # pointwise evaluation

    def _base_pdf(self, t: np.ndarray) -> np.ndarray:
        inside = (t >= 0.0) & (t <= 1.0)
        tc = np.clip(t, 0.0, 1.0)
        if self.kind == "uniform":
            out = np.ones_like(tc)
        elif self.kind == "power":
            a = self.alpha
            out = (a + 1.0) * np.power(tc, a)
        elif self.kind == "triangular":
            c = self.mode
            if c == 0.0:
                out = 2.0 * (1.0 - tc)
            elif c == 1.0:
                out = 2.0 * tc
            else:
                with np.errstate(over="ignore"):  # tiny c: unused branch overflows
                    out = np.where(tc <= c, 2.0 * tc / c, 2.0 * (1.0 - tc) / (1.0 - c))
        else:
            kt, kf = self.knots[:, 0], self.knots[:, 1]
            out = np.interp(tc, kt, kf, left=0.0, right=0.0)
            out = np.where((tc < kt[0]) | (tc > kt[-1]), 0.0, out)
        return np.where(inside, out, 0.0)

    def pdf(self, t) -> np.ndarray | float:
        """Pointwise value; zero outside [0, 1]."""
        arr = np.asarray(t, dtype=np.float64)
        q = self._base_pdf(1.0 - arr) if self.mirrored else self._base_pdf(arr)
        if self.symmetrized:
            q_ref = self._base_pdf(arr) if self.mirrored else self._base_pdf(1.0 - arr)
            q = 0.5 * (q + q_ref)
        return float(q) if np.isscalar(t) else q

    # ------------------------------------------------------------------
    # sampling

    def _base_icdf(self, u: np.ndarray) -> np.ndarray:
        if self.kind == "uniform":
            return u.copy()
        if self.kind == "power":
            return np.power(u, 1.0 / (self.alpha + 1.0))
        if self.kind == "triangular":
            c = self.mode
            left = np.sqrt(u * c) if c > 0.0 else np.zeros_like(u)
            right = 1.0 - np.sqrt((1.0 - u) * (1.0 - c))
            return np.where(u <= c, left, right)
        kt, kf = self.knots[:, 0], self.knots[:, 1]
        widths = np.diff(kt)
        areas = 0.5 * (kf[:-1] + kf[1:]) * widths
        cum = np.concatenate([[0.0], np.cumsum(areas)])
        cum /= cum[-1]
        seg = np.clip(np.searchsorted(cum, u, side="right") - 1, 0, len(widths) - 1)
        du = u - cum[seg]
        f0 = kf[seg]
        slope = (kf[seg + 1] - kf[seg]) / widths[seg]
        # Solve f0*x + slope*x^2/2 = du * total_area; cum is renormalized so
        # the per-segment mass is areas[seg]/sum, hence rescale du back.
        du = du * float(np.sum(areas))
        disc = np.sqrt(np.maximum(f0 * f0 + 2.0 * slope * du, 0.0))
        denom = f0 + disc
        x = np.where(denom > 0.0, 2.0 * du / np.where(denom > 0.0, denom, 1.0), 0.0)
        return kt[seg] + np.minimum(x, widths[seg])

    def _icdf(self, u: np.ndarray) -> np.ndarray:
        if self.symmetrized:
            u = np.asarray(u)
            first = u < 0.5
            vals = np.empty_like(u)
            vals[first] = self._flag_icdf(2.0 * u[first])
            vals[~first] = 1.0 - self._flag_icdf(2.0 * u[~first] - 1.0)
            return vals
        return self._flag_icdf(u)

    def _flag_icdf(self, u: np.ndarray) -> np.ndarray:
        base = self._base_icdf(np.asarray(u))
        return 1.0 - base if self.mirrored else base

    def sample(self, rng: RngSpec, count: int, *, offset: int = 0) -> np.ndarray:
        """Draw `count` values, strictly inside (0, 1).

        `offset` addresses the underlying uniform stream, so disjoint
        blocks of one stream can be produced independently (the
        fragmenter uses this for counter-addressed cuts). Values landing
        exactly on 0 or 1 are redrawn from per-round derived streams at
        the same absolute indices.
        """
        if count < 1:
            raise ValueError("count must be >= 1")
        values = self._icdf(uniform_block(rng, offset, count))
        bad = ~((values > 0.0) & (values < 1.0))
        round_no = 0
        while bad.any():
            round_no += 1
            if round_no > _MAX_REDRAW_ROUNDS:
                raise RuntimeError(
                    "sampler cannot produce values inside (0, 1); density is degenerate"
                )
            sub = rng.derive(_REDRAW_NAMESPACE + round_no)
            idx = np.flatnonzero(bad)
            values[idx] = self._icdf(uniform_at(sub, idx + offset))
            bad = ~((values > 0.0) & (values < 1.0))
        return values

    # ------------------------------------------------------------------
    # derived densities

    def mirror(self) -> "Density":
        """The density of 1 - P when P follows this density."""
        if self.symmetrized or self.kind == "uniform":
            return self
        if self.kind == "triangular" and not self.mirrored:
            return dataclasses.replace(self, mode=1.0 - self.mode)
        # power and table flip a flag: evaluation reflects the argument, so
        # mirror of mirror is bitwise the original density.
        return dataclasses.replace(self, mirrored=not self.mirrored)

    def symmetrize(self) -> "Density":
        """Half-sum symmetrization g(t) = (f(t) + f(1 - t)) / 2.

        Returns self unchanged when the density is already symmetric
        about 1/2, which also makes the operation exactly idempotent.
        """
        if self.symmetrized or self._is_symmetric():
            return self
        return dataclasses.replace(self, symmetrized=True)

    def _is_symmetric(self) -> bool:
        grid = np.linspace(0.0, 1.0, 513)
        gap = np.max(np.abs(self.pdf(grid) - self.pdf(1.0 - grid)))
        return bool(gap <= 1e-13 * max(1.0, self.pdf_bound()))

    # ------------------------------------------------------------------
    # structure queries

    def breakpoints(self) -> list[float]:
        """pdf kink positions inside (0, 1), for quadrature panel edges."""
        pts: set[float] = set()
        if self.kind == "triangular":
            pts.add(float(self.mode))
        elif self.kind == "table":
            pts.update(float(t) for t in self.knots[:, 0])
        base = {p for p in pts if 0.0 < p < 1.0}
        if self.mirrored or self.symmetrized:
            reflected = {1.0 - p for p in base}
            base = base | reflected if self.symmetrized else reflected
        return sorted(base)

    def support(self) -> tuple[float, float]:
        """Smallest closed interval carrying all the mass."""
        if self.kind == "table":
            lo, hi = float(self.knots[0, 0]), float(self.knots[-1, 0])
        else:
            lo, hi = 0.0, 1.0
        if self.mirrored:
            lo, hi = 1.0 - hi, 1.0 - lo
        if self.symmetrized:
            lo, hi = min(lo, 1.0 - hi), max(hi, 1.0 - lo)
        return lo, hi

    def pdf_bound(self) -> float:
        """An upper bound for the pdf over [0, 1]."""
        if self.kind == "uniform":
            return 1.0
        if self.kind == "power":
            return self.alpha + 1.0
        if self.kind == "triangular":
            return 2.0
        return float(np.max(self.knots[:, 1]))

    def descriptor(self) -> dict[str, Any]:
        """JSON-ready description; accepted back by `from_config`."""
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "power":
            out["alpha"] = self.alpha
        elif self.kind == "triangular":
            out["mode"] = self.mode
        elif self.kind == "table":
            out["knots"] = [[float(t), float(f)] for t, f in self.knots]
        if self.mirrored:
            out["mirrored"] = True
        if self.symmetrized:
            out["symmetrized"] = True
        return out


# ----------------------------------------------------------------------
# factories


def uniform() -> Density:
    return Density(kind="uniform")


def power(alpha: float) -> Density:
    """f(t) = (alpha + 1) t^alpha on (0, 1); alpha >= 0."""
    return Density(kind="power", alpha=float(alpha))


def triangular(mode: float) -> Density:
    """Triangular density on (0, 1) peaking at `mode` (height 2)."""
    return Density(kind="triangular", mode=float(mode))


def table(knots: Sequence[Sequence[float]]) -> Density:
    """Piecewise-linear density through (t, f) knots, renormalized to mass 1."""
    arr = np.asarray(knots, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValueError("table density needs at least two (t, f) knots")
    if np.any(np.diff(arr[:, 0]) <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("table knot positions must be finite and strictly increasing")
    area = float(np.trapezoid(arr[:, 1], arr[:, 0]))
    if not area > 0.0:
        raise ValueError("table density has zero mass")
    normalized = arr.copy()
    normalized[:, 1] /= area
    return Density(kind="table", knots=normalized)


def from_config(config: str | dict[str, Any]) -> Density:
    """Build a density from its JSON description."""
    obj = json.loads(config) if isinstance(config, str) else dict(config)
    kind = obj.get("kind")
    if kind == "uniform":
        d = uniform()
    elif kind == "power":
        d = power(obj["alpha"])
    elif kind == "triangular":
        d = triangular(obj["mode"])
    elif kind == "table":
        d = table(obj["knots"])
    else:
        raise ValueError(f"unknown density kind {kind!r}")
    if obj.get("mirrored"):
        d = dataclasses.replace(d, mirrored=True)
    if obj.get("symmetrized"):
        d = dataclasses.replace(d, symmetrized=True)
    return d
