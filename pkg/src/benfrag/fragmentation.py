"""The unrestricted m-dimensional box fragmentation process.

Each iteration cuts every piece once along each of the m axes with fresh
independent proportions. Cuts are numbered globally: at step
t = 1..N*m there are 2^(t-1) pieces, ordered left to right, and piece j
of that row is cut with proportion index 2^(t-1) - 1 + j along axis
((t-1) mod m) + 1; a leaf is the bit path of left/right choices, where
bit 0 keeps the p side and bit 1 the (1-p) side. After N iterations the
tree has consumed 2^(N*m) - 1 proportions and holds (2^m)^N leaves.

Edges are tracked as log10 so deep runs never underflow; the proportion
at global index i is addressed by stream position i - 1, which keeps
full runs, subtree expansion, and the closed-form oracle in exact
agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .density import Density
from .rng import RngSpec, uniform_block

FULL_MODE_LEAF_CAP = 2 ** 24


class CapExceededError(ValueError):
    """Full-mode leaf count above the desk-scale cap."""


@dataclass(frozen=True)
class FragConfig:
    """Run description: dimension, iterations, cut density, stream, mode."""

    m: int
    n_iter: int
    density: Density
    rng: RngSpec
    initial_edges: tuple[float, ...] | None = None
    mode: str = "full"
    leaves: int | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("dimension m must be >= 1")
        if self.n_iter < 1:
            raise ValueError("iteration count must be >= 1")
        if self.mode not in ("full", "sample"):
            raise ValueError(f"mode must be 'full' or 'sample', got {self.mode!r}")
        if self.mode == "full":
            if self.leaf_count() > FULL_MODE_LEAF_CAP:
                raise CapExceededError(
                    f"full mode would produce {self.leaf_count()} pieces; "
                    f"cap is {FULL_MODE_LEAF_CAP} — use sample mode"
                )
        elif self.leaves is None or self.leaves < 1:
            raise ValueError("sample mode needs leaves >= 1")
        if self.initial_edges is not None:
            if len(self.initial_edges) != self.m:
                raise ValueError("initial_edges must have one entry per axis")
            if any(not (e > 0.0 and math.isfinite(e)) for e in self.initial_edges):
                raise ValueError("initial edges must be positive and finite")

    def depth(self) -> int:
        """Path length N*m."""
        return self.n_iter * self.m

    def leaf_count(self) -> int:
        return 2 ** self.depth()

    def edges(self) -> np.ndarray:
        if self.initial_edges is None:
            return np.ones(self.m)
        return np.asarray(self.initial_edges, dtype=np.float64)

    def initial_volume(self) -> float:
        return float(np.prod(self.edges()))


@dataclass(frozen=True)
class BoxPiece:
    """One leaf: log10 edge lengths plus its left/right cut path."""

    log_edges: tuple[float, ...]
    path: str

    def __post_init__(self) -> None:
        if any(not math.isfinite(e) for e in self.log_edges):
            raise ValueError("non-finite log edge")
        if self.path.strip("01"):
            raise ValueError("path must be a bit string")

    @property
    def log_volume(self) -> float:
        return float(sum(self.log_edges))


@dataclass
class PieceSet:
    """All pieces of a run, stored columnwise; indexable as BoxPiece."""

    log_edges: np.ndarray  # (count, m) log10 edge lengths
    paths: np.ndarray  # (count,) path bits as integers, first cut at the MSB
    depth: int
    config: FragConfig

    @property
    def log_volumes(self) -> np.ndarray:
        return self.log_edges.sum(axis=1)

    def __len__(self) -> int:
        return self.log_edges.shape[0]

    def __getitem__(self, i: int) -> BoxPiece:
        return BoxPiece(
            log_edges=tuple(float(v) for v in self.log_edges[i]),
            path=format(int(self.paths[i]), f"0{self.depth}b"),
        )

    def __iter__(self) -> Iterator[BoxPiece]:
        return (self[i] for i in range(len(self)))


def axis_of_step(t: int, m: int) -> int:
    """Zero-based axis cut at global step t (1-based)."""
    return (t - 1) % m


def cut_sequence(cfg: FragConfig) -> np.ndarray:
    """All 2^(N*m) - 1 cut proportions of a full run, index i at [i-1]."""
    return cfg.density.sample(cfg.rng, cfg.leaf_count() - 1, offset=0)


def fragment_full(cfg: FragConfig, *, axis_order: Sequence[int] | None = None) -> PieceSet:
    """Enumerate every leaf of the tree, in path order.

    `axis_order` permutes which axis is cut first within an iteration
    (cut values keep their global indices); it exists to check that the
    leaf-volume multiset does not depend on that choice.
    """
    if cfg.mode != "full":
        raise ValueError("fragment_full requires a full-mode config")
    order = tuple(range(cfg.m)) if axis_order is None else tuple(axis_order)
    if sorted(order) != list(range(cfg.m)):
        raise ValueError("axis_order must be a permutation of the axes")

    acc = np.zeros((1, cfg.m))
    for t in range(1, cfg.depth() + 1):
        row = 2 ** (t - 1)
        p = cfg.density.sample(cfg.rng, row, offset=row - 1)
        step_log = np.empty(2 * row)
        step_log[0::2] = np.log10(p)
        step_log[1::2] = np.log10(1.0 - p)
        if not np.all(np.isfinite(step_log)):
            raise FloatingPointError("non-finite log edge: density sampler left (0, 1)")
        acc = np.repeat(acc, 2, axis=0)
        acc[:, order[axis_of_step(t, cfg.m)]] += step_log
    # Initial-edge logs enter once at the end, so rescaling the box shifts
    # every leaf without touching the accumulated cut factors.
    log_edges = acc + np.log10(cfg.edges())[None, :]
    paths = np.arange(cfg.leaf_count(), dtype=np.int64)
    return PieceSet(log_edges=log_edges, paths=paths, depth=cfg.depth(), config=cfg)


def fragment_sample(cfg: FragConfig) -> PieceSet:
    """Draw independent leaves distributed as a uniformly chosen leaf
    of a full tree: each walks root-to-leaf with fresh cuts and a fair
    left/right choice per cut."""
    if cfg.mode != "sample":
        raise ValueError("fragment_sample requires a sample-mode config")
    k, nm = cfg.leaves, cfg.depth()
    cuts = cfg.density.sample(cfg.rng, k * nm, offset=0).reshape(k, nm)
    sides = (uniform_block(cfg.rng, k * nm, k * nm) < 0.5).reshape(k, nm)
    kept = np.where(sides, cuts, 1.0 - cuts)
    step_log = np.log10(kept)
    if not np.all(np.isfinite(step_log)):
        raise FloatingPointError("non-finite log edge: density sampler left (0, 1)")
    # Walk order is axis 0..m-1 within each iteration.
    per_axis = step_log.reshape(k, cfg.n_iter, cfg.m).sum(axis=1)
    log_edges = np.log10(cfg.edges())[None, :] + per_axis
    bits = (~sides).astype(np.int64)  # bit 0 = kept the p side
    weights = 1 << np.arange(nm - 1, -1, -1, dtype=np.int64)
    paths = bits @ weights
    return PieceSet(log_edges=log_edges, paths=paths, depth=nm, config=cfg)


def closed_form_leaf(cfg: FragConfig, cuts: Sequence[float], path: str | Sequence[int]) -> float:
    """Evaluate one leaf volume directly from explicit cut proportions.

    `cuts` holds proportions indexed 1..2^(N*m) - 1 at positions 0.., and
    `path` the left/right bits; this is the brute-force oracle checked
    against fragment_full.
    """
    bits = [int(b) for b in path]
    if len(bits) != cfg.depth():
        raise ValueError(f"path must have length {cfg.depth()}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("path must be a bit sequence")
    value = cfg.initial_volume()
    node = 1
    for t, bit in enumerate(bits, start=1):
        index = 2 ** (t - 1) - 1 + node
        if not 1 <= index <= len(cuts):
            raise IndexError(f"cut index {index} out of range")
        p = cuts[index - 1]
        value *= (1.0 - p) if bit else p
        node = 2 * node - 1 + bit
    return value


def shared_factor_count(a: BoxPiece, b: BoxPiece) -> int:
    """Number of common leading cut factors before the paths diverge."""
    if len(a.path) != len(b.path):
        raise ValueError("pieces come from runs of different depth")
    for i, (x, y) in enumerate(zip(a.path, b.path)):
        if x != y:
            return i
    return len(a.path)


def _elementary_symmetric(values: np.ndarray, d: int) -> np.ndarray:
    """e_d per row of `values` (rows are the m edge lengths of a piece)."""
    n, m = values.shape
    coeff = np.zeros((n, d + 1))
    coeff[:, 0] = 1.0
    for j in range(m):
        upper = min(j + 1, d)
        for k in range(upper, 0, -1):
            coeff[:, k] += coeff[:, k - 1] * values[:, j]
    return coeff[:, d]


def lower_dim_content(piece: BoxPiece, d: int) -> float:
    """Total d-dimensional face content 2^(m-d) * e_d(edge lengths).

    Reproduces perimeter at (m=2, d=1), surface area at (m=3, d=2), and
    the volume itself at d = m.
    """
    m = len(piece.log_edges)
    if not 1 <= d <= m:
        raise ValueError("content dimension must satisfy 1 <= d <= m")
    return float(10.0 ** log10_contents(np.asarray([piece.log_edges]), d)[0])


def log10_contents(log_edges: np.ndarray, d: int) -> np.ndarray:
    """log10 of the d-dimensional content per piece, with the largest
    log edge factored out so the symmetric polynomial never underflows."""
    log_edges = np.atleast_2d(log_edges)
    m = log_edges.shape[1]
    if not 1 <= d <= m:
        raise ValueError("content dimension must satisfy 1 <= d <= m")
    top = log_edges.max(axis=1)
    scaled = 10.0 ** (log_edges - top[:, None])
    e_d = _elementary_symmetric(scaled, d)
    return (m - d) * math.log10(2.0) + d * top + np.log10(e_d)
