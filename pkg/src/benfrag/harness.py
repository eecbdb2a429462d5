"""Experiment orchestration: convergence sweeps, dependency profiling,
and lower-dimensional-content trend runs.

Trials use disjoint sub-streams derived from (seed, trial index) and are
reduced in trial order, so results are identical for any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import mellin
from .benford import TIE_TOL, chi_square_digits, mantissas, mantissa_discrepancy
from .density import Density, from_config
from .fragmentation import (
    CapExceededError,
    FragConfig,
    PieceSet,
    fragment_full,
    fragment_sample,
    log10_contents,
)
from .rng import RngSpec


@dataclass(frozen=True)
class ExperimentPlan:
    """Sweep description; mirrors the plan.json schema field for field."""

    m: int
    density: Density
    rng: RngSpec
    trials: int
    s_values: tuple[float, ...]
    n_sweep: tuple[int, ...]
    d_targets: tuple[int, ...] = ()
    mode: str = "full"
    leaves: int | None = None
    initial_edges: tuple[float, ...] | None = None
    base: int = 10
    lmax: int = mellin.DEFAULT_LMAX
    out: str | None = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.n_sweep:
            raise ValueError("n_sweep must not be empty")
        for s in self.s_values:
            if not 1.0 < s < self.base:
                raise ValueError(f"s values must lie in (1, {self.base}), got {s}")
        for d in self.d_targets:
            if not 1 <= d <= self.m:
                raise ValueError(f"d targets must lie in 1..{self.m}, got {d}")

    def frag_config(self, n_iter: int, trial: int) -> FragConfig:
        return FragConfig(
            m=self.m,
            n_iter=n_iter,
            density=self.density,
            rng=self.rng.derive(trial),
            initial_edges=self.initial_edges,
            mode=self.mode,
            leaves=self.leaves,
        )


@dataclass
class ConvergenceRow:
    """One (N, s) cell of an expectation/variance sweep."""

    m: int
    n_iter: int
    s: float
    trials: int
    mean_p: float
    var_p: float
    theory: float
    bound: float
    note: str = ""

    @property
    def abs_error(self) -> float:
        return abs(self.mean_p - self.theory)


def plan_from_config(config: str | dict[str, Any]) -> ExperimentPlan:
    obj = json.loads(config) if isinstance(config, str) else dict(config)
    return ExperimentPlan(
        m=int(obj["m"]),
        density=from_config(obj.get("density", {"kind": "uniform"})),
        rng=RngSpec(int(obj.get("seed", 0)), int(obj.get("stream", 0))),
        trials=int(obj.get("trials", 1)),
        s_values=tuple(float(s) for s in obj.get("s_values", [])),
        n_sweep=tuple(int(n) for n in obj.get("n_sweep", [])),
        d_targets=tuple(int(d) for d in obj.get("d_targets", [])),
        mode=obj.get("mode", "full"),
        leaves=obj.get("leaves"),
        initial_edges=tuple(obj["initial_edges"]) if obj.get("initial_edges") else None,
        base=int(obj.get("base", 10)),
        lmax=int(obj.get("lmax", mellin.DEFAULT_LMAX)),
        out=obj.get("out"),
    )


def plan_to_config(plan: ExperimentPlan) -> dict[str, Any]:
    return {
        "m": plan.m,
        "density": plan.density.descriptor(),
        "seed": plan.rng.seed,
        "stream": plan.rng.stream,
        "trials": plan.trials,
        "s_values": list(plan.s_values),
        "n_sweep": list(plan.n_sweep),
        "d_targets": list(plan.d_targets),
        "mode": plan.mode,
        "leaves": plan.leaves,
        "initial_edges": list(plan.initial_edges) if plan.initial_edges else None,
        "base": plan.base,
        "lmax": plan.lmax,
        "out": plan.out,
    }


def _trial_proportions(plan: ExperimentPlan, n_iter: int, trial: int) -> np.ndarray:
    """P_N(s) for every s of the plan, from one fragmentation run."""
    cfg = plan.frag_config(n_iter, trial)
    pieces = fragment_full(cfg) if plan.mode == "full" else fragment_sample(cfg)
    mant = mantissas(pieces.log_volumes, plan.base)
    edges = np.array([math.log(s, plan.base) + TIE_TOL for s in plan.s_values])
    return (mant[None, :] <= edges[:, None]).mean(axis=1)


def _run_trials(plan: ExperimentPlan, n_iter: int, threads: int) -> np.ndarray:
    """(trials, len(s_values)) matrix of per-trial proportions, reduced
    in trial order regardless of worker count."""
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda t: _trial_proportions(plan, n_iter, t), range(plan.trials)
            ))
    else:
        results = [_trial_proportions(plan, n_iter, t) for t in range(plan.trials)]
    return np.vstack(results)


def _sweep(plan: ExperimentPlan, threads: int) -> list[ConvergenceRow]:
    rows: list[ConvergenceRow] = []
    for n_iter in plan.n_sweep:
        try:
            matrix = _run_trials(plan, n_iter, threads)
        except CapExceededError as exc:
            for s in plan.s_values:
                rows.append(ConvergenceRow(
                    m=plan.m, n_iter=n_iter, s=s, trials=plan.trials,
                    mean_p=math.nan, var_p=math.nan,
                    theory=math.log(s, plan.base), bound=math.nan,
                    note=f"cap-exceeded: {exc}",
                ))
            continue
        for j, s in enumerate(plan.s_values):
            samples = matrix[:, j]
            theory = math.log(s, plan.base)
            bound = mellin.expectation_error_bound(
                plan.density, n_iter * plan.m, plan.base, (0.0, theory), plan.lmax
            )
            var_p = float(np.var(samples, ddof=1)) if plan.trials > 1 else math.nan
            note = "" if plan.trials > 1 else "variance-undefined"
            row = ConvergenceRow(
                m=plan.m, n_iter=n_iter, s=s, trials=plan.trials,
                mean_p=float(samples.mean()), var_p=var_p,
                theory=theory, bound=bound, note=note,
            )
            if plan.trials > 1 and row.abs_error > bound + 3.0 * math.sqrt(var_p / plan.trials):
                row.note = "bound-exceeded"
            rows.append(row)
    return rows


def run_expectation(plan: ExperimentPlan, threads: int = 1) -> list[ConvergenceRow]:
    """Trial means of P_N(s) across the N sweep, with the product-of-cuts
    deviation bound carried per row."""
    return _sweep(plan, threads)


def run_variance(plan: ExperimentPlan, threads: int = 1) -> list[ConvergenceRow]:
    """Unbiased across-trial variance of P_N(s); full mode only, since
    sampled leaves lack the within-tree dependence the variance is about."""
    if plan.mode != "full":
        raise ValueError(
            "variance sweeps need full mode: sampled leaves are independent and miss "
            "the within-tree dependence"
        )
    return _sweep(plan, threads)


@dataclass
class DependencyRow:
    shared: int
    pair_count: int
    mean_phi_product: float  # nan when the stratum is empty
    reference: float


@dataclass
class DependencyProfile:
    """Ordered-pair statistics stratified by shared leading factors."""

    s: float
    rows: list[DependencyRow]
    cutoff: int  # M = ceil(ln N)
    high_fraction: float
    expected_high_fraction: float
    exact: bool = True


def dependency_profile(pieces: PieceSet, s: float, base: int = 10) -> DependencyProfile:
    """Stratify all ordered leaf pairs of a full run by the number of
    shared leading cut factors.

    Counts are exact at every size below the full-mode cap: pairs
    sharing at least k factors are aggregated per prefix group, so no
    pair is ever enumerated.
    """
    cfg = pieces.config
    if cfg.mode != "full":
        raise ValueError("dependency profiles need a full-mode run")
    depth = pieces.depth
    n = len(pieces)
    phi = (mantissas(pieces.log_volumes, base) <= math.log(s, base) + TIE_TOL).astype(np.float64)
    phi_total = float(phi.sum())

    # at_least[k]: ordered pairs (i != j) agreeing on >= k factors, and the
    # matching sum of phi_i * phi_j, via per-prefix group aggregation.
    at_least = np.empty(depth + 2, dtype=np.int64)
    phi_at_least = np.empty(depth + 2, dtype=np.float64)
    for k in range(depth + 1):
        prefix = pieces.paths >> (depth - k)
        group_counts = np.bincount(prefix)
        group_phi = np.bincount(prefix, weights=phi)
        at_least[k] = int(np.sum(group_counts.astype(np.int64) ** 2)) - n
        phi_at_least[k] = float(np.sum(group_phi ** 2)) - phi_total
    at_least[depth + 1] = 0
    phi_at_least[depth + 1] = 0.0

    reference = math.log(s, base) ** 2
    rows = []
    for mu in range(depth + 1):
        count = int(at_least[mu] - at_least[mu + 1])
        total = phi_at_least[mu] - phi_at_least[mu + 1]
        mean = total / count if count else math.nan
        rows.append(DependencyRow(shared=mu, pair_count=count,
                                  mean_phi_product=mean, reference=reference))

    cutoff = math.ceil(math.log(cfg.n_iter)) if cfg.n_iter > 1 else 0
    high = int(at_least[min(cutoff + 1, depth + 1)])
    total_pairs = int(at_least[0])
    return DependencyProfile(
        s=s,
        rows=rows,
        cutoff=cutoff,
        high_fraction=high / total_pairs if total_pairs else math.nan,
        expected_high_fraction=2.0 ** -(cutoff + 1),
    )


@dataclass
class ConjectureRow:
    """Trend cell for d-dimensional contents at one sweep point."""

    m: int
    d: int
    n_iter: int
    count: int
    ks: float
    chi_square: float
    monotone: bool = False


def run_conjecture(plan: ExperimentPlan, threads: int = 1) -> list[ConjectureRow]:
    """KS and chi-square trends of d-dimensional contents across the N
    sweep. Emits trends only: no pass/fail verdicts, the underlying
    claim is conjectural."""
    if not plan.d_targets:
        raise ValueError("conjecture runs need at least one d target")

    def one_trial(n_iter: int, trial: int) -> PieceSet:
        cfg = plan.frag_config(n_iter, trial)
        return fragment_full(cfg) if plan.mode == "full" else fragment_sample(cfg)

    rows: list[ConjectureRow] = []
    for d in plan.d_targets:
        cells = []
        for n_iter in plan.n_sweep:
            if threads > 1:
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    runs = list(pool.map(lambda t: one_trial(n_iter, t), range(plan.trials)))
            else:
                runs = [one_trial(n_iter, t) for t in range(plan.trials)]
            ks_vals, chi_vals, count = [], [], 0
            for pieces in runs:
                logs = log10_contents(pieces.log_edges, d)
                ks_vals.append(mantissa_discrepancy(logs, plan.base))
                if len(pieces) >= 5 * (plan.base - 1):
                    chi_vals.append(chi_square_digits(logs, plan.base)[0])
                else:
                    chi_vals.append(math.nan)  # below the chi-square minimum count
                count = len(pieces)
            cells.append(ConjectureRow(
                m=plan.m, d=d, n_iter=n_iter, count=count,
                ks=float(np.mean(ks_vals)), chi_square=float(np.mean(chi_vals)),
            ))
        monotone = all(cells[i + 1].ks <= cells[i].ks for i in range(len(cells) - 1))
        for cell in cells:
            cell.monotone = monotone
        rows.extend(cells)
    return rows
