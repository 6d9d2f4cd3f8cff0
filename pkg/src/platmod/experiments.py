"""Parameter sweeps, SBM Monte-Carlo averaging, bloc-migration validation,
and the CSV/PGM artifact surfaces.

All outputs are deterministic functions of their spec (including seeds):
samples use seed base_seed + sample_index regardless of execution order, and
results are collected in row-major (p index, b_a index) order, so repeated
runs produce byte-identical files even under parallel execution.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adoption import Assignment, run_adoption
from .errors import InvalidParamsError
from .graph import Network, SbmSpec, gen_linear, gen_regular_tree, gen_sbm, gen_star_chain
from .model import ModelParams, Platform, trust_threshold
from .regulation import (
    RegulationKind,
    sender_equilibrium,
    strictest_effective_regulation,
)

SWEEP_CSV_HEADER = "p,b_A,samples,n_no_effective,n_any,n_moderate,mean_rho_se,seed_base"
A1_CSV_HEADER = "theta_JJ,seed,n_users_B,irregular_choices"


def chain_theta(sizes, diag, bridge_expect: float = 4.0) -> tuple[tuple[float, ...], ...]:
    """Community-chain link matrix: dense within, bridge_expect expected
    links between adjacent communities, none beyond."""
    m = len(sizes)
    diag = [diag] * m if np.isscalar(diag) else list(diag)
    th = [[0.0] * m for _ in range(m)]
    for i in range(m):
        th[i][i] = float(diag[i])
        if i + 1 < m:
            th[i][i + 1] = th[i + 1][i] = bridge_expect / (sizes[i] * sizes[i + 1])
    return tuple(tuple(row) for row in th)


def complete_theta(sizes, diag, bridge_expect: float = 4.0) -> tuple[tuple[float, ...], ...]:
    """Complete graph of communities: every pair bridged with bridge_expect
    expected links, so the physical structure is size-invariant."""
    m = len(sizes)
    diag = [diag] * m if np.isscalar(diag) else list(diag)
    th = [[0.0] * m for _ in range(m)]
    for i in range(m):
        th[i][i] = float(diag[i])
        for j in range(i + 1, m):
            th[i][j] = th[j][i] = bridge_expect / (sizes[i] * sizes[j])
    return tuple(tuple(row) for row in th)


@dataclass(frozen=True)
class NetworkRecipe:
    """Generator kind plus arguments; builds a concrete network per seed.

    Deterministic kinds (linear, star_chain, tree) ignore the seed. The c
    payoffs live here because they are user attributes, not world params.
    """

    kind: str
    args: dict = field(default_factory=dict)

    def build(self, seed: int = 0) -> Network:
        a = self.args
        if self.kind == "linear":
            return gen_linear(a["n"], c=a.get("c", 0.3))
        if self.kind == "star_chain":
            return gen_star_chain(a["n_hubs"], a["r"], c=a.get("c", 0.3))
        if self.kind == "tree":
            return gen_regular_tree(a["r"], a["depth"], c=a.get("c", 0.3))
        if self.kind == "sbm":
            c = a.get("c", 0.3)
            return gen_sbm(
                SbmSpec(
                    sizes=tuple(a["sizes"]),
                    theta=tuple(tuple(row) for row in a["theta"]),
                    sender_community=a.get("sender_community", 0),
                    sender_attach=a.get("sender_attach"),
                    seed=seed,
                    c_by_community=tuple(c) if not np.isscalar(c) else c,
                )
            )
        raise InvalidParamsError(f"unknown recipe kind {self.kind!r}")

    @property
    def deterministic(self) -> bool:
        return self.kind != "sbm"


@dataclass(frozen=True)
class SweepSpec:
    """Grid over (p, b_a) with per-cell Monte-Carlo samples.

    samples should be 1 for deterministic recipes; SBM figures use 50.
    """

    p_range: tuple[float, float, int]
    ba_range: tuple[float, float, int]
    recipe: NetworkRecipe
    mu: float = 0.2
    b_b: float = 0.0
    samples: int = 1
    base_seed: int = 0

    def __post_init__(self):
        if self.p_range[2] < 2 or self.ba_range[2] < 2:
            raise InvalidParamsError("ranges need at least 2 steps")
        if self.samples < 1:
            raise InvalidParamsError("samples must be >= 1")

    def p_values(self) -> np.ndarray:
        lo, hi, steps = self.p_range
        return np.linspace(lo, hi, steps)

    def ba_values(self) -> np.ndarray:
        lo, hi, steps = self.ba_range
        return np.linspace(lo, hi, steps)

    def seeds(self) -> tuple[int, ...]:
        return tuple(self.base_seed + s for s in range(self.samples))


@dataclass
class CellStats:
    p: float
    b_a: float
    samples: int
    n_no_effective: int
    n_any: int
    n_moderate: int
    mean_rho_se: float | None
    seeds: tuple[int, ...]
    error: str | None = None


@dataclass
class HeatmapGrid:
    spec: SweepSpec
    cells: list[CellStats]  # row-major: p index outer, b_a index inner

    def cell(self, p_idx: int, ba_idx: int) -> CellStats:
        return self.cells[p_idx * self.spec.ba_range[2] + ba_idx]

    def any_boundary_b_a(self, p_idx: int, quota: float = 1.0) -> float | None:
        """Smallest b_a whose cell reports AnyRegulation in at least a quota
        fraction of samples; None if no column cell reaches it."""
        steps = self.spec.ba_range[2]
        for ba_idx in range(steps):
            cell = self.cell(p_idx, ba_idx)
            if cell.samples and cell.n_any >= quota * cell.samples:
                return cell.b_a
        return None


def _column_results(task) -> tuple[int, int, list]:
    recipe, seed, mu, b_b, p_idx, p, ba_values, grid_fallback = task
    network = recipe.build(seed)
    out = []
    for b_a in ba_values:
        try:
            params = ModelParams(mu=mu, p=float(p), b_a=float(b_a), b_b=b_b)
            res = strictest_effective_regulation(network, params, grid_fallback=grid_fallback)
            out.append((res.kind.value, res.rho_se))
        except Exception as exc:  # recorded per cell, sweep continues
            out.append(("error", f"{type(exc).__name__}: {exc}"))
    return seed, p_idx, out


def sweep(spec: SweepSpec, workers: int = 1, grid_fallback: bool = False) -> HeatmapGrid:
    """Evaluate strictest_effective_regulation over the grid.

    Tasks are one (sample, p column) each; results depend only on the spec
    and sample index, never on scheduling.
    """
    p_values = spec.p_values()
    ba_values = spec.ba_values()
    tasks = [
        (spec.recipe, seed, spec.mu, spec.b_b, p_idx, p, tuple(ba_values), grid_fallback)
        for seed in spec.seeds()
        for p_idx, p in enumerate(p_values)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_column_results, tasks, chunksize=1))
    else:
        results = [_column_results(t) for t in tasks]
    by_key = {(seed, p_idx): out for seed, p_idx, out in results}

    cells: list[CellStats] = []
    for p_idx, p in enumerate(p_values):
        for ba_idx, b_a in enumerate(ba_values):
            n_no = n_any = n_mod = 0
            rhos = []
            errors = []
            for seed in spec.seeds():
                kind, value = by_key[(seed, p_idx)][ba_idx]
                if kind == RegulationKind.NO_EFFECTIVE_REGULATION.value:
                    n_no += 1
                elif kind == RegulationKind.ANY_REGULATION.value:
                    n_any += 1
                elif kind == RegulationKind.MODERATE.value:
                    n_mod += 1
                    rhos.append(value)
                else:
                    errors.append(value)
            cells.append(
                CellStats(
                    p=float(p),
                    b_a=float(b_a),
                    samples=n_no + n_any + n_mod,
                    n_no_effective=n_no,
                    n_any=n_any,
                    n_moderate=n_mod,
                    mean_rho_se=(sum(rhos) / len(rhos)) if rhos else None,
                    seeds=spec.seeds(),
                    error="; ".join(errors) if errors else None,
                )
            )
    return HeatmapGrid(spec=spec, cells=cells)


def irregular_choices(network: Network, assignment: Assignment) -> int:
    """Sum over communities of min(#users on A, #users on B): zero exactly
    when every community votes as a bloc."""
    labels = network.communities
    m = network.n_communities
    on_b = np.bincount(labels, weights=assignment.on_b.astype(float), minlength=m)
    totals = np.bincount(labels, minlength=m)
    return int(np.minimum(on_b, totals - on_b).sum())


@dataclass
class A1Row:
    theta_jj: float
    seed: int
    n_users_b: int
    irregular: int


@dataclass
class A1Report:
    rows: list[A1Row]
    skipped: list[tuple[float, int]]  # (theta_jj, seed) where rho_se was already 0


def validate_assumption1(
    theta_jj_values,
    seeds,
    sizes=(30, 30, 30),
    bridge_expect: float = 4.0,
    mu: float = 0.2,
    c: float = 0.3,
    p: float = 0.7,
    b_a: float = 0.002,
    b_b: float = 0.0,
) -> A1Report:
    """Bloc-migration check: force the sender off platform A with a zero cap
    and record how raggedly communities split.

    Cells where even the zero cap retains the sender (so nobody moves) are
    skipped rather than reported as trivially regular.
    """
    rows: list[A1Row] = []
    skipped: list[tuple[float, int]] = []
    for theta_jj in theta_jj_values:
        theta = chain_theta(sizes, theta_jj, bridge_expect)
        for seed in seeds:
            network = gen_sbm(
                SbmSpec(sizes=tuple(sizes), theta=theta, seed=seed, c_by_community=c)
            )
            params = ModelParams(mu=mu, p=p, b_a=b_a, b_b=b_b, rho_a=0.0)
            decision = sender_equilibrium(network, params)
            if decision.platform is Platform.A:
                skipped.append((float(theta_jj), seed))
                continue
            outcome = run_adoption(network, params, decision.beta_star, Platform.B)
            rows.append(
                A1Row(
                    theta_jj=float(theta_jj),
                    seed=seed,
                    n_users_b=int(outcome.assignment.on_b.sum()),
                    irregular=irregular_choices(network, outcome.assignment),
                )
            )
    return A1Report(rows=rows, skipped=skipped)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def sweep_csv_text(grid: HeatmapGrid) -> str:
    lines = [SWEEP_CSV_HEADER]
    for cell in grid.cells:
        lines.append(
            ",".join(
                [
                    _fmt(cell.p),
                    _fmt(cell.b_a),
                    str(cell.samples),
                    str(cell.n_no_effective),
                    str(cell.n_any),
                    str(cell.n_moderate),
                    _fmt(cell.mean_rho_se),
                    str(grid.spec.base_seed),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def a1_csv_text(report: A1Report) -> str:
    lines = [A1_CSV_HEADER]
    for row in report.rows:
        lines.append(
            f"{_fmt(row.theta_jj)},{row.seed},{row.n_users_b},{row.irregular}"
        )
    return "\n".join(lines) + "\n"


def emit_csv(obj, path) -> None:
    """Write a sweep grid or an assumption report as CSV."""
    text = sweep_csv_text(obj) if isinstance(obj, HeatmapGrid) else a1_csv_text(obj)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def read_sweep_csv(path) -> list[dict]:
    """Inverse of sweep_csv_text for round-trip checks."""
    with open(path, newline="") as fh:
        out = []
        for rec in csv.DictReader(fh):
            out.append(
                {
                    "p": float(rec["p"]),
                    "b_A": float(rec["b_A"]),
                    "samples": int(rec["samples"]),
                    "n_no_effective": int(rec["n_no_effective"]),
                    "n_any": int(rec["n_any"]),
                    "n_moderate": int(rec["n_moderate"]),
                    "mean_rho_se": float(rec["mean_rho_se"]) if rec["mean_rho_se"] else None,
                    "seed_base": int(rec["seed_base"]),
                }
            )
        return out


def _cell_gray(cell: CellStats, beta_prime: float) -> int:
    """Mean over samples of the per-sample gray level: AnyRegulation is 255,
    NoEffectiveRegulation 0, a moderate cap linearly in between."""
    if cell.samples == 0:
        return 0
    total = 255.0 * cell.n_any
    if cell.n_moderate and cell.mean_rho_se is not None:
        level = 255.0 * (1.0 - cell.mean_rho_se / beta_prime)
        total += cell.n_moderate * min(max(level, 0.0), 255.0)
    return int(round(total / cell.samples))


def pgm_text(grid: HeatmapGrid, beta_prime: float | None = None) -> str:
    """ASCII portable graymap: one row per b_a value, one column per p."""
    spec = grid.spec
    if beta_prime is None:
        c = spec.recipe.args.get("c", 0.3)
        c_ref = float(np.max(c)) if not np.isscalar(c) else float(c)
        beta_prime = trust_threshold(spec.mu, c_ref)
    p_steps, ba_steps = spec.p_range[2], spec.ba_range[2]
    rows = []
    for ba_idx in range(ba_steps):
        rows.append(
            " ".join(
                str(_cell_gray(grid.cell(p_idx, ba_idx), beta_prime))
                for p_idx in range(p_steps)
            )
        )
    return f"P2\n{p_steps} {ba_steps}\n255\n" + "\n".join(rows) + "\n"


def emit_pgm(grid: HeatmapGrid, path, beta_prime: float | None = None) -> None:
    try:
        Path(path).write_text(pgm_text(grid, beta_prime))
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc
