"""Reference optimizers sharing the memetic module's fitness and logging.

Three kinds are provided for head-to-head studies: a tournament GA with
elitism, a sigmoid-transfer binary PSO, and the plain binary DE (fixed
control parameters, no local refinement). Each honors the same determinism
and termination contracts as run_ma, so comparison tables mix them freely.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, replace
from statistics import fmean

import numpy as np

from .criterion import KernelConfig
from .datasets import Dataset
from .memetic import (
    FitnessCache,
    GenerationRecord,
    MAConfig,
    SelectionResult,
    bde_crossover,
    bde_mutate,
    group_variance,
    repair_empty,
    run_ma,
)

BASELINE_KINDS = ("GA", "BPSO", "BDE")

# Plain BDE runs at the midpoint of the adaptive ranges.
BDE_F = 0.65
BDE_CR = 0.55

# A run's final fitness counts as a success when it comes within this
# distance of the study's reference optimum.
SUCCESS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BaselineConfig:
    """Configuration shared by the three comparison optimizers."""

    kind: str = "BDE"
    np: int = 80
    g_max: int = 300
    ga_crossover: float = 0.85
    ga_mutation: float = 0.01
    pso_c1: float = 2.0
    pso_c2: float = 2.0
    pso_inertia: float = 1.0
    pso_vmax: float = 4.0
    fitness_stop: float = 0.9950
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in BASELINE_KINDS:
            raise ValueError(f"kind must be one of {BASELINE_KINDS}, got {self.kind!r}")
        minimum = 4 if self.kind == "BDE" else 2
        if self.np < minimum:
            raise ValueError(f"np must be at least {minimum} for {self.kind}")
        if self.g_max < 0:
            raise ValueError("g_max must be non-negative")
        for name in ("ga_crossover", "ga_mutation"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.pso_vmax <= 0:
            raise ValueError("pso_vmax must be positive")


def _random_population(n_pop: int, n_features: int, rng) -> np.ndarray:
    pop = rng.integers(0, 2, size=(n_pop, n_features), dtype=np.uint8)
    for i in range(n_pop):
        repair_empty(pop[i], rng)
    return pop


def _record(g, fits, best_f, best_mask, f_g, cr_g, cache, t0) -> GenerationRecord:
    return GenerationRecord(
        g=g,
        best_fitness=float(best_f),
        mean_fitness=float(np.mean(fits)),
        sigma_sq=group_variance(fits),
        f_g=f_g,
        cr_g=cr_g,
        best_mask=np.asarray(best_mask, dtype=np.uint8).copy(),
        evaluations_so_far=cache.evaluations,
        elapsed_ms=(time.perf_counter() - t0) * 1000.0,
    )


def _tournament(fits: np.ndarray, rng) -> int:
    a, b = rng.integers(fits.size, size=2)
    return int(a) if fits[int(a)] >= fits[int(b)] else int(b)


def _run_ga(ds: Dataset, kcfg: KernelConfig, cfg: BaselineConfig, workers: int) -> SelectionResult:
    rng = np.random.default_rng(cfg.seed)
    cache = FitnessCache(ds, kcfg, workers=workers)
    try:
        t0 = time.perf_counter()
        n = ds.n_features
        pop = _random_population(cfg.np, n, rng)
        fits = np.asarray(cache.batch(list(pop)))
        log: list[GenerationRecord] = []
        terminated_by = "generation_limit"
        for g in range(1, cfg.g_max + 1):
            elite = pop[int(np.argmax(fits))].copy()
            children = [elite]
            while len(children) < cfg.np:
                a = _tournament(fits, rng)
                b = _tournament(fits, rng)
                if rng.random() < cfg.ga_crossover:
                    from_a = rng.random(n) < 0.5
                    child = np.where(from_a, pop[a], pop[b]).astype(np.uint8)
                else:
                    child = pop[a].copy()
                flips = rng.random(n) < cfg.ga_mutation
                child = np.bitwise_xor(child, flips.astype(np.uint8))
                repair_empty(child, rng)
                children.append(child)
            pop = np.stack(children)
            fits = np.asarray(cache.batch(list(pop)))
            best_idx = int(np.argmax(fits))
            log.append(_record(g, fits, fits[best_idx], pop[best_idx], None, None, cache, t0))
            if log[-1].best_fitness > cfg.fitness_stop:
                terminated_by = "fitness_stop"
                break
        best_idx = int(np.argmax(fits))
        return SelectionResult(
            best_mask=pop[best_idx].copy(),
            best_fitness=float(fits[best_idx]),
            log=log,
            terminated_by=terminated_by,
            total_evaluations=cache.evaluations,
        )
    finally:
        cache.close()


def _run_bpso(ds: Dataset, kcfg: KernelConfig, cfg: BaselineConfig, workers: int) -> SelectionResult:
    rng = np.random.default_rng(cfg.seed)
    cache = FitnessCache(ds, kcfg, workers=workers)
    try:
        t0 = time.perf_counter()
        n = ds.n_features
        pos = _random_population(cfg.np, n, rng)
        vel = np.zeros((cfg.np, n), dtype=np.float64)
        fits = np.asarray(cache.batch(list(pos)))
        pbest = pos.copy()
        pbest_f = fits.copy()
        g_idx = int(np.argmax(pbest_f))
        gbest = pbest[g_idx].copy()
        gbest_f = float(pbest_f[g_idx])
        log: list[GenerationRecord] = []
        terminated_by = "generation_limit"
        for g in range(1, cfg.g_max + 1):
            for i in range(cfg.np):
                u1 = rng.random(n)
                u2 = rng.random(n)
                here = pos[i].astype(np.float64)
                vel[i] = (
                    cfg.pso_inertia * vel[i]
                    + cfg.pso_c1 * u1 * (pbest[i].astype(np.float64) - here)
                    + cfg.pso_c2 * u2 * (gbest.astype(np.float64) - here)
                )
                np.clip(vel[i], -cfg.pso_vmax, cfg.pso_vmax, out=vel[i])
                transfer = 1.0 / (1.0 + np.exp(-vel[i]))
                pos[i] = (rng.random(n) < transfer).astype(np.uint8)
                repair_empty(pos[i], rng)
            fits = np.asarray(cache.batch(list(pos)))
            improved = fits > pbest_f
            pbest[improved] = pos[improved]
            pbest_f[improved] = fits[improved]
            g_idx = int(np.argmax(pbest_f))
            if float(pbest_f[g_idx]) > gbest_f:
                gbest = pbest[g_idx].copy()
                gbest_f = float(pbest_f[g_idx])
            log.append(_record(g, fits, gbest_f, gbest, None, None, cache, t0))
            if gbest_f > cfg.fitness_stop:
                terminated_by = "fitness_stop"
                break
        return SelectionResult(
            best_mask=gbest.copy(),
            best_fitness=gbest_f,
            log=log,
            terminated_by=terminated_by,
            total_evaluations=cache.evaluations,
        )
    finally:
        cache.close()


def _run_bde(ds: Dataset, kcfg: KernelConfig, cfg: BaselineConfig, workers: int) -> SelectionResult:
    rng = np.random.default_rng(cfg.seed)
    cache = FitnessCache(ds, kcfg, workers=workers)
    try:
        t0 = time.perf_counter()
        pop = _random_population(cfg.np, ds.n_features, rng)
        fits = np.asarray(cache.batch(list(pop)))
        log: list[GenerationRecord] = []
        terminated_by = "generation_limit"
        for g in range(1, cfg.g_max + 1):
            trials = np.empty_like(pop)
            for i in range(cfg.np):
                mutant = bde_mutate(pop, i, BDE_F, rng)
                trials[i] = bde_crossover(pop[i], mutant, BDE_CR, rng)
            trial_fits = np.asarray(cache.batch(list(trials)))
            keep = trial_fits >= fits
            pop = np.where(keep[:, None], trials, pop).astype(np.uint8)
            fits = np.where(keep, trial_fits, fits)
            best_idx = int(np.argmax(fits))
            log.append(_record(g, fits, fits[best_idx], pop[best_idx], BDE_F, BDE_CR, cache, t0))
            if log[-1].best_fitness > cfg.fitness_stop:
                terminated_by = "fitness_stop"
                break
        best_idx = int(np.argmax(fits))
        return SelectionResult(
            best_mask=pop[best_idx].copy(),
            best_fitness=float(fits[best_idx]),
            log=log,
            terminated_by=terminated_by,
            total_evaluations=cache.evaluations,
        )
    finally:
        cache.close()


_RUNNERS = {"GA": _run_ga, "BPSO": _run_bpso, "BDE": _run_bde}


def run_baseline(
    ds: Dataset,
    kcfg: KernelConfig,
    cfg: BaselineConfig,
    workers: int = 0,
) -> SelectionResult:
    """Run the optimizer named by cfg.kind on a standardized dataset."""
    runner = _RUNNERS.get(cfg.kind)
    if runner is None:
        raise ValueError(f"kind must be one of {BASELINE_KINDS}, got {cfg.kind!r}")
    return runner(ds, kcfg, cfg, workers)


@dataclass(frozen=True)
class ComparisonRow:
    """Aggregate of one optimizer's runs in a comparison study."""

    optimizer: str
    mean_time_s: float
    best_fitness: float
    mean_fitness: float
    success_rate_pct: float


def compare(
    ds: Dataset,
    kcfg: KernelConfig,
    kinds,
    runs: int = 1,
    seeds=None,
    ma_config: MAConfig | None = None,
    baseline_config: BaselineConfig | None = None,
    reference_fitness: float | None = None,
    workers: int = 0,
) -> list[ComparisonRow]:
    """Run each optimizer across seeds and aggregate a comparison table.

    kinds may contain "MA" and any of the baseline kinds. The success
    reference is, in order of preference: the explicit reference_fitness
    (e.g. a certified oracle optimum), else the best fitness any optimizer
    reached in this study.
    """
    if seeds is None:
        if runs < 1:
            raise ValueError("runs must be at least 1")
        seeds = list(range(runs))
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise ValueError("no seeds to run")
    finals: dict[str, list[float]] = {}
    times: dict[str, list[float]] = {}
    for kind in kinds:
        finals[kind] = []
        times[kind] = []
        for s in seeds:
            t0 = time.perf_counter()
            if kind == "MA":
                cfg = replace(ma_config or MAConfig(), seed=s)
                result = run_ma(ds, kcfg, cfg, workers=workers)
            else:
                cfg = replace(baseline_config or BaselineConfig(), kind=kind, seed=s)
                result = run_baseline(ds, kcfg, cfg, workers=workers)
            times[kind].append(time.perf_counter() - t0)
            finals[kind].append(result.best_fitness)
    reference = (
        reference_fitness
        if reference_fitness is not None
        else max(max(v) for v in finals.values())
    )
    rows = []
    for kind in kinds:
        values = finals[kind]
        wins = sum(1 for f in values if f >= reference - SUCCESS_TOLERANCE)
        rows.append(
            ComparisonRow(
                optimizer=kind,
                mean_time_s=fmean(times[kind]),
                best_fitness=max(values),
                mean_fitness=fmean(values),
                success_rate_pct=100.0 * wins / len(values),
            )
        )
    return rows


def compare_csv_text(rows) -> str:
    """Render comparison rows as CSV."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(
        ["optimizer", "mean_time_s", "best_fitness", "mean_fitness", "success_rate_pct"]
    )
    for row in rows:
        writer.writerow(
            [
                row.optimizer,
                repr(row.mean_time_s),
                repr(row.best_fitness),
                repr(row.mean_fitness),
                repr(row.success_rate_pct),
            ]
        )
    return buf.getvalue()


def write_compare_csv(rows, path) -> None:
    """Write a comparison table as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(compare_csv_text(rows))
