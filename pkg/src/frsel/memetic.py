"""Memetic feature-subset search.

Global exploration is a binary differential evolution whose control
parameters follow the population's fitness spread: a tight population gets a
strong mutation scale and a weak crossover rate, a scattered one the
opposite. The best individual of each generation is refined by a tabu local
search over bit flips and selected/unselected swaps, and the refined mask
replaces it when strictly better.

Determinism contract: all randomness flows through one np.random.Generator
consumed only on the sequential control path. Fitness evaluations may run on
worker threads but draw no random numbers, so results are identical for any
worker count.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .criterion import CriterionEngine, KernelConfig, mask_to_hex
from .datasets import Dataset

# Fitness assigned to the all-zeros mask: strictly below the criterion's
# lower bound of -0.5, so an empty subset can never win a comparison.
EMPTY_MASK_FITNESS = -1.0

# Guard for the variance denominator when the best fitness is near zero.
_VARIANCE_GUARD = 1e-12

# Largest tabu neighborhood scanned exactly; bigger ones are subsampled.
_TS_CANDIDATE_CAP = 500


@dataclass(frozen=True)
class MAConfig:
    """Knobs of the memetic run; defaults suit problems up to ~30 features."""

    np: int = 80
    g_max: int = 300
    f_min: float = 0.4
    f_max: float = 0.9
    cr_min: float = 0.3
    cr_max: float = 0.8
    tl: int = 20
    ts_iters: int = 200
    fitness_stop: float = 0.9950
    init_neighbors: int = 5
    elite_count: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.np < 4:
            raise ValueError("np must be at least 4 (mutation draws 3 donors)")
        if not 0 < self.f_min <= self.f_max:
            raise ValueError("need 0 < f_min <= f_max")
        if not 0 < self.cr_min <= self.cr_max <= 1:
            raise ValueError("need 0 < cr_min <= cr_max <= 1")
        for name in ("g_max", "tl", "ts_iters", "init_neighbors", "elite_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True, eq=False)
class GenerationRecord:
    """One generation's snapshot for the run log."""

    g: int
    best_fitness: float
    mean_fitness: float
    sigma_sq: float
    f_g: float | None
    cr_g: float | None
    best_mask: np.ndarray
    evaluations_so_far: int
    elapsed_ms: float


@dataclass(frozen=True, eq=False)
class SelectionResult:
    """Outcome of one optimizer run."""

    best_mask: np.ndarray
    best_fitness: float
    log: list[GenerationRecord]
    terminated_by: str  # "generation_limit" or "fitness_stop"
    total_evaluations: int


class FitnessCache:
    """Memoized subset fitness over one dataset.

    Keys are the raw mask bytes. `evaluations` counts distinct masks actually
    computed; cache hits do not move it. batch() deduplicates its inputs in
    first-occurrence order before (optionally parallel) computation, so the
    counter and the stored values never depend on the worker count.
    """

    def __init__(self, ds: Dataset, kcfg: KernelConfig, workers: int = 0):
        self._engine = CriterionEngine(ds, kcfg)
        self._table: dict[bytes, float] = {}
        self.evaluations = 0
        self._pool = (
            ThreadPoolExecutor(max_workers=workers) if workers and workers > 1 else None
        )

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None

    def _compute(self, mask: np.ndarray) -> float:
        if not mask.any():
            return EMPTY_MASK_FITNESS
        return self._engine.evaluate(mask).gc

    def __call__(self, mask) -> float:
        arr = np.asarray(mask, dtype=np.uint8)
        key = arr.tobytes()
        hit = self._table.get(key)
        if hit is not None:
            return hit
        value = self._compute(arr)
        self._table[key] = value
        self.evaluations += 1
        return value

    def batch(self, masks) -> list[float]:
        arrs = [np.asarray(m, dtype=np.uint8) for m in masks]
        keys = [a.tobytes() for a in arrs]
        missing: dict[bytes, np.ndarray] = {}
        for key, arr in zip(keys, arrs):
            if key not in self._table and key not in missing:
                missing[key] = arr
        if missing:
            todo = list(missing.values())
            if self._pool is not None and len(todo) > 1:
                values = list(self._pool.map(self._compute, todo))
            else:
                values = [self._compute(a) for a in todo]
            for key, value in zip(missing.keys(), values):
                self._table[key] = value
                self.evaluations += 1
        return [self._table[k] for k in keys]


def fitness(mask, ds: Dataset, kcfg: KernelConfig = KernelConfig()) -> float:
    """Criterion value of a mask; the empty mask gets the -1.0 sentinel."""
    arr = np.asarray(mask, dtype=np.uint8)
    if not arr.any():
        return EMPTY_MASK_FITNESS
    return CriterionEngine(ds, kcfg).evaluate(arr).gc


def group_variance(fitnesses) -> float:
    """Population spread: sum of squared deviations scaled by the best value.

    The denominator is max(|best|, 1e-12) so degenerate populations (all
    zeros, or sentinel-dominated early generations) stay finite.
    """
    f = np.asarray(fitnesses, dtype=np.float64)
    if f.size == 0:
        raise ValueError("empty fitness sequence")
    r = (f - f.mean()) / max(abs(float(f.max())), _VARIANCE_GUARD)
    return float((r * r).sum())


def adapt_params(sigma_sq: float, cfg: MAConfig) -> tuple[float, float]:
    """Generation controls (f_g, cr_g) from the current population spread."""
    if sigma_sq < 0:
        raise ValueError("sigma_sq must be non-negative")
    shrink = 1.0 - sigma_sq / cfg.np
    f_g = cfg.f_max - (cfg.f_max - cfg.f_min) * shrink
    cr_g = cfg.cr_min + (cfg.cr_max - cfg.cr_min) * shrink
    f_g = min(max(f_g, cfg.f_min), cfg.f_max)
    cr_g = min(max(cr_g, cfg.cr_min), cfg.cr_max)
    return f_g, cr_g


def mutant_from_donors(base, d1, d2, f_g: float, rng) -> np.ndarray:
    """Flip base bits where d1 and d2 disagree, each with probability f_g."""
    base = np.asarray(base, dtype=np.uint8)
    diff = np.bitwise_xor(np.asarray(d1, np.uint8), np.asarray(d2, np.uint8))
    gate = (rng.random(base.size) < f_g).astype(np.uint8)
    return np.bitwise_xor(base, diff & gate)


def bde_mutate(pop: np.ndarray, i: int, f_g: float, rng) -> np.ndarray:
    """Mutant for slot i from three distinct donors, none equal to i."""
    idx = rng.choice(pop.shape[0] - 1, size=3, replace=False)
    idx[idx >= i] += 1
    r1, r2, r3 = (int(v) for v in idx)
    return mutant_from_donors(pop[r1], pop[r2], pop[r3], f_g, rng)


def crossover_bits(target, mutant, j_rand: int, gate) -> np.ndarray:
    """Binomial mix: gated bits come from the mutant, j_rand always does."""
    trial = np.where(gate, mutant, target).astype(np.uint8)
    trial[j_rand] = mutant[j_rand]
    return trial


def bde_crossover(target, mutant, cr_g: float, rng) -> np.ndarray:
    """Randomized binomial crossover with one forced mutant position."""
    target = np.asarray(target, dtype=np.uint8)
    j_rand = int(rng.integers(target.size))
    gate = rng.random(target.size) < cr_g
    return crossover_bits(target, np.asarray(mutant, np.uint8), j_rand, gate)


def bde_select(target, trial, fitness_fn) -> np.ndarray:
    """Greedy survivor selection; exact ties keep the trial."""
    return trial if fitness_fn(trial) >= fitness_fn(target) else target


def _neighborhood_moves(mask: np.ndarray) -> list[tuple[int, ...]]:
    """Single-bit flips plus (selected, unselected) swaps.

    A move is the tuple of positions it toggles. Flips that would empty the
    mask are excluded so the walk never leaves the feasible space.
    """
    selected = np.flatnonzero(mask == 1)
    unselected = np.flatnonzero(mask == 0)
    moves: list[tuple[int, ...]] = []
    for p in range(mask.size):
        if mask[p] == 1 and selected.size == 1:
            continue
        moves.append((int(p),))
    for p in selected:
        for q in unselected:
            moves.append((int(p), int(q)))
    return moves


def _apply_move(mask: np.ndarray, move: tuple[int, ...]) -> np.ndarray:
    out = mask.copy()
    for p in move:
        out[p] ^= 1
    return out


def ts_local_search(start, cfg: MAConfig, fitness_fn, rng, trace=None) -> np.ndarray:
    """Tabu walk from a non-empty mask; returns the best mask encountered.

    Each iteration scans the neighborhood (subsampled to 500 moves when
    larger), takes the best move whose touched positions are all off the
    tabu list, and marks those positions tabu for the next cfg.tl
    iterations. A tabu move is admissible anyway when it beats the best
    fitness seen so far. If every move is tabu and none aspirates, the best
    forbidden move is taken so the walk cannot stall. Accepted moves may be
    worse than the current mask; that is the escape mechanism.

    `trace`, if given, receives (iteration, touched_positions, fitness) per
    accepted move.
    """
    current = np.asarray(start, dtype=np.uint8).copy()
    if not current.any():
        raise ValueError("empty start mask")
    best = current.copy()
    best_f = fitness_fn(current)
    expiry: dict[int, int] = {}
    for it in range(1, cfg.ts_iters + 1):
        moves = _neighborhood_moves(current)
        if not moves:
            break
        if len(moves) > _TS_CANDIDATE_CAP:
            pick = rng.choice(len(moves), size=_TS_CANDIDATE_CAP, replace=False)
            pick.sort()
            moves = [moves[p] for p in pick]
        candidates = [_apply_move(current, mv) for mv in moves]
        if hasattr(fitness_fn, "batch"):
            fits = fitness_fn.batch(candidates)
        else:
            fits = [fitness_fn(m) for m in candidates]
        chosen = None
        chosen_f = -np.inf
        chosen_mask = None
        banned = None
        banned_f = -np.inf
        banned_mask = None
        for mv, m, f in zip(moves, candidates, fits):
            tabu = any(expiry.get(p, 0) > it for p in mv)
            if not tabu or f > best_f:
                if f > chosen_f:
                    chosen, chosen_f, chosen_mask = mv, f, m
            elif f > banned_f:
                banned, banned_f, banned_mask = mv, f, m
        if chosen is None:
            chosen, chosen_f, chosen_mask = banned, banned_f, banned_mask
        current = chosen_mask
        for p in chosen:
            expiry[p] = it + cfg.tl
        if chosen_f > best_f:
            best = current.copy()
            best_f = chosen_f
        if trace is not None:
            trace.append((it, tuple(chosen), float(chosen_f)))
    return best


def repair_empty(mask: np.ndarray, rng) -> np.ndarray:
    """Set one uniform random bit if the mask is all zeros. In place."""
    if not mask.any():
        mask[int(rng.integers(mask.size))] = 1
    return mask


def init_population(n_features: int, cfg: MAConfig, fitness_fn, rng) -> np.ndarray:
    """Uniform random masks, repaired, then locally improved.

    Each mask is replaced by the best of itself and cfg.init_neighbors
    random single-bit-flip neighbors; the original wins ties.
    """
    pop = rng.integers(0, 2, size=(cfg.np, n_features), dtype=np.uint8)
    for i in range(cfg.np):
        repair_empty(pop[i], rng)
    for i in range(cfg.np):
        if cfg.init_neighbors == 0:
            continue
        flips = rng.integers(0, n_features, size=cfg.init_neighbors)
        candidates = [pop[i]]
        for p in flips:
            nb = pop[i].copy()
            nb[int(p)] ^= 1
            candidates.append(nb)
        if hasattr(fitness_fn, "batch"):
            fits = fitness_fn.batch(candidates)
        else:
            fits = [fitness_fn(m) for m in candidates]
        pop[i] = candidates[int(np.argmax(fits))]
    return pop


def run_ma(
    ds: Dataset,
    kcfg: KernelConfig,
    cfg: MAConfig,
    workers: int = 0,
) -> SelectionResult:
    """Full memetic run on an already standardized dataset."""
    rng = np.random.default_rng(cfg.seed)
    cache = FitnessCache(ds, kcfg, workers=workers)
    try:
        t0 = time.perf_counter()
        pop = init_population(ds.n_features, cfg, cache, rng)
        log: list[GenerationRecord] = []
        terminated_by = "generation_limit"
        fits = np.asarray(cache.batch(list(pop)))
        for g in range(1, cfg.g_max + 1):
            sigma_sq = group_variance(fits)
            f_g, cr_g = adapt_params(sigma_sq, cfg)
            trials = np.empty_like(pop)
            for i in range(cfg.np):
                mutant = bde_mutate(pop, i, f_g, rng)
                trials[i] = bde_crossover(pop[i], mutant, cr_g, rng)
            trial_fits = np.asarray(cache.batch(list(trials)))
            keep = trial_fits >= fits
            pop = np.where(keep[:, None], trials, pop).astype(np.uint8)
            fits = np.where(keep, trial_fits, fits)
            if cfg.elite_count > 0 and cfg.ts_iters > 0:
                for idx in np.argsort(-fits, kind="stable")[: cfg.elite_count]:
                    refined = ts_local_search(pop[idx], cfg, cache, rng)
                    refined_f = cache(refined)
                    if refined_f > fits[idx]:
                        pop[idx] = refined
                        fits[idx] = refined_f
            best_idx = int(np.argmax(fits))
            record = GenerationRecord(
                g=g,
                best_fitness=float(fits[best_idx]),
                mean_fitness=float(fits.mean()),
                sigma_sq=sigma_sq,
                f_g=f_g,
                cr_g=cr_g,
                best_mask=pop[best_idx].copy(),
                evaluations_so_far=cache.evaluations,
                elapsed_ms=(time.perf_counter() - t0) * 1000.0,
            )
            log.append(record)
            if record.best_fitness > cfg.fitness_stop:
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


def runlog_record_dict(record: GenerationRecord, include_timing: bool = True) -> dict:
    """JSON-ready dict for one generation record."""
    out = {
        "g": record.g,
        "best_fitness": record.best_fitness,
        "mean_fitness": record.mean_fitness,
        "sigma_sq": record.sigma_sq,
        "f_g": record.f_g,
        "cr_g": record.cr_g,
        "best_mask": mask_to_hex(record.best_mask),
        "evaluations_so_far": record.evaluations_so_far,
    }
    if include_timing:
        out["elapsed_ms"] = record.elapsed_ms
    return out


def runlog_lines(log, include_timing: bool = True) -> list[str]:
    """One JSON object per generation, ready for a .jsonl file."""
    return [json.dumps(runlog_record_dict(r, include_timing)) for r in log]


def write_runlog(log, path, include_timing: bool = True) -> None:
    """Write the run log as JSON lines."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in runlog_lines(log, include_timing):
            fh.write(line + "\n")
