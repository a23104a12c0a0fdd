"""Exhaustive subset enumeration, the ground truth for optimizer tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criterion import CriterionEngine, KernelConfig, int_to_mask, mask_names, mask_to_hex
from .datasets import Dataset

DEFAULT_MAX_N = 20


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Optimum over every non-empty mask, plus the best losing fitness.

    runner_up_fitness is the highest fitness among masks other than
    best_mask; None only when a single candidate exists (N = 1).
    """

    best_mask: np.ndarray
    best_fitness: float
    evaluated: int
    runner_up_fitness: float | None


def exhaustive_best(
    ds: Dataset, kcfg: KernelConfig = KernelConfig(), max_n: int = DEFAULT_MAX_N
) -> OracleResult:
    """Score all 2^N - 1 non-empty masks and return the certified optimum.

    Ties are broken toward smaller popcount, then smaller mask integer, so
    the result is reproducible when distinct masks score identically. The
    max_n guard caps the exponential sweep.
    """
    n = ds.n_features
    if n > max_n:
        raise ValueError(f"N={n} exceeds max_n={max_n}")
    engine = CriterionEngine(ds, kcfg)
    best_value = -np.inf
    best_mask: np.ndarray | None = None
    best_bits = 0
    runner_up: float | None = None
    for value_int in range(1, 1 << n):
        mask = int_to_mask(value_int, n)
        score = engine.evaluate(mask).gc
        bits = int(mask.sum())
        if score > best_value or (score == best_value and bits < best_bits):
            if best_mask is not None:
                runner_up = best_value if runner_up is None else max(runner_up, best_value)
            best_value = score
            best_mask = mask
            best_bits = bits
        else:
            runner_up = score if runner_up is None else max(runner_up, score)
    return OracleResult(
        best_mask=best_mask,
        best_fitness=float(best_value),
        evaluated=(1 << n) - 1,
        runner_up_fitness=runner_up,
    )


def oracle_to_dict(result: OracleResult, feature_names=None) -> dict:
    """JSON-ready form of an OracleResult."""
    out = {
        "best_mask": mask_to_hex(result.best_mask),
        "best_fitness": result.best_fitness,
        "evaluated": result.evaluated,
        "runner_up_fitness": result.runner_up_fitness,
    }
    if feature_names is not None:
        out["best_features"] = mask_names(result.best_mask, feature_names)
    return out
