"""End-to-end checks tying the whole package to its external contracts.

Each test prints one ACCEPTANCE line so a log scan shows the verdicts at a
glance. The heavyweight pieces (twenty seeded search runs on the benchmark
dataset, and the same twenty seeds for every baseline) are computed once in
module fixtures and shared.
"""

import json
import statistics
import time

import numpy as np
import pytest

from conftest import make_dataset, standardize
from frsel import (
    BaselineConfig,
    KernelConfig,
    MAConfig,
    SynthSpec,
    adapt_params,
    auc,
    eta,
    gc,
    group_variance,
    kappa,
    run_baseline,
    run_ma,
    save_csv,
    synth_clusters,
)
from frsel.baselines import BASELINE_KINDS
from frsel.cli import main
from frsel.evaluation import ConfusionMatrix
from reference import random_grid_case, reference_criterion

KCFG = KernelConfig()
SEEDS = range(20)
MATCH_TOL = 1e-9


def _report(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {number}: {status} - {detail}", flush=True)
    assert passed, f"acceptance {number} failed: {detail}"


@pytest.fixture(scope="module")
def ma_study(benchmark_ds, benchmark_oracle):
    results, times = [], []
    for s in SEEDS:
        t0 = time.perf_counter()
        results.append(run_ma(benchmark_ds, KCFG, MAConfig(seed=s)))
        times.append(time.perf_counter() - t0)
    return results, times


@pytest.fixture(scope="module")
def baseline_study(benchmark_ds):
    finals = {}
    for kind in BASELINE_KINDS:
        finals[kind] = [
            run_baseline(benchmark_ds, KCFG, BaselineConfig(kind=kind, seed=s)).best_fitness
            for s in SEEDS
        ]
    return finals


def test_acceptance_1_criterion_hand_values():
    t0 = time.perf_counter()
    coincident = gc(make_dataset([[0.0], [0.0]], [1, -1]), [1],
                    KernelConfig(n_k=1)).gc
    unit_gap = gc(make_dataset([[0.0], [1.0]], [1, -1]), [1],
                  KernelConfig(n_k=1)).gc
    separated = gc(
        make_dataset([[0.0], [0.1], [5.0], [5.1]], [1, 1, -1, -1]),
        [1], KernelConfig(n_k=1),
    ).gc
    elapsed = time.perf_counter() - t0
    ok = (
        abs(coincident - (-0.5)) < 1e-6
        and abs(unit_gap - 0.894811) < 1e-6
        and abs(separated - 1.0) < 1e-9
        and elapsed < 1.0
    )
    _report(1, ok, (
        f"hand values {coincident:.6f}/{unit_gap:.6f}/{separated:.6f} "
        f"vs -0.5/0.894811/1.0 in {elapsed:.3f}s"
    ))


def test_acceptance_2_reference_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(424242)
    worst = 0.0
    for _ in range(200):
        samples, labels, selected, delta, norm, n_k = random_grid_case(rng)
        ds = make_dataset(samples, labels)
        cfg = KernelConfig(delta=delta, per_feature_normalization=norm, n_k=n_k)
        mask = np.zeros(ds.n_features, dtype=np.uint8)
        mask[selected] = 1
        ref = reference_criterion(samples, labels, selected, delta, norm, n_k)
        got = gc(ds, mask, cfg)
        worst = max(
            worst,
            abs(got.g_gamma - ref[0]),
            abs(got.g_omega - ref[1]),
            abs(got.gc - ref[2]),
        )
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 30.0
    _report(2, ok, (
        f"200 random small datasets, max deviation {worst:.2e} "
        f"(tol 1e-12) in {elapsed:.1f}s"
    ))


def test_acceptance_3_value_bounds():
    t0 = time.perf_counter()
    rng = np.random.default_rng(77)
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(4, 21))
        nf = int(rng.integers(1, 7))
        labels = np.concatenate([[0, 1], rng.integers(0, 3, n - 2)])
        ds = make_dataset(rng.normal(scale=3.0, size=(n, nf)), labels)
        mask = rng.integers(0, 2, nf, dtype=np.uint8)
        if not mask.any():
            mask[int(rng.integers(nf))] = 1
        cfg = KernelConfig(
            delta=float(rng.uniform(0.05, 8.0)),
            per_feature_normalization=bool(rng.integers(2)),
            n_k=int(rng.integers(1, 5)),
        )
        v = gc(ds, mask, cfg)
        if not (0.0 <= v.g_gamma <= 1.0 and -1.0 <= v.g_omega <= 1.0
                and -0.5 <= v.gc <= 1.0):
            violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 60.0
    _report(3, ok, (
        f"1000 random (dataset, mask, config) triples, "
        f"{violations} bound violations in {elapsed:.1f}s"
    ))


def test_acceptance_4_adaptation_arithmetic():
    cfg = MAConfig()
    converged = adapt_params(0.0, cfg)
    spread = adapt_params(float(cfg.np), cfg)
    clamped = adapt_params(2.0 * cfg.np, cfg)
    variance = group_variance([1.0, 2.0, 3.0])
    ok = (
        converged == (0.4, 0.8)
        and spread == (0.9, 0.3)
        and clamped == (0.9, 0.3)
        and abs(variance - 0.222222) < 1e-6
    )
    _report(4, ok, (
        f"endpoints {converged}/{spread}, clamp {clamped}, "
        f"variance {variance:.6f} vs 0.222222"
    ))


def test_acceptance_5_search_recovers_certified_optimum(
    ma_study, benchmark_oracle
):
    results, times = ma_study
    matches = sum(
        1 for r in results
        if abs(r.best_fitness - benchmark_oracle.best_fitness) <= MATCH_TOL
    )
    median_s = statistics.median(times)
    ok = matches >= 18 and median_s <= 300.0
    _report(5, ok, (
        f"{matches}/20 runs match the certified optimum "
        f"{benchmark_oracle.best_fitness:.6f} within 1e-9; "
        f"median run {median_s:.1f}s (cap 300s)"
    ))


def test_acceptance_6_search_beats_or_ties_baselines(
    ma_study, baseline_study, benchmark_oracle
):
    results, _ = ma_study
    ma_finals = [r.best_fitness for r in results]
    reference = benchmark_oracle.best_fitness

    def success(values):
        return sum(1 for f in values if f >= reference - MATCH_TOL) / len(values)

    ma_mean = statistics.fmean(ma_finals)
    bde_mean = statistics.fmean(baseline_study["BDE"])
    ma_rate = success(ma_finals)
    rates = {kind: success(vals) for kind, vals in baseline_study.items()}
    ok = ma_mean >= bde_mean and all(ma_rate >= r for r in rates.values())
    _report(6, ok, (
        f"mean fitness MA {ma_mean:.6f} vs BDE {bde_mean:.6f}; "
        f"success MA {100 * ma_rate:.0f}% vs "
        + ", ".join(f"{k} {100 * v:.0f}%" for k, v in rates.items())
    ))


def test_acceptance_7_metric_arithmetic():
    k = kappa(ConfusionMatrix((0, 1), [[40, 10], [5, 45]]))
    area = auc([0.7, 0.1, 0.9, 0.5], [0, 0, 1, 1])
    eta_a = eta(0.9866, 0.973, 0.9869)
    eta_b = eta(0.9813, 0.962, 0.9832)
    ok = (
        abs(k - 0.7) < 1e-12
        and area == 0.75
        and abs(eta_a - 0.9822) < 5e-5
        and abs(eta_b - 0.9755) < 5e-5
    )
    _report(7, ok, (
        f"kappa {k:.12f} vs 0.7, auc {area} vs 0.75, "
        f"eta {eta_a:.4f}/{eta_b:.4f} vs 0.9822/0.9755"
    ))


def test_acceptance_8_cli_byte_determinism(tmp_path):
    spec = SynthSpec(n_informative=2, n_noise=4, samples_per_class=20,
                     cluster_separation=7.0)
    csv_path = tmp_path / "bench.csv"
    save_csv(synth_clusters(spec, seed=0), csv_path)
    flags = [
        "--ma.np=10", "--ma.g_max=6", "--ma.ts_iters=8", "--ma.tl=4",
        "--ma.init_neighbors=3",
    ]
    outs = [tmp_path / name for name in ("one", "two", "pooled")]
    for out, workers in zip(outs, ("0", "0", "2")):
        rc = main(["select", "--data", str(csv_path), "--out", str(out),
                   f"--workers={workers}", *flags])
        assert rc == 0
    same = all(
        (outs[0] / name).read_bytes() == (other / name).read_bytes()
        for other in outs[1:]
        for name in ("selection.json", "runlog.jsonl", "metrics.json")
    )
    chosen = json.loads((outs[0] / "selection.json").read_text())
    _report(8, same, (
        f"three select runs (workers 0/0/2) byte-identical; "
        f"picked {chosen['dimension']} features at fitness "
        f"{chosen['best_fitness']:.6f}"
    ))


def test_acceptance_9_termination_contract():
    spec = SynthSpec(n_informative=2, n_noise=3, samples_per_class=15)
    ds = standardize(synth_clusters(spec, seed=4))
    base = dict(np=8, g_max=5, tl=3, ts_iters=4, init_neighbors=2, seed=0)
    exhausted = run_ma(ds, KCFG, MAConfig(fitness_stop=2.0, **base))
    instant = run_ma(ds, KCFG, MAConfig(fitness_stop=-0.6, **base))
    ok = (
        exhausted.terminated_by == "generation_limit"
        and len(exhausted.log) == base["g_max"]
        and instant.terminated_by == "fitness_stop"
        and len(instant.log) == 1
    )
    _report(9, ok, (
        f"unreachable stop ran {len(exhausted.log)}/{base['g_max']} "
        f"generations ({exhausted.terminated_by}); trivial stop halted at "
        f"generation {len(instant.log)} ({instant.terminated_by})"
    ))
