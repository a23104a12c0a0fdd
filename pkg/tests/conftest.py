import numpy as np
import pytest

from frsel import (
    Dataset,
    KernelConfig,
    SynthSpec,
    exhaustive_best,
    synth_clusters,
    zscore_apply,
    zscore_fit,
)


def standardize(ds: Dataset) -> Dataset:
    return zscore_apply(ds, zscore_fit(ds))


def make_dataset(samples, labels) -> Dataset:
    names = tuple(f"f{j}" for j in range(len(samples[0])))
    return Dataset(samples=np.asarray(samples, dtype=np.float64),
                   labels=np.asarray(labels), feature_names=names)


@pytest.fixture(scope="session")
def benchmark_ds() -> Dataset:
    """The standard synthetic benchmark, standardized: 10 features (3
    informative), 200 samples, separation 6."""
    return standardize(synth_clusters(SynthSpec(), seed=0))


@pytest.fixture(scope="session")
def benchmark_oracle(benchmark_ds):
    return exhaustive_best(benchmark_ds, KernelConfig())
