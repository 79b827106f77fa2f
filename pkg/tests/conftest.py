import numpy as np
import pytest

from tflocal.transforms import Grid, SampledSignal, gaussian


@pytest.fixture(scope="session")
def grid():
    return Grid.from_extent(12, 256)


@pytest.fixture(scope="session")
def small_grid():
    return Grid.from_extent(12, 128)


@pytest.fixture(scope="session")
def g0(grid):
    return gaussian(grid)


def mixture(grid, seed, count=3):
    """Random sum of shifted, modulated, dilated Gaussians (analytic, so oracles can resample it)."""
    rng = np.random.default_rng(seed)
    terms = [(rng.uniform(-4, 4), rng.uniform(-3, 3), rng.uniform(0.7, 1.5),
              rng.normal() + 1j * rng.normal()) for _ in range(count)]

    def f(x):
        x = np.asarray(x, float)
        return sum(c * np.exp(-np.pi * ((x - x0) / s) ** 2 + 1j * k * x) for x0, k, s, c in terms)

    return SampledSignal(grid, f(grid.nodes)), f
