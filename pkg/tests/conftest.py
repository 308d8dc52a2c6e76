import numpy as np
import pytest

from chflow.fields import EulerianField, Grid1D


@pytest.fixture
def grid():
    return Grid1D(length=40.0, count=1024)


@pytest.fixture
def grid_fine():
    return Grid1D(length=40.0, count=4096)


def gaussian_field(grid, amplitude=0.5, width=1.0, center=0.0):
    x = grid.points
    return EulerianField(grid=grid, u=amplitude * np.exp(-((x - center) / width) ** 2))


def random_nodes(rng, n, lo=-20.0, hi=20.0):
    y = np.sort(rng.uniform(lo, hi, n))
    while np.any(np.diff(y) <= 0):
        y = np.sort(rng.uniform(lo, hi, n))
    return y
