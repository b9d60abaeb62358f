import numpy as np
import pytest

from flatpencil.grid_calculus import GridChart
from flatpencil import geometry_core as geo


# Lambda samples whose combinations stay nondegenerate on every chart the
# tests use (all combination coefficients positive on positive metrics).
SAFE_LAMS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 2.0), (3.0, 1.0))


@pytest.fixture(scope="session")
def polar_metric():
    """Flat plane in polar coordinates on r in [1,2], theta in [0.5,1.5]."""
    chart = GridChart((1.0, 0.5), (2.0, 1.5), (101, 101))
    return geo.build_metric(lambda u: np.diag([1.0, 1.0 / u[0] ** 2]), chart)


@pytest.fixture(scope="session")
def euclidean_metric():
    chart = GridChart((0.5, 0.5), (1.5, 1.5), (33, 33))
    return geo.build_metric(lambda u: np.eye(2), chart)
