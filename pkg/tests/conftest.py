import numpy as np
import pytest

from huelines.model import LineKind, LineSet, Polyline


def random_lineset(rng, n_lines, n_vertices=8, extent=10.0):
    lines = [
        Polyline(id=i, vertices=rng.uniform(0.0, extent, size=(n_vertices, 2)))
        for i in range(n_lines)
    ]
    return LineSet.from_lines(lines, kind=LineKind.TRAJECTORY)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
