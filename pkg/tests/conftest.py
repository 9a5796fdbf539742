import numpy as np
import pytest

from raschclust.data import ResponseMatrix
from raschclust.simulate import gen_rasch


@pytest.fixture(scope="session")
def rasch6() -> ResponseMatrix:
    """One 6-item Rasch dataset, sigma = 1, P = 200."""
    return gen_rasch(200, (0.0, -1.5, -1.0, 0.5, 1.2, 1.5), 1.0, seed=42)


def random_binary(rng: np.random.Generator, P: int, I: int) -> ResponseMatrix:
    """Non-degenerate random 0/1 matrix (every column mixed)."""
    while True:
        values = (rng.random((P, I)) < rng.uniform(0.2, 0.8, size=I)).astype(int)
        sums = values.sum(axis=0)
        if ((sums > 0) & (sums < P)).all():
            return ResponseMatrix(values)
