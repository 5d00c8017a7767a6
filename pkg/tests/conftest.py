import numpy as np
import pytest

from normkinetics import PlanarNorm

SQUARE_VERTICES = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]


@pytest.fixture(scope="session")
def euclid():
    return PlanarNorm.euclidean()


@pytest.fixture(scope="session")
def l3():
    return PlanarNorm.lp(3)


@pytest.fixture(scope="session")
def l4():
    return PlanarNorm.lp(4)


@pytest.fixture(scope="session")
def l15():
    return PlanarNorm.lp(1.5)


@pytest.fixture(scope="session")
def square():
    return PlanarNorm.polygon(SQUARE_VERTICES)


@pytest.fixture(scope="session")
def rounded_square():
    # C1 ball with flat edges: the polar of a strictly convex ball with
    # corners (l1 plus a small euclidean part).
    return PlanarNorm.dual_of(
        PlanarNorm.sum_of(PlanarNorm.lp(1), PlanarNorm.scaled(0.3, PlanarNorm.euclidean()))
    )


def random_directions(n, seed=0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2.0 * np.pi, n)
    return np.stack([np.cos(t), np.sin(t)], axis=-1)
