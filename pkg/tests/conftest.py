import pytest

from modelrisk import FamilyParams, discretize, from_targets, make_profile, pull_forward, shared_grid

BASE = FamilyParams("normal", 2.0, 10.0)
TARGET = FamilyParams("skew_normal", 1.95, 9.98, 2.0)


@pytest.fixture(scope="session")
def example_grid():
    return shared_grid([BASE, TARGET])


@pytest.fixture(scope="session")
def example_p0(example_grid):
    return discretize(BASE, example_grid)


@pytest.fixture(scope="session")
def example_p1(example_grid):
    return discretize(TARGET, example_grid)


@pytest.fixture(scope="session")
def example_nb(example_p0, example_p1):
    return from_targets(example_p0, [example_p1])


@pytest.fixture(scope="session")
def example_kernel(example_nb):
    return pull_forward(make_profile("linear_decreasing"), example_nb)
