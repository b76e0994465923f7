import numpy as np

from pytest import fixture, FixtureRequest

from src.isomeasure.utils.generators import (
    cross_polytope_measure,
    random_isotropic_measure,
    regular_simplex_measure,
)
from src.isomeasure.utils.measure import (
    DiscreteMeasure,
    LiftedMeasure,
    lift,
)


@fixture
def simplex2() -> DiscreteMeasure:
    """Fixture that creates the regular simplex measure in the plane.

    Returns:
        DiscreteMeasure: Three atoms with pairwise dots -1/2, weights 2/3.
    """
    return regular_simplex_measure(2)


@fixture
def simplex3() -> DiscreteMeasure:
    """Fixture that creates the regular simplex measure in R^3."""
    return regular_simplex_measure(3)


@fixture
def cross2() -> DiscreteMeasure:
    """Fixture that creates the cross-polytope measure in the plane."""
    return cross_polytope_measure(2)


@fixture
def cross3() -> DiscreteMeasure:
    """Fixture that creates the cross-polytope measure in R^3."""
    return cross_polytope_measure(3)


@fixture
def ortho3() -> DiscreteMeasure:
    """Fixture that creates an orthonormal basis of R^3 with unit weights.

    It is isotropic but not centered.
    """
    return DiscreteMeasure.from_arrays(np.eye(3), np.ones(3))


@fixture
def random3() -> DiscreteMeasure:
    """Fixture that creates a seeded random isotropic measure in R^3."""
    return random_isotropic_measure(3, 8, seed=7)


@fixture
def measure(request: FixtureRequest) -> DiscreteMeasure:
    """Fixture that returns the measure fixture named by the parameter.

    Args:
        request (FixtureRequest): The request object.

    Returns:
        DiscreteMeasure: Value of the requested fixture.
    """
    return request.getfixturevalue(request.param)


@fixture
def lifted(measure: DiscreteMeasure) -> LiftedMeasure:
    """Fixture that lifts the parametrized measure to the sphere of R^{n+1}."""
    return lift(measure)
