import math
import numpy as np
import pytest

from scipy.stats import ortho_group

from src.isomeasure.utils.generators import (
    cross_polytope_measure,
    perturb_and_repair,
    random_isotropic_measure,
    regular_simplex_measure,
)
from src.isomeasure.utils.measure import is_isotropic_centered
from src.isomeasure.utils.polytope import body_of, polar_of, volume
from src.isomeasure.utils.verifier import (
    theorem1_bound,
    theorem2_bound,
    verify_both,
)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_simplex_polar_equality(n: int) -> None:
    """Test the polar of the regular simplex against the upper bound.

    Asserts:
        Relative agreement within 1e-9 and reported equality.
    """
    measure = regular_simplex_measure(n)
    polar_volume = volume(polar_of(measure))
    assert polar_volume == pytest.approx(theorem1_bound(n), rel=1e-9)
    report = verify_both(measure)[0]
    assert report.equality_flag and report.inequality_holds


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_simplex_body_equality(n: int) -> None:
    """Test the regular simplex against the lower bound.

    Asserts:
        Relative agreement within 1e-9 and reported equality.
    """
    measure = regular_simplex_measure(n)
    body_volume = volume(body_of(measure))
    assert body_volume == pytest.approx(theorem2_bound(n), rel=1e-9)
    report = verify_both(measure)[1]
    assert report.equality_flag and report.inequality_holds


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cross_strict(n: int) -> None:
    """Test the cross-polytope measures.

    Asserts:
        The cube has volume 2^n, the cross-polytope 2^n / n!, both gaps
        are positive and no equality is flagged.
    """
    measure = cross_polytope_measure(n)
    assert volume(polar_of(measure)) == pytest.approx(2.0**n, abs=1e-10)
    assert volume(body_of(measure)) == pytest.approx(
        2.0**n / math.factorial(n), abs=1e-10
    )
    for report in verify_both(measure):
        assert report.inequality_holds
        assert report.gap > 0
        assert not report.equality_flag


@pytest.mark.parametrize("n", [3, 4])
def test_rotated_cross_strict(n: int) -> None:
    """Test the cross measure on a random frame.

    Asserts:
        Volumes do not depend on the frame.
    """
    frame = ortho_group.rvs(n, random_state=np.random.default_rng(n))
    measure = cross_polytope_measure(n, frame)
    first, second = verify_both(measure)
    assert first.computed_volume == pytest.approx(2.0**n, rel=1e-9)
    assert second.computed_volume == pytest.approx(
        2.0**n / math.factorial(n), rel=1e-9
    )


@pytest.mark.parametrize("n", [2, 3, 4])
def test_random_measures_satisfy_both(n: int) -> None:
    """Test 100 seeded random isotropic measures per dimension.

    Asserts:
        Every measure keeps its m atoms, is isotropic within 1e-7 and
        satisfies both inequalities, strictly once m > n + 1.
    """
    for seed in range(100):
        m = n + 1 + seed % (12 - n)
        measure = random_isotropic_measure(n, m, seed=seed)
        assert measure.size == m
        assert is_isotropic_centered(measure, 1e-7)
        for report in verify_both(measure):
            assert report.inequality_holds, (seed, report)
            if m > n + 1:
                assert not report.equality_flag, (seed, report)


@pytest.mark.parametrize("seed", range(20))
def test_perturbed_simplex_gaps(seed: int) -> None:
    """Test 20 perturbations of the tetrahedral measure.

    Asserts:
        Both gaps are strictly positive.
    """
    measure = perturb_and_repair(regular_simplex_measure(3), 0.1, seed)
    for report in verify_both(measure):
        assert report.gap > 0
        assert not report.equality_flag
