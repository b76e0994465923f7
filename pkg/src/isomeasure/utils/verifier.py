import logging
import math

from src.isomeasure.utils.data_model import VerificationReport
from src.isomeasure.utils.errors import DomainError
from src.isomeasure.utils.measure import DiscreteMeasure, require_isotropic
from src.isomeasure.utils.polytope import (
    body_of,
    is_regular_simplex,
    polar_of,
    volume,
)

logger = logging.getLogger(__name__)

PRECONDITION_TOL = 1e-7
HOLDS_RELATIVE = 1e-9
EQUALITY_GAP_RELATIVE = 1e-7
SIMPLEX_TOL = 1e-10


def _log_terms(n: int) -> tuple[float, float, float]:
    """(n/2) ln n, ((n+1)/2) ln(n+1) and ln n!."""
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}.")
    return 0.5 * n * math.log(n), 0.5 * (n + 1) * math.log(n + 1), (
        math.lgamma(n + 1)
    )


def theorem1_bound(n: int) -> float:
    """Upper bound n^{n/2} (n+1)^{(n+1)/2} / n! on the polar body volume."""
    half_n, half_n1, log_fact = _log_terms(n)
    return math.exp(half_n + half_n1 - log_fact)


def theorem2_bound(n: int) -> float:
    """Lower bound (n+1)^{(n+1)/2} n^{-n/2} / n! on the body volume."""
    half_n, half_n1, log_fact = _log_terms(n)
    return math.exp(half_n1 - half_n - log_fact)


def _tolerances(tol: float) -> dict:
    return {
        "precondition": tol,
        "holds_relative": HOLDS_RELATIVE,
        "equality_gap_relative": EQUALITY_GAP_RELATIVE,
        "simplex": SIMPLEX_TOL,
    }


def _report(
    theorem: str, n: int, computed: float, bound: float, gap: float,
    equality: bool, tol: float,
) -> VerificationReport:
    report = VerificationReport(
        theorem=theorem,
        n=n,
        computed_volume=computed,
        bound=bound,
        gap=gap,
        inequality_holds=gap >= -HOLDS_RELATIVE * bound,
        equality_flag=equality,
        tolerances=_tolerances(tol),
    )
    logger.info(
        "%s n=%d volume=%.10g bound=%.10g holds=%s equality=%s",
        theorem,
        n,
        computed,
        bound,
        report.inequality_holds,
        equality,
    )
    return report


def verify_theorem1(
    Z: DiscreteMeasure, tol: float = PRECONDITION_TOL
) -> VerificationReport:
    """Compare the polar body volume with its upper bound.

    Raises:
        PreconditionError: If Z is not isotropic centered within tol; the
            measured residuals are attached.
    """
    require_isotropic(Z, tol, centered=True)
    n = Z.dim
    computed = volume(polar_of(Z))
    bound = theorem1_bound(n)
    return _report(
        "T1", n, computed, bound, bound - computed,
        is_regular_simplex(Z, SIMPLEX_TOL), tol,
    )


def verify_theorem2(
    Z: DiscreteMeasure, tol: float = PRECONDITION_TOL
) -> VerificationReport:
    """Compare the volume of the hull of the support with its lower bound.

    Raises:
        PreconditionError: If Z is not isotropic centered within tol.
    """
    require_isotropic(Z, tol, centered=True)
    n = Z.dim
    computed = volume(body_of(Z))
    bound = theorem2_bound(n)
    return _report(
        "T2", n, computed, bound, computed - bound,
        is_regular_simplex(Z, SIMPLEX_TOL), tol,
    )


def verify_both(
    Z: DiscreteMeasure, tol: float = PRECONDITION_TOL
) -> list[VerificationReport]:
    """Check both volume inequalities for one measure.

    Args:
        Z (DiscreteMeasure): Isotropic centered measure.
        tol (float): Tolerance of the isotropy precondition.

    Returns:
        list[VerificationReport]: The polar body report, then the
            support hull report.

    Raises:
        PreconditionError: If Z is not isotropic and centered within tol.
    """
    return [verify_theorem1(Z, tol), verify_theorem2(Z, tol)]
