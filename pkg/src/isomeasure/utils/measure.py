import logging
import math
import numpy as np

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence
from scipy.optimize import linprog

from src.isomeasure.utils.data_model import AtomModel, MeasureModel
from src.isomeasure.utils.errors import (
    DomainError,
    IsomeasureError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
MERGE_TOL = 1e-12
LIFT_TOL = 1e-10
LEMMA_TOL = 1e-8
HEMISPHERE_THRESHOLD = 1e-9


class InequalityViolation(IsomeasureError, ArithmeticError):
    """Raised when a computed inequality that must hold is violated."""


def _sorted_merged(
    directions: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Sort atoms lexicographically and merge atoms closer than MERGE_TOL."""
    order = np.lexsort(directions.T[::-1])
    directions, weights = directions[order], weights[order]
    kept_dirs: list[np.ndarray] = []
    kept_weights: list[float] = []
    for u, c in zip(directions, weights):
        for k, v in enumerate(kept_dirs):
            if np.max(np.abs(u - v)) <= MERGE_TOL:
                kept_weights[k] += float(c)
                break
        else:
            kept_dirs.append(u)
            kept_weights.append(float(c))
    return np.array(kept_dirs), np.array(kept_weights)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported nonnegative measure on the unit sphere.

    Use `from_arrays` to build one: it renormalizes directions, merges
    coincident atoms and sorts the atoms lexicographically, so that two
    measures with the same atoms compare and serialize identically.

    Attributes:
        dim (int): Ambient dimension n >= 2.
        directions (np.ndarray): (m, n) array of unit vectors.
        weights (np.ndarray): (m,) array of positive weights.
    """

    dim: int
    directions: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise DomainError(f"Dimension must be at least 2, got {self.dim}.")
        if self.directions.ndim != 2 or self.directions.shape[1] != self.dim:
            raise DomainError("Directions must form an (m, dim) array.")
        if self.weights.shape != (self.directions.shape[0],):
            raise DomainError("One weight per direction is required.")
        if self.size == 0:
            raise DomainError("A measure needs at least one atom.")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise DomainError("Every direction must be a unit vector.")
        if np.any(self.weights <= 0) or not np.all(np.isfinite(self.weights)):
            raise DomainError("Every weight must be positive and finite.")
        self.directions.setflags(write=False)
        self.weights.setflags(write=False)

    @classmethod
    def from_arrays(
        cls, directions: Sequence | np.ndarray, weights: Sequence | np.ndarray
    ) -> "DiscreteMeasure":
        """Build a measure from raw directions and weights.

        Args:
            directions (Sequence | np.ndarray): (m, n) nonzero vectors.
            weights (Sequence | np.ndarray): (m,) positive weights.

        Returns:
            DiscreteMeasure: Measure with unit, merged and sorted atoms.

        Raises:
            DomainError: If a direction is zero or a weight not positive.
        """
        dirs = np.atleast_2d(np.asarray(directions, dtype=float))
        ws = np.asarray(weights, dtype=float).reshape(-1)
        if dirs.shape[0] != ws.shape[0]:
            raise DomainError("One weight per direction is required.")
        norms = np.linalg.norm(dirs, axis=1)
        if np.any(norms == 0) or not np.all(np.isfinite(dirs)):
            raise DomainError("Directions must be finite and nonzero.")
        if np.any(ws <= 0):
            raise DomainError("Every weight must be positive.")
        dirs = dirs / norms[:, None]
        dirs, ws = _sorted_merged(dirs, ws)
        return cls(dim=dirs.shape[1], directions=dirs, weights=ws)

    @classmethod
    def from_model(cls, model: MeasureModel) -> "DiscreteMeasure":
        """Build a measure from its validated JSON model."""
        measure = cls.from_arrays(
            [atom.u for atom in model.atoms], [atom.c for atom in model.atoms]
        )
        if measure.dim != model.dim:
            raise DomainError(
                f"Atoms live in dimension {measure.dim}, file says "
                f"{model.dim}."
            )
        return measure

    def to_model(self) -> MeasureModel:
        """Serialize the measure, atoms already in lexicographic order."""
        return MeasureModel(
            dim=self.dim,
            atoms=[
                AtomModel(u=[float(x) for x in u], c=float(c))
                for u, c in zip(self.directions, self.weights)
            ],
        )

    @property
    def size(self) -> int:
        return int(self.directions.shape[0])

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)


@dataclass(frozen=True, eq=False)
class LiftedMeasure:
    """Measure on the sphere one dimension up, induced by the lift map.

    Attributes:
        base (DiscreteMeasure): The isotropic centered measure it came from.
        directions (np.ndarray): (m, n+1) lifted unit vectors s(u_i).
        weights (np.ndarray): (m,) weights ((n+1)/n) c_i.
    """

    base: DiscreteMeasure = field(repr=False)
    directions: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = self.base_dim
        height = 1.0 / math.sqrt(n + 1)
        if self.directions.shape != (self.base.size, n + 1):
            raise DomainError("Lifted directions must form an (m, n+1) array.")
        if np.any(np.abs(self.directions[:, -1] - height) > UNIT_TOL):
            raise DomainError("Lifted atoms must lie on the subsphere D.")
        self.directions.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def base_dim(self) -> int:
        return self.base.dim

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    def as_measure(self) -> DiscreteMeasure:
        """Return the lift as a DiscreteMeasure on the sphere of R^{n+1}."""
        return DiscreteMeasure(
            dim=self.dim,
            directions=np.array(self.directions),
            weights=np.array(self.weights),
        )


@dataclass(frozen=True, eq=False)
class MomentReport:
    """Zeroth, first and second moments of a measure.

    Attributes:
        moment_matrix (np.ndarray): Sum of c_i u_i u_i^T.
        first_moment (np.ndarray): Sum of c_i u_i.
        total_mass (float): Sum of c_i.
        isotropy_residual (float): Frobenius distance of the moment matrix
            from the identity.
        centroid (np.ndarray): first_moment / total_mass.
    """

    moment_matrix: np.ndarray
    first_moment: np.ndarray
    total_mass: float
    isotropy_residual: float
    centroid: np.ndarray

    def to_dict(self) -> dict:
        return {
            "moment_matrix": self.moment_matrix.tolist(),
            "first_moment": self.first_moment.tolist(),
            "total_mass": self.total_mass,
            "isotropy_residual": self.isotropy_residual,
            "centroid": self.centroid.tolist(),
        }


def _moments(
    directions: np.ndarray, weights: np.ndarray
) -> MomentReport:
    moment_matrix = np.einsum("i,ij,ik->jk", weights, directions, directions)
    moment_matrix = 0.5 * (moment_matrix + moment_matrix.T)
    first_moment = weights @ directions
    total_mass = math.fsum(weights)
    residual = float(
        np.linalg.norm(moment_matrix - np.eye(directions.shape[1]), "fro")
    )
    return MomentReport(
        moment_matrix=moment_matrix,
        first_moment=first_moment,
        total_mass=total_mass,
        isotropy_residual=residual,
        centroid=first_moment / total_mass,
    )


def moment_report(Z: DiscreteMeasure) -> MomentReport:
    """Compute the moment report of a measure by direct summation."""
    return _moments(Z.directions, Z.weights)


def is_isotropic_centered(Z: DiscreteMeasure, tol: float = 1e-10) -> bool:
    """Check isotropy and vanishing first moment.

    Args:
        Z (DiscreteMeasure): Measure to check.
        tol (float): Bound for both the isotropy residual and |first moment|.

    Returns:
        bool: True iff both quantities are within tol.
    """
    if tol <= 0:
        raise DomainError("Tolerance must be positive.")
    report = moment_report(Z)
    return bool(
        report.isotropy_residual <= tol
        and np.linalg.norm(report.first_moment) <= tol
    )


def require_isotropic(
    Z: DiscreteMeasure, tol: float, centered: bool = False
) -> MomentReport:
    """Raise PreconditionError unless Z is isotropic (and centered)."""
    report = moment_report(Z)
    first_norm = float(np.linalg.norm(report.first_moment))
    residuals = {
        "isotropy_residual": report.isotropy_residual,
        "first_moment_norm": first_norm,
    }
    if report.isotropy_residual > tol or (centered and first_norm > tol):
        what = "isotropic with centroid at the origin" if centered else (
            "isotropic"
        )
        raise PreconditionError(
            f"Measure is not {what} within {tol:g}: "
            f"residual {report.isotropy_residual:.3e}, "
            f"|first moment| {first_norm:.3e}.",
            residuals,
        )
    return report


def hemisphere_check(Z: DiscreteMeasure) -> bool:
    """Decide that the support lies in no closed hemisphere.

    The first linear program maximizes min_i v.u_i over the cube; a
    positive optimum means an open hemisphere holds the support. Supports
    that only touch a closed hemisphere give optimum zero there, so the
    second program looks for a strictly positive convex combination of
    the atoms summing to the origin, which together with full rank is
    equivalent to the origin lying in the interior of the hull.

    Args:
        Z (DiscreteMeasure): Measure to check.

    Returns:
        bool: True iff no v != 0 has v.u_i >= 0 for all atoms.
    """
    U = Z.directions
    m, n = U.shape
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    result = linprog(
        cost,
        A_ub=np.hstack([-U, np.ones((m, 1))]),
        b_ub=np.zeros(m),
        bounds=[(-1.0, 1.0)] * n + [(None, None)],
        method="highs",
    )
    if result.status == 0 and -result.fun > HEMISPHERE_THRESHOLD:
        logger.debug("Open hemisphere found, min dot %g", -result.fun)
        return False
    if np.linalg.matrix_rank(U, tol=1e-9) < n:
        return False
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_eq = np.vstack(
        [np.hstack([U.T, np.zeros((n, 1))]), np.append(np.ones(m), 0.0)]
    )
    b_eq = np.append(np.zeros(n), 1.0)
    result = linprog(
        cost,
        A_ub=np.hstack([-np.eye(m), np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, None)] * m + [(None, 1.0)],
        method="highs",
    )
    return bool(result.status == 0 and -result.fun > HEMISPHERE_THRESHOLD)


def aligned_values(
    values: Sequence[float] | np.ndarray, Z: DiscreteMeasure
) -> np.ndarray:
    """One finite value per atom of Z, as a flat float array.

    Raises:
        DomainError: If the count differs from the atoms or a value is not
            finite.
    """
    t = np.asarray(values, dtype=float).reshape(-1)
    if t.shape[0] != Z.size:
        raise DomainError(
            f"Expected {Z.size} values aligned with atoms, got {t.shape[0]}."
        )
    if not np.all(np.isfinite(t)):
        raise DomainError("Values must be finite.")
    return t


def lp_norm(
    values: Sequence[float] | np.ndarray, Z: DiscreteMeasure, p: float
) -> float:
    """L_p norm of atom values with respect to Z, for p >= 1."""
    if p < 1:
        raise DomainError(f"p must be at least 1, got {p}.")
    t = aligned_values(values, Z)
    return math.fsum(Z.weights * np.abs(t) ** p) ** (1.0 / p)


def t_circle(values: Sequence[float] | np.ndarray, Z: DiscreteMeasure):
    """Vector sum of c_i t_i u_i."""
    t = aligned_values(values, Z)
    return (Z.weights * t) @ Z.directions


def normalized_barycenter(
    values: Sequence[float] | np.ndarray, Z: DiscreteMeasure
) -> np.ndarray:
    """Sum of c_i t_i u_i divided by sum of c_i t_i, for positive t."""
    t = aligned_values(values, Z)
    if np.any(t <= 0):
        raise DomainError("Values must be positive.")
    return t_circle(t, Z) / math.fsum(Z.weights * t)


class Lemma1Result(NamedTuple):
    lhs: float
    rhs: float
    equality_gap: float


def lemma1_check(
    values: Sequence[float] | np.ndarray,
    Z: DiscreteMeasure,
    tol: float = LEMMA_TOL,
) -> Lemma1Result:
    """Compare |t°| with the L_2 norm of t on an isotropic measure.

    Equality holds exactly when t_i = u_i . t° at every atom.

    Raises:
        PreconditionError: If Z is not isotropic within tol.
        InequalityViolation: If |t°| exceeds the L_2 norm.
    """
    require_isotropic(Z, tol)
    lhs = float(np.linalg.norm(t_circle(values, Z)))
    rhs = lp_norm(values, Z, 2)
    if lhs > rhs + 1e-12 * max(1.0, rhs):
        raise InequalityViolation(
            f"|t°| = {lhs!r} exceeds |t:Z|_2 = {rhs!r}."
        )
    return Lemma1Result(lhs=lhs, rhs=rhs, equality_gap=rhs - lhs)


def orthogonality_observation(
    Z: DiscreteMeasure, tol: float = LEMMA_TOL
) -> bool:
    """Check that an isotropic measure with n atoms is an orthonormal frame.

    Raises:
        DomainError: If the support does not have exactly n atoms.
        PreconditionError: If Z is not isotropic within tol.
    """
    if Z.size != Z.dim:
        raise DomainError(
            f"Needs exactly {Z.dim} atoms, measure has {Z.size}."
        )
    require_isotropic(Z, tol)
    gram = Z.directions @ Z.directions.T
    off_diagonal = gram - np.diag(np.diag(gram))
    return bool(
        np.all(np.abs(Z.weights - 1.0) <= 1e-8)
        and np.all(np.abs(off_diagonal) <= 1e-8)
    )


def lift_map(u: np.ndarray, n: int) -> np.ndarray:
    """Map directions of S^{n-1} onto the subsphere D of S^n.

    Args:
        u (np.ndarray): (n,) or (m, n) unit vectors.
        n (int): Dimension of the base sphere's ambient space.

    Returns:
        np.ndarray: (n+1,) or (m, n+1) points (-sqrt(n/(n+1)) u, 1/sqrt(n+1)).
    """
    u = np.asarray(u, dtype=float)
    scale = -math.sqrt(n) / math.sqrt(n + 1)
    height = np.full(u.shape[:-1] + (1,), 1.0 / math.sqrt(n + 1))
    return np.concatenate([scale * u, height], axis=-1)


def lift(Z: DiscreteMeasure, tol: float = LEMMA_TOL) -> LiftedMeasure:
    """Induce the isotropic measure on S^n from an isotropic centered Z.

    Raises:
        PreconditionError: If Z is not isotropic centered within tol.
    """
    require_isotropic(Z, tol, centered=True)
    n = Z.dim
    return LiftedMeasure(
        base=Z,
        directions=lift_map(Z.directions, n),
        weights=(n + 1) / n * np.asarray(Z.weights),
    )


@dataclass(frozen=True, eq=False)
class LiftCheck:
    """Outcome of the three checks on a lifted measure.

    Attributes:
        moments (MomentReport): Moments in dimension n+1.
        isotropic (bool): Isotropy residual within tolerance.
        centroid_ok (bool): First moment equals sqrt(n+1) e_{n+1}.
        mass_ok (bool): Total mass equals n+1.
        first_moment_error (float): Distance to sqrt(n+1) e_{n+1}.
        mass_error (float): |mass - (n+1)|.
        tol (float): Tolerance used for all three checks.
    """

    moments: MomentReport
    isotropic: bool
    centroid_ok: bool
    mass_ok: bool
    first_moment_error: float
    mass_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.isotropic and self.centroid_ok and self.mass_ok

    def to_dict(self) -> dict:
        return {
            "moments": self.moments.to_dict(),
            "isotropic": self.isotropic,
            "centroid_ok": self.centroid_ok,
            "mass_ok": self.mass_ok,
            "first_moment_error": self.first_moment_error,
            "mass_error": self.mass_error,
            "tol": self.tol,
            "passed": self.passed,
        }


def verify_lift(Zbar: LiftedMeasure, tol: float = LIFT_TOL) -> LiftCheck:
    """Check isotropy, centroid and total mass of a lifted measure."""
    report = _moments(Zbar.directions, Zbar.weights)
    dim = Zbar.dim
    expected_first = np.zeros(dim)
    expected_first[-1] = math.sqrt(dim)
    first_error = float(np.linalg.norm(report.first_moment - expected_first))
    mass_error = abs(report.total_mass - dim)
    return LiftCheck(
        moments=report,
        isotropic=report.isotropy_residual <= tol,
        centroid_ok=first_error <= tol,
        mass_ok=mass_error <= tol,
        first_moment_error=first_error,
        mass_error=mass_error,
        tol=tol,
    )
