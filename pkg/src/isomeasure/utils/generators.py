import logging
import math
import numpy as np

from typing import NamedTuple
from scipy.linalg import expm, helmert
from scipy.optimize import linprog, nnls
from scipy.stats import ortho_group

from src.isomeasure.utils.errors import (
    DomainError,
    InfeasibleError,
    PreconditionError,
)
from src.isomeasure.utils.measure import (
    DiscreteMeasure,
    is_isotropic_centered,
)
from src.isomeasure.utils.sampling import (
    STREAM_GENERATOR,
    STREAM_PERTURB,
    rng_stream,
)

logger = logging.getLogger(__name__)

SOLVER_TOL = 1e-7
DROP_WEIGHT = 1e-9
MAX_ATTEMPTS = 50


def regular_simplex_measure(n: int) -> DiscreteMeasure:
    """Vertices of a regular simplex inscribed in the sphere, weights n/(n+1).

    The vertices are the columns of the Helmert basis of the hyperplane
    orthogonal to (1, ..., 1) in R^{n+1}, i.e. the points e_i - centroid
    written in n coordinates, normalized.
    """
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}.")
    vertices = helmert(n + 1).T
    return DiscreteMeasure.from_arrays(vertices, np.full(n + 1, n / (n + 1)))


def cross_polytope_measure(
    n: int, frame: np.ndarray | None = None
) -> DiscreteMeasure:
    """Atoms at plus and minus the columns of an orthogonal frame, weights 1/2.

    Raises:
        DomainError: If the frame is not orthogonal within 1e-10.
    """
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}.")
    frame = np.eye(n) if frame is None else np.asarray(frame, dtype=float)
    if frame.shape != (n, n) or (
        np.max(np.abs(frame.T @ frame - np.eye(n))) > 1e-10
    ):
        raise DomainError("Frame must be an orthogonal n x n matrix.")
    directions = np.vstack([frame.T, -frame.T])
    return DiscreteMeasure.from_arrays(directions, np.full(2 * n, 0.5))


def _constraint_system(
    directions: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Linear system sum c_i u_i u_i^T = I, sum c_i u_i = 0 in the weights.

    Off-diagonal rows are scaled by sqrt(2) so that the residual norm of
    the matrix part equals the Frobenius residual.
    """
    n = directions.shape[1]
    rows, rhs = [], []
    for j in range(n):
        for k in range(j, n):
            scale = 1.0 if j == k else math.sqrt(2.0)
            rows.append(scale * directions[:, j] * directions[:, k])
            rhs.append(1.0 if j == k else 0.0)
    for j in range(n):
        rows.append(directions[:, j])
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


class WeightSolution(NamedTuple):
    weights: np.ndarray
    residual: float


def _spread(a: np.ndarray, b: np.ndarray, drop: float) -> np.ndarray | None:
    """Feasible weights maximizing the smallest weight, or None."""
    m = a.shape[1]
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    result = linprog(
        cost,
        A_ub=np.hstack([-np.eye(m), np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.hstack([a, np.zeros((a.shape[0], 1))]),
        b_eq=b,
        bounds=[(0.0, None)] * m + [(None, 1.0)],
        method="highs",
    )
    if result.status != 0 or -result.fun <= drop:
        return None
    weights = result.x[:-1]
    correction = np.linalg.lstsq(a, b - a @ weights, rcond=None)[0]
    polished = weights + correction
    return polished if np.all(polished > drop) else weights


def solve_isotropic_weights(
    directions: np.ndarray, tol: float = SOLVER_TOL, drop: float = DROP_WEIGHT
) -> WeightSolution:
    """Nonnegative weights making the directions isotropic and centered.

    Nonnegative least squares decides feasibility. A feasible support is
    then re-solved for the weights maximizing the smallest weight, so
    atoms are not dropped merely because the least-squares solution is a
    basic one. Weights at or below drop are set to zero.

    Args:
        directions (np.ndarray): (m, n) unit vectors.
        tol (float): Residual accepted as feasible.
        drop (float): Threshold below which weights are dropped.

    Returns:
        WeightSolution: Weights and the residual of the linear system.
    """
    a, b = _constraint_system(np.asarray(directions, dtype=float))
    weights, residual = nnls(a, b)
    if residual <= tol:
        spread = _spread(a, b, drop)
        if spread is not None:
            weights = spread
    weights = np.where(weights > drop, weights, 0.0)
    residual = float(np.linalg.norm(a @ weights - b))
    return WeightSolution(weights=weights, residual=residual)


def _measure_from_solution(
    directions: np.ndarray, solution: WeightSolution
) -> DiscreteMeasure | None:
    kept = solution.weights > 0
    if not np.any(kept):
        return None
    return DiscreteMeasure.from_arrays(
        directions[kept], solution.weights[kept]
    )


def _reachable(dim: int, count: int) -> bool:
    """Whether count atoms can form isotropic centered blocks of dim."""
    if dim == 0:
        return count == 0
    if dim == 1:
        return count == 2
    return count >= dim + 1


def _block_choices(k: int, budget: int) -> list[int]:
    """Atom counts of a single block spanning k dimensions."""
    if k == 1:
        return [2]
    if k == 2:
        return list(range(3, budget + 1))
    return [k + 1, 2 * k]


def _layer_blocks(
    n: int, budget: int, rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Split R^n into blocks (dimension, atoms) using budget atoms in all.

    A block is an antipodal pair (k = 1), a regular polygon (k = 2), a
    simplex or a cross-polytope of its subspace; every budget of at least
    n + 1 atoms is reachable.
    """
    blocks = []
    dim = n
    while dim:
        options = [
            (k, count)
            for k in range(1, dim + 1)
            for count in _block_choices(k, budget)
            if count <= budget and _reachable(dim - k, budget - count)
        ]
        k, count = options[int(rng.integers(len(options)))]
        blocks.append((k, count))
        dim -= k
        budget -= count
    return blocks


def _block_vertices(
    k: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    if k == 1:
        return np.array([[1.0], [-1.0]])
    if k == 2:
        angles = rng.uniform(0.0, 2 * math.pi) + (
            2 * math.pi * np.arange(count) / count
        )
        return np.column_stack([np.cos(angles), np.sin(angles)])
    if count == k + 1:
        return regular_simplex_measure(k).directions
    return np.vstack([np.eye(k), -np.eye(k)])


def _layer_budgets(
    n: int, m: int, rng: np.random.Generator
) -> list[int]:
    """Atom budgets of the layers, each at least n + 1 and summing to m."""
    layers = int(rng.integers(1, m // (n + 1) + 1))
    spare = m - layers * (n + 1)
    extra = rng.multinomial(spare, np.full(layers, 1 / layers))
    return [n + 1 + int(e) for e in extra]


def _sample_directions(
    n: int, m: int, rng: np.random.Generator
) -> np.ndarray:
    """m directions forming a mixture of randomly rotated block layers.

    Each layer splits R^n into orthogonal subspaces of a Haar-random frame
    and places a regular polygon, simplex or cross-polytope in each of
    them, so every layer carries an isotropic centered weighting and the
    weight system is feasible with all m atoms. Every direction is
    marginally uniform on the sphere.
    """
    directions = []
    for budget in _layer_budgets(n, m, rng):
        frame = ortho_group.rvs(n, random_state=rng)
        start = 0
        for k, count in _layer_blocks(n, budget, rng):
            columns = frame[:, start : start + k]
            directions.append(_block_vertices(k, count, rng) @ columns.T)
            start += k
    return np.vstack(directions)


def random_isotropic_measure(
    n: int,
    m: int,
    seed: int,
    max_attempts: int = MAX_ATTEMPTS,
    tol: float = SOLVER_TOL,
    drop: float = DROP_WEIGHT,
) -> DiscreteMeasure:
    """Seeded random isotropic measure with centroid at the origin.

    An attempt is accepted only when all m sampled atoms keep a positive
    weight.

    Args:
        n (int): Dimension, at least 2.
        m (int): Number of atoms, at least n + 1.
        seed (int): Seed of the generator stream.
        max_attempts (int): Attempts before giving up.
        tol (float): Residual accepted as isotropic.
        drop (float): Threshold below which weights are dropped.

    Returns:
        DiscreteMeasure: The isotropic measure with m atoms.

    Raises:
        PreconditionError: If m < n + 1.
        InfeasibleError: If no attempt yields feasible weights.
    """
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}.")
    if m < n + 1:
        raise PreconditionError(
            f"At least n + 1 = {n + 1} atoms are needed, got m = {m}."
        )
    residual = math.inf
    for attempt in range(max_attempts):
        rng = rng_stream(seed, STREAM_GENERATOR, attempt)
        directions = _sample_directions(n, m, rng)
        solution = solve_isotropic_weights(directions, tol, drop)
        residual = solution.residual
        measure = _measure_from_solution(directions, solution)
        if (
            measure is not None
            and measure.size == m
            and is_isotropic_centered(measure, tol)
        ):
            logger.debug(
                "Attempt %d accepted with residual %.3e", attempt, residual
            )
            return measure
        logger.debug("Attempt %d rejected, residual %.3e", attempt, residual)
    raise InfeasibleError(
        f"No feasible weights after {max_attempts} attempts, "
        f"last residual {residual:.3e}.",
        residual=residual,
        attempts=max_attempts,
    )


def random_rotation(
    n: int, rng: np.random.Generator, angle: float
) -> np.ndarray:
    """Rotation exp(angle K) for a random skew K of spectral norm 1.

    It moves every unit vector by at most angle.
    """
    gaussian = rng.standard_normal((n, n))
    skew = gaussian - gaussian.T
    skew /= np.linalg.norm(skew, 2)
    return expm(angle * skew)


def perturb_and_repair(
    Z: DiscreteMeasure,
    eps: float,
    seed: int,
    tol: float = SOLVER_TOL,
    drop: float = DROP_WEIGHT,
) -> DiscreteMeasure:
    """Move the support by at most eps and re-solve the weights.

    The support is replaced by two copies, each turned by its own random
    rotation within eps of the identity. Half the original weights on
    each copy are isotropic and centered, so the weight system on the
    union stays feasible and the spreading step keeps every moved atom.
    No original atom survives.

    Args:
        Z (DiscreteMeasure): Isotropic centered measure to perturb.
        eps (float): Largest displacement of an atom, in (0, 0.3).
        seed (int): Seed of the perturbation stream.
        tol (float): Residual accepted as isotropic.
        drop (float): Threshold below which weights are dropped.

    Returns:
        DiscreteMeasure: The repaired measure on the moved atoms.

    Raises:
        DomainError: If eps is outside (0, 0.3).
        InfeasibleError: If the repair fails.
    """
    if not 0 < eps < 0.3:
        raise DomainError(f"eps must lie in (0, 0.3), got {eps}.")
    rng = rng_stream(seed, STREAM_PERTURB, 0)
    copies = []
    for _ in range(2):
        rotation = random_rotation(Z.dim, rng, eps * rng.uniform(0.5, 1.0))
        copies.append(Z.directions @ rotation.T)
    directions = np.vstack(copies)
    solution = solve_isotropic_weights(directions, tol, drop)
    measure = _measure_from_solution(directions, solution)
    if measure is None or not is_isotropic_centered(measure, tol):
        raise InfeasibleError(
            f"Repair failed with residual {solution.residual:.3e}.",
            residual=solution.residual,
            attempts=1,
        )
    return measure
