import logging
import math
import numpy as np

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence, Union
from scipy.spatial import ConvexHull, QhullError

from src.isomeasure.utils.data_model import HalfspaceModel, PolytopeModel
from src.isomeasure.utils.errors import (
    DegeneracyError,
    DomainError,
    NormalizationError,
    PreconditionError,
    UnboundedError,
)
from src.isomeasure.utils.measure import (
    DiscreteMeasure,
    aligned_values,
    hemisphere_check,
    t_circle,
)
from src.isomeasure.utils.sampling import (
    DEFAULT_CHUNK_SIZE,
    STREAM_MC_VOLUME,
    Moments,
    rng_stream,
    run_chunks,
)

logger = logging.getLogger(__name__)

MAX_DIM = 8
FACET_TOL = 1e-9
INTERIOR_TOL = 1e-12


def _check_dim(dim: int) -> None:
    if not 2 <= dim <= MAX_DIM:
        raise DomainError(
            f"Polytopes are supported for 2 <= n <= {MAX_DIM}, got {dim}."
        )


def _lexsorted(points: np.ndarray) -> np.ndarray:
    return points[np.lexsort(points.T[::-1])]


class Facet(NamedTuple):
    """Facet a.x = b of a polytope, a a unit outer normal."""

    normal: np.ndarray
    offset: float
    vertex_indices: tuple[int, ...]


def _hull(points: np.ndarray) -> ConvexHull:
    try:
        return ConvexHull(points)
    except QhullError as error:
        raise DegeneracyError(
            "Points span a proper affine subspace, no full-dimensional hull."
        ) from error


def _merge_facets(hull: ConvexHull) -> list[Facet]:
    """Group Qhull's triangulated facets that share a supporting plane."""
    groups: list[tuple[np.ndarray, set[int]]] = []
    for equation, simplex in zip(hull.equations, hull.simplices):
        for plane, indices in groups:
            if np.max(np.abs(plane - equation)) <= FACET_TOL:
                indices.update(int(i) for i in simplex)
                break
        else:
            groups.append((equation, set(int(i) for i in simplex)))
    facets = [
        Facet(
            normal=plane[:-1] / np.linalg.norm(plane[:-1]),
            offset=float(-plane[-1] / np.linalg.norm(plane[:-1])),
            vertex_indices=tuple(sorted(indices)),
        )
        for plane, indices in groups
    ]
    facets.sort(key=lambda facet: tuple(facet.normal))
    return facets


def _central_volume(vertices: np.ndarray, hull: ConvexHull) -> float:
    """Sum of |det|/n! over cones from the origin to the boundary simplices.

    Every facet of the hull is triangulated (Qhull option Qt), and each
    boundary simplex spans a cone with apex at the origin.

    Raises:
        DegeneracyError: If a facet spans fewer than n-1 dimensions.
    """
    n = vertices.shape[1]
    for facet in _merge_facets(hull):
        points = vertices[list(facet.vertex_indices)]
        rank = np.linalg.matrix_rank(points[1:] - points[0], tol=FACET_TOL)
        if rank < n - 1:
            raise DegeneracyError(
                f"Facet with normal {facet.normal} spans only {rank} "
                "dimensions."
            )
    dets = np.abs(np.linalg.det(vertices[hull.simplices]))
    return math.fsum(dets) / math.factorial(n)


@dataclass(frozen=True, eq=False)
class VertexPolytope:
    """Polytope given as the convex hull of its vertices.

    Attributes:
        dim (int): Ambient dimension.
        vertices (np.ndarray): (k, dim) extreme points, lexicographically
            sorted.
    """

    dim: int
    vertices: np.ndarray = field(repr=False)

    @classmethod
    def from_points(cls, points: Sequence | np.ndarray) -> "VertexPolytope":
        """Keep the extreme points of a full-dimensional point set.

        Raises:
            DegeneracyError: If the points span a proper subspace.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        _check_dim(points.shape[1])
        hull = _hull(points)
        vertices = _lexsorted(points[hull.vertices])
        logger.debug(
            "Hull of %d points has %d vertices", len(points), len(vertices)
        )
        return cls(dim=points.shape[1], vertices=vertices)

    @cached_property
    def hull(self) -> ConvexHull:
        return _hull(self.vertices)

    @cached_property
    def facets(self) -> list[Facet]:
        return _merge_facets(self.hull)

    def contains(
        self, points: np.ndarray, strict: bool = False, tol: float = 0.0
    ) -> np.ndarray:
        """Membership via facet slacks b - a.x (> tol if strict)."""
        normals = np.array([f.normal for f in self.facets])
        offsets = np.array([f.offset for f in self.facets])
        slack = offsets - np.atleast_2d(points) @ normals.T
        if strict:
            return np.all(slack > tol, axis=1)
        return np.all(slack >= -tol, axis=1)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def scaled(self, factor: float) -> "VertexPolytope":
        if factor <= 0:
            raise DomainError("Scale factor must be positive.")
        return VertexPolytope(dim=self.dim, vertices=factor * self.vertices)

    def to_model(self) -> PolytopeModel:
        return PolytopeModel(
            dim=self.dim,
            vertices=self.vertices.tolist(),
            halfspaces=[
                HalfspaceModel(a=f.normal.tolist(), b=f.offset)
                for f in self.facets
            ],
        )


@dataclass(frozen=True, eq=False)
class FacetPolytope:
    """Bounded polytope {x : a.x <= b} with the origin in its interior.

    Attributes:
        dim (int): Ambient dimension.
        normals (np.ndarray): (k, dim) halfspace normals a.
        offsets (np.ndarray): (k,) positive offsets b.
        vertices (np.ndarray): (v, dim) vertices, lexicographically sorted.
    """

    dim: int
    normals: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    vertices: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if np.any(self.offsets <= 0):
            raise UnboundedError("The origin must be interior: all b > 0.")

    def validate(self, tol: float = FACET_TOL) -> None:
        """Check cached vertices against the halfspaces.

        Raises:
            DegeneracyError: If a vertex violates a halfspace or lies on
                fewer than dim facets.
        """
        slack = self.offsets - self.vertices @ self.normals.T
        if np.any(slack < -tol):
            raise DegeneracyError("A cached vertex violates a halfspace.")
        tight = np.sum(np.abs(slack) <= tol, axis=1)
        if np.any(tight < self.dim):
            raise DegeneracyError("A cached vertex lies on too few facets.")

    @cached_property
    def hull(self) -> ConvexHull:
        return _hull(self.vertices)

    def contains(
        self, points: np.ndarray, strict: bool = False, tol: float = 0.0
    ) -> np.ndarray:
        """Membership via halfspace slacks b - a.x (> tol if strict)."""
        slack = self.offsets - np.atleast_2d(points) @ self.normals.T
        if strict:
            return np.all(slack > tol, axis=1)
        return np.all(slack >= -tol, axis=1)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def scaled(self, factor: float) -> "FacetPolytope":
        if factor <= 0:
            raise DomainError("Scale factor must be positive.")
        return FacetPolytope(
            dim=self.dim,
            normals=self.normals,
            offsets=factor * self.offsets,
            vertices=factor * self.vertices,
        )

    def to_model(self) -> PolytopeModel:
        return PolytopeModel(
            dim=self.dim,
            vertices=self.vertices.tolist(),
            halfspaces=[
                HalfspaceModel(a=a.tolist(), b=float(b))
                for a, b in zip(self.normals, self.offsets)
            ],
        )


Polytope = Union[VertexPolytope, FacetPolytope]


def _require_not_hemispherical(Z: DiscreteMeasure) -> None:
    _check_dim(Z.dim)
    if not hemisphere_check(Z):
        raise PreconditionError(
            "Support lies in a closed hemisphere; the origin is not interior."
        )


def body_of(Z: DiscreteMeasure) -> VertexPolytope:
    """Convex hull of the support of Z.

    Raises:
        PreconditionError: If the support lies in a closed hemisphere.
    """
    _require_not_hemispherical(Z)
    return VertexPolytope.from_points(Z.directions)


def polar_of(
    Z: DiscreteMeasure, body: VertexPolytope | None = None
) -> FacetPolytope:
    """Polar body {x : x.v <= 1 for v in supp Z}.

    Vertices come from the facets of the body: the facet a.x = b maps to
    the vertex a / b.

    Raises:
        PreconditionError: If the support lies in a closed hemisphere.
    """
    if body is None:
        body = body_of(Z)
    else:
        _check_dim(Z.dim)
    offsets = np.array([f.offset for f in body.facets])
    if np.any(offsets <= INTERIOR_TOL):
        raise UnboundedError("Origin on the boundary of the body.")
    normals = np.array([f.normal for f in body.facets])
    polar = FacetPolytope(
        dim=Z.dim,
        normals=np.array(Z.directions),
        offsets=np.ones(Z.size),
        vertices=_lexsorted(normals / offsets[:, None]),
    )
    polar.validate()
    return polar


def support_function(P: Polytope, u: Sequence[float] | np.ndarray) -> float:
    """Maximum of u.x over the vertices of P."""
    return float(np.max(P.vertices @ np.asarray(u, dtype=float)))


def in_interior_polar(
    x: Sequence[float] | np.ndarray, Z: DiscreteMeasure
) -> bool:
    """Whether x.v < 1 for every atom v."""
    dots = Z.directions @ np.asarray(x, dtype=float)
    return bool(np.all(dots < 1.0 - INTERIOR_TOL))


def lemma2_check(
    values: Sequence[float] | np.ndarray,
    Z: DiscreteMeasure,
    body: VertexPolytope | None = None,
) -> bool:
    """Test that t° is interior to the body for positive L_1-normalized t.

    Raises:
        DomainError: If the values are not one positive value per atom.
        NormalizationError: If |t:Z|_1 differs from 1 by more than 1e-10.
        PreconditionError: If the support lies in a closed hemisphere.
    """
    t = aligned_values(values, Z)
    if np.any(t <= 0):
        raise DomainError("Values must be positive.")
    norm = math.fsum(Z.weights * t)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"|t:Z|_1 = {norm!r}, expected 1.")
    if body is None:
        body = body_of(Z)
    point = t_circle(t, Z)
    return bool(body.contains(point, strict=True, tol=INTERIOR_TOL)[0])


def volume(P: Polytope) -> float:
    """Volume by central triangulation of the boundary.

    Raises:
        PreconditionError: If the origin is not interior.
        DegeneracyError: If a facet is lower dimensional.
    """
    _check_dim(P.dim)
    if not P.contains(np.zeros(P.dim), strict=True, tol=INTERIOR_TOL)[0]:
        raise PreconditionError("The origin must be interior to the polytope.")
    return _central_volume(P.vertices, P.hull)


def mc_volume(
    P: Polytope,
    samples: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threads: int | None = None,
) -> tuple[float, float]:
    """Rejection-sampling volume estimate in the tight bounding box.

    Returns:
        tuple[float, float]: Estimate and its standard error.
    """
    if samples < 1000:
        raise DomainError("At least 1000 samples are required.")
    low, high = P.bounding_box()
    box_volume = float(np.prod(high - low))

    def task(rng: np.random.Generator, count: int) -> Moments:
        points = low + (high - low) * rng.random((count, P.dim))
        return Moments.of(box_volume * P.contains(points).astype(float))

    moments = run_chunks(
        task, samples, seed, STREAM_MC_VOLUME, chunk_size, threads
    )
    return moments.mean, moments.stderr


def is_regular_simplex(Z: DiscreteMeasure, tol: float = 1e-10) -> bool:
    """Whether Z has n+1 atoms, pairwise dots -1/n and weights n/(n+1)."""
    if tol <= 0:
        raise DomainError("Tolerance must be positive.")
    n = Z.dim
    if Z.size != n + 1:
        return False
    gram = Z.directions @ Z.directions.T
    off_diagonal = gram[~np.eye(n + 1, dtype=bool)]
    return bool(
        np.all(np.abs(off_diagonal + 1.0 / n) <= tol)
        and np.all(np.abs(Z.weights - n / (n + 1)) <= tol)
    )


def unit_ball_in_polar(
    Z: DiscreteMeasure, count: int, seed: int, shrink: float = 0.999
) -> bool:
    """Sampled check that the unit ball lies inside the polar body."""
    rng = rng_stream(seed, STREAM_MC_VOLUME, 0)
    x = rng.standard_normal((count, Z.dim))
    x = shrink * x / np.linalg.norm(x, axis=1)[:, None]
    return bool(np.all(x @ Z.directions.T < 1.0 - INTERIOR_TOL))
