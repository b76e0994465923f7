import itertools
import logging
import math
import numpy as np

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from src.isomeasure.utils.errors import DomainError
from src.isomeasure.utils.measure import (
    DiscreteMeasure,
    InequalityViolation,
    LEMMA_TOL,
    LiftedMeasure,
    lift_map,
    require_isotropic,
)
from src.isomeasure.utils.polytope import (
    FacetPolytope,
    INTERIOR_TOL,
    VertexPolytope,
    body_of,
    in_interior_polar,
    polar_of,
)
from src.isomeasure.utils.rearrangement import (
    LOG_SQRT_PI,
    log_phi1_prime,
    log_phi2,
    log_phi2_prime,
    phi1,
    phi2,
)

logger = logging.getLogger(__name__)

BALL_BARTHE_SLACK = 1e-10
EQUALITY_REL = 1e-9
COMPONENT_TOL = 1e-12
MAX_BRUTE_FORCE_SUPPORT = 12


@dataclass(frozen=True, eq=False)
class TransportProbe:
    """Everything evaluated for a transport map at one point y.

    Attributes:
        y (np.ndarray): Evaluation point in R^{n+1}.
        Ty (np.ndarray): Image of y.
        jacobian (np.ndarray): dT(y), symmetric.
        det_jacobian (float): det dT(y).
        log_det_jacobian (float): log det dT(y).
        min_eigenvalue (float): Smallest eigenvalue of dT(y); may underflow.
        log_scale (float): Logarithm of the largest weight c_k phi'(y.w_k).
        min_scaled_eigenvalue (float): Smallest eigenvalue of
            dT(y) exp(-log_scale), which decides positive definiteness.
        ball_barthe_lhs (float): det of sum c_k phi'(y.w_k) w_k w_k^T.
        ball_barthe_rhs (float): exp of sum c_k log phi'(y.w_k).
        log_ball_barthe_rhs (float): Logarithm of ball_barthe_rhs.
        phi_values (np.ndarray): phi(y.w_k) per lifted atom.
        phi_prime_values (np.ndarray): phi'(y.w_k) per lifted atom.
        identities (dict): Residuals (or slacks) of the pointwise steps of
            the proof chain, keyed by step name.
        in_cone (bool | None): For the second transport, whether Ty lies
            in the cone over -sqrt(n) int Z_inf.
    """

    y: np.ndarray
    Ty: np.ndarray
    jacobian: np.ndarray = field(repr=False)
    det_jacobian: float
    log_det_jacobian: float
    min_eigenvalue: float
    log_scale: float
    min_scaled_eigenvalue: float
    ball_barthe_lhs: float
    ball_barthe_rhs: float
    log_ball_barthe_rhs: float
    phi_values: np.ndarray = field(repr=False)
    phi_prime_values: np.ndarray = field(repr=False)
    identities: dict = field(default_factory=dict)
    in_cone: bool | None = None

    @property
    def ball_barthe_holds(self) -> bool:
        return (
            self.log_det_jacobian
            >= self.log_ball_barthe_rhs - BALL_BARTHE_SLACK
        )

    @property
    def positive_definite(self) -> bool:
        return self.min_scaled_eigenvalue > 0

    def to_dict(self) -> dict:
        return {
            "y": self.y.tolist(),
            "Ty": self.Ty.tolist(),
            "jacobian": self.jacobian.tolist(),
            "det_jacobian": self.det_jacobian,
            "log_det_jacobian": self.log_det_jacobian,
            "min_eigenvalue": self.min_eigenvalue,
            "log_scale": self.log_scale,
            "ball_barthe_lhs": self.ball_barthe_lhs,
            "ball_barthe_rhs": self.ball_barthe_rhs,
            "identities": dict(self.identities),
            "in_cone": self.in_cone,
        }


def in_cone_thm1(y: Sequence[float] | np.ndarray, Z: DiscreteMeasure) -> bool:
    """Whether y.s(u) > 0 for every atom u (margin 1e-12 |y|)."""
    y = np.asarray(y, dtype=float)
    dots = lift_map(Z.directions, Z.dim) @ y
    return bool(np.all(dots > INTERIOR_TOL * np.linalg.norm(y)))


def in_cone_thm1_polar_form(
    y: Sequence[float] | np.ndarray, Z: DiscreteMeasure
) -> bool:
    """Same cone through its slices: r > 0 and (sqrt(n)/r) x in int Z_inf*."""
    y = np.asarray(y, dtype=float)
    x, r = y[:-1], y[-1]
    if r <= 0:
        return False
    return in_interior_polar(math.sqrt(Z.dim) / r * x, Z)


def in_cone_thm2(
    z: Sequence[float] | np.ndarray,
    Z: DiscreteMeasure,
    body: VertexPolytope | None = None,
) -> bool:
    """Whether z_{n+1} > 0 and z|R^n / z_{n+1} lies in -sqrt(n) int Z_inf."""
    z = np.asarray(z, dtype=float)
    r = z[-1]
    if r <= 0:
        return False
    if body is None:
        body = body_of(Z)
    point = -z[:-1] / (r * math.sqrt(Z.dim))
    return bool(body.contains(point, strict=True)[0])


def _evaluate(
    y: np.ndarray,
    Zbar: LiftedMeasure,
    phi: Callable,
    log_phi_prime: Callable,
    log_phi: Callable | None = None,
) -> dict:
    """Image, differential and Ball-Barthe sides of T at y.

    The weights c_k phi'(y.w_k) of dT(y), and c_k phi(y.w_k) of Ty when
    log_phi is given, are divided by their maximum before summing, so
    the determinant and the direction of Ty survive far out where the
    weights underflow.
    """
    W, c = Zbar.directions, Zbar.weights
    dots = W @ y
    values = phi(dots)
    log_primes = log_phi_prime(dots)
    primes = np.exp(log_primes)
    if log_phi is None:
        image_scale = 0.0
        scaled_image = (c * values) @ W
    else:
        log_terms = np.log(c) + log_phi(dots)
        image_scale = float(np.max(log_terms))
        scaled_image = np.exp(log_terms - image_scale) @ W
    log_weights = np.log(c) + log_primes
    log_scale = float(np.max(log_weights))
    scaled = np.einsum("k,ki,kj->ij", np.exp(log_weights - log_scale), W, W)
    scaled = 0.5 * (scaled + scaled.T)
    sign, scaled_log_det = np.linalg.slogdet(scaled)
    log_det = (
        float(scaled_log_det) + Zbar.dim * log_scale if sign > 0 else -math.inf
    )
    min_scaled = float(np.linalg.eigvalsh(scaled)[0])
    log_rhs = math.fsum(c * log_primes)
    return {
        "y": y,
        "Ty": math.exp(image_scale) * scaled_image,
        "jacobian": math.exp(log_scale) * scaled,
        "det_jacobian": float(np.exp(log_det)) if sign > 0 else 0.0,
        "log_det_jacobian": log_det,
        "min_eigenvalue": math.exp(log_scale) * min_scaled,
        "log_scale": log_scale,
        "min_scaled_eigenvalue": min_scaled,
        "ball_barthe_lhs": float(np.exp(log_det)) if sign > 0 else 0.0,
        "ball_barthe_rhs": math.exp(log_rhs),
        "log_ball_barthe_rhs": log_rhs,
        "phi_values": values,
        "phi_prime_values": primes,
        "dots": dots,
        "log_primes": log_primes,
        "scaled_image": scaled_image,
    }


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def transport1(
    y: Sequence[float] | np.ndarray, Zbar: LiftedMeasure
) -> TransportProbe:
    """Evaluate T(y) = sum c_k w_k phi1(y.w_k) and its differential.

    Identities recorded (all should be ~0 or >= 0):
        lemma1_slack: sum c_k phi1^2 - |Ty|^2, relative (>= 0).
        rearrangement: relative error of
            sum c_k y.w_k = sum c_k (phi1^2 - log phi1' + log sqrt(pi)).
        centroid: relative error of sum c_k y.w_k = sqrt(n+1) y_{n+1}.

    Raises:
        DomainError: If y lies outside the cone.
    """
    y = np.asarray(y, dtype=float)
    if not in_cone_thm1(y, Zbar.base):
        raise DomainError("y must lie in the open cone y.s(u) > 0.")
    data = _evaluate(y, Zbar, phi1, log_phi1_prime)
    data.pop("scaled_image")
    c = Zbar.weights
    dots, values = data.pop("dots"), data["phi_values"]
    log_primes = data.pop("log_primes")
    linear = math.fsum(c * dots)
    squares = math.fsum(c * values**2)
    data["identities"] = {
        "lemma1_slack": (squares - float(data["Ty"] @ data["Ty"]))
        / max(1.0, squares),
        "rearrangement": _relative(
            linear,
            math.fsum(c * (values**2 - log_primes + LOG_SQRT_PI)),
        ),
        "centroid": _relative(linear, math.sqrt(Zbar.dim) * y[-1]),
    }
    return TransportProbe(**data)


def transport2(
    y: Sequence[float] | np.ndarray,
    Zbar: LiftedMeasure,
    body: VertexPolytope | None = None,
) -> TransportProbe:
    """Evaluate T(y) = sum c_k w_k phi2(y.w_k) on all of R^{n+1}.

    Identities recorded:
        projection: max error of Ty|R^n against
            -sqrt((n+1)/n) sum c_i u_i phi2(y.s(u_i)).
        last_component: error of Ty.e_{n+1} against
            (sqrt(n+1)/n) sum c_i phi2(y.s(u_i)).
        last_component_lifted: error between that and
            (1/sqrt(n+1)) sum c_k phi2(y.w_k).
        isotropy: relative error of sum c_k (y.w_k)^2 = |y|^2.
        rearrangement: relative error of
            |y|^2 = sum c_k (phi2 - log phi2' - log sqrt(pi)).
    """
    y = np.asarray(y, dtype=float)
    base = Zbar.base
    n = base.dim
    data = _evaluate(y, Zbar, phi2, log_phi2_prime, log_phi2)
    scaled_image = data.pop("scaled_image")
    c_bar = Zbar.weights
    dots, values = data.pop("dots"), data["phi_values"]
    log_primes = data.pop("log_primes")
    Ty = data["Ty"]
    scale = max(1.0, float(np.max(np.abs(Ty))))
    projection = -math.sqrt((n + 1) / n) * (
        (base.weights * values) @ base.directions
    )
    last = math.sqrt(n + 1) / n * math.fsum(base.weights * values)
    last_lifted = math.fsum(c_bar * values) / math.sqrt(n + 1)
    norm_sq = float(y @ y)
    data["identities"] = {
        "projection": float(np.max(np.abs(Ty[:-1] - projection))) / scale,
        "last_component": abs(Ty[-1] - last) / scale,
        "last_component_lifted": abs(last - last_lifted) / scale,
        "isotropy": _relative(norm_sq, math.fsum(c_bar * dots**2)),
        "rearrangement": _relative(
            norm_sq, math.fsum(c_bar * (values - log_primes - LOG_SQRT_PI))
        ),
    }
    data["in_cone"] = in_cone_thm2(scaled_image, base, body)
    return TransportProbe(**data)


def components_consistent(probe: TransportProbe) -> bool:
    """Whether the coordinate decompositions of T2 y agree within 1e-12."""
    return all(
        probe.identities[key] <= COMPONENT_TOL
        for key in ("projection", "last_component", "last_component_lifted")
    )


def finite_difference_jacobian(
    transport: Callable[[np.ndarray], np.ndarray],
    y: Sequence[float] | np.ndarray,
    step: float = 1e-6,
) -> np.ndarray:
    """Central difference Jacobian of a map R^{n+1} -> R^{n+1}."""
    y = np.asarray(y, dtype=float)
    columns = []
    for i in range(y.size):
        offset = np.zeros_like(y)
        offset[i] = step
        forward, backward = transport(y + offset), transport(y - offset)
        columns.append((forward - backward) / (2.0 * step))
    return np.column_stack(columns)


def transport_map(
    Zbar: LiftedMeasure, which: int
) -> Callable[[np.ndarray], np.ndarray]:
    """Bare map y -> Ty of the first or second transport."""
    phi = {1: phi1, 2: phi2}[which]
    W, c = Zbar.directions, Zbar.weights

    def apply(y: np.ndarray) -> np.ndarray:
        return (c * phi(W @ y)) @ W

    return apply


def injectivity_spot_check(
    transport: Callable[[np.ndarray], np.ndarray],
    first: np.ndarray,
    second: np.ndarray,
) -> int:
    """Count pairs y != y' whose images coincide; expected 0."""
    collisions = 0
    for a, b in zip(first, second):
        if np.array_equal(a, b):
            continue
        if np.array_equal(transport(a), transport(b)):
            collisions += 1
    return collisions


class BallBartheResult(NamedTuple):
    lhs: float
    rhs: float
    equality_expected: bool
    equality_observed: bool


def _products_constant(
    directions: np.ndarray, values: np.ndarray, rel: float
) -> bool:
    m, n = directions.shape
    if m > MAX_BRUTE_FORCE_SUPPORT:
        raise DomainError(
            f"Equality detection enumerates n-subsets; support of {m} atoms "
            f"exceeds {MAX_BRUTE_FORCE_SUPPORT}."
        )
    products = [
        float(np.prod(values[list(subset)]))
        for subset in itertools.combinations(range(m), n)
        if abs(np.linalg.det(directions[list(subset)])) > 1e-9
    ]
    return max(products) - min(products) <= rel * max(products)


def ball_barthe_check(
    nu: DiscreteMeasure,
    values: Sequence[float] | np.ndarray,
    tol: float = LEMMA_TOL,
    rel: float = EQUALITY_REL,
) -> BallBartheResult:
    """Compare det sum c t u u^T with exp sum c log t on an isotropic nu.

    Equality is expected exactly when t(v_1)...t(v_n) takes one value over
    the linearly independent n-subsets of the support.

    Raises:
        PreconditionError: If nu is not isotropic within tol.
        DomainError: If a value is not positive or the support has more
            than 12 atoms.
        InequalityViolation: If the determinant falls below the bound.
    """
    require_isotropic(nu, tol)
    t = np.asarray(values, dtype=float)
    if t.shape != (nu.size,) or np.any(t <= 0):
        raise DomainError("One positive value per atom is required.")
    matrix = np.einsum("i,ij,ik->jk", nu.weights * t, nu.directions,
                       nu.directions)
    lhs = float(np.linalg.det(matrix))
    rhs = math.exp(math.fsum(nu.weights * np.log(t)))
    if lhs < rhs * (1.0 - BALL_BARTHE_SLACK):
        raise InequalityViolation(
            f"det = {lhs!r} is below exp(int log t) = {rhs!r}."
        )
    return BallBartheResult(
        lhs=lhs,
        rhs=rhs,
        equality_expected=_products_constant(nu.directions, t, rel),
        equality_observed=abs(lhs - rhs) <= rel * rhs,
    )


def _uniform_in(
    polytope: FacetPolytope | VertexPolytope,
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    low, high = polytope.bounding_box()
    accepted: list[np.ndarray] = []
    total = 0
    while total < count:
        batch = low + (high - low) * rng.random((4 * count, low.size))
        batch = batch[polytope.contains(batch, strict=True)]
        accepted.append(batch)
        total += len(batch)
    return np.vstack(accepted)[:count]


def sample_cone_thm1(
    Z: DiscreteMeasure,
    count: int,
    rng: np.random.Generator,
    polar: FacetPolytope | None = None,
    margin: float = 0.9,
) -> np.ndarray:
    """Points (x, r) of the first cone with x in margin (r/sqrt n) Z_inf*."""
    if polar is None:
        polar = polar_of(Z)
    r = rng.uniform(0.2, 2.0, count)
    x = _uniform_in(polar, count, rng)
    x = margin * (r / math.sqrt(Z.dim))[:, None] * x
    return np.column_stack([x, r])


def transport_images(
    ys: np.ndarray, Zbar: LiftedMeasure, which: int
) -> np.ndarray:
    """Images of a batch of points (rows) under the chosen transport."""
    phi = {1: phi1, 2: phi2}[which]
    W, c = Zbar.directions, Zbar.weights
    return (phi(ys @ W.T) * c) @ W


def _scaled_images2(ys: np.ndarray, Zbar: LiftedMeasure) -> np.ndarray:
    """Rows T2 y, each divided by its largest term c_k phi2(y.w_k)."""
    W = Zbar.directions
    log_terms = np.log(Zbar.weights) + log_phi2(ys @ W.T)
    log_terms -= np.max(log_terms, axis=1, keepdims=True)
    return np.exp(log_terms) @ W


def images_in_cone_thm2(
    ys: np.ndarray,
    Zbar: LiftedMeasure,
    body: VertexPolytope | None = None,
) -> np.ndarray:
    """Row-wise membership of T2 y in the second cone (expected all True).

    Membership is decided on rescaled images, so points far out where
    the image itself underflows are still classified.

    Args:
        ys (np.ndarray): (N, n+1) points.
        Zbar (LiftedMeasure): Lifted measure defining T2.
        body (VertexPolytope | None): Hull of the base support.

    Returns:
        np.ndarray: (N,) booleans.
    """
    if body is None:
        body = body_of(Zbar.base)
    images = _scaled_images2(np.atleast_2d(ys), Zbar)
    heights = images[:, -1]
    inside = np.zeros(len(images), dtype=bool)
    positive = heights > 0
    points = -images[positive, :-1] / (
        heights[positive, None] * math.sqrt(Zbar.base_dim)
    )
    inside[positive] = body.contains(points, strict=True)
    return inside


def log_ball_barthe_ratios(
    ys: np.ndarray, Zbar: LiftedMeasure, which: int
) -> np.ndarray:
    """log det dT(y) - sum c_k log phi'(y.w_k) for a batch; all >= 0.

    Each Jacobian is formed from weights divided by their row maximum and
    the scale is restored in the logarithm.
    """
    log_phi_prime = {1: log_phi1_prime, 2: log_phi2_prime}[which]
    W, c = Zbar.directions, Zbar.weights
    log_primes = log_phi_prime(ys @ W.T)
    log_weights = np.log(c) + log_primes
    log_scale = np.max(log_weights, axis=1)
    jacobians = np.einsum(
        "nk,ki,kj->nij", np.exp(log_weights - log_scale[:, None]), W, W
    )
    sign, log_det = np.linalg.slogdet(jacobians)
    log_det = np.where(sign > 0, log_det + Zbar.dim * log_scale, -np.inf)
    return log_det - log_primes @ c
