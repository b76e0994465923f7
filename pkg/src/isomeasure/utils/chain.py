"""Pointwise and integral checks along the two transport proofs.

Each chain report records the pointwise inequality steps at sampled
points, a Monte Carlo estimate of the cone integral against its closed
form, and the resulting volume inequality.
"""

import logging
import math
import numpy as np

from src.isomeasure.utils.data_model import ChainReport, CheckModel
from src.isomeasure.utils.errors import DomainError
from src.isomeasure.utils.measure import (
    DiscreteMeasure,
    LiftedMeasure,
    lift,
    require_isotropic,
)
from src.isomeasure.utils.polytope import (
    FacetPolytope,
    VertexPolytope,
    body_of,
    polar_of,
    volume,
)
from src.isomeasure.utils.sampling import (
    DEFAULT_CHUNK_SIZE,
    STREAM_CHAIN_T1,
    STREAM_CHAIN_T2,
    STREAM_PROBES,
    STREAM_PUSHFORWARD,
    Moments,
    rng_stream,
    run_chunks,
)
from src.isomeasure.utils.transport import (
    BALL_BARTHE_SLACK,
    TransportProbe,
    components_consistent,
    finite_difference_jacobian,
    injectivity_spot_check,
    log_ball_barthe_ratios,
    sample_cone_thm1,
    transport1,
    transport2,
    transport_map,
)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
CHAIN_TOL = 1e-7
IDENTITY_TOL = 1e-10
JACOBIAN_TOL = 1e-5
JACOBIAN_PROBES = 100
STDERR_FACTOR = 3.0


def _r_max(n: int) -> float:
    return 40.0 / math.sqrt(n + 1)


def cone_constant(n: int) -> float:
    """n! (n+1)^{-(n+1)/2}, the integral of r^n exp(-sqrt(n+1) r)."""
    return math.exp(math.lgamma(n + 1) - 0.5 * (n + 1) * math.log(n + 1))


def thm1_closed_form(polar_volume: float, n: int) -> float:
    """|Z_inf*| n^{-n/2} n! (n+1)^{-(n+1)/2}; at most 1."""
    return polar_volume * n ** (-n / 2) * cone_constant(n)


def thm2_closed_form(body_volume: float, n: int) -> float:
    """n^{n/2} n! (n+1)^{-(n+1)/2} |Z_inf|; at least 1."""
    return body_volume * n ** (n / 2) * cone_constant(n)


def _prepare(
    Z: DiscreteMeasure, samples: int, tol: float
) -> tuple[LiftedMeasure, VertexPolytope]:
    if samples < MIN_SAMPLES:
        raise DomainError(
            f"At least {MIN_SAMPLES} samples are required, got {samples}."
        )
    require_isotropic(Z, tol, centered=True)
    return lift(Z, tol), body_of(Z)


def _cone_integral(
    polytope: VertexPolytope | FacetPolytope,
    radius_scale: float,
    n: int,
    samples: int,
    seed: int,
    stream: int,
    chunk_size: int,
    threads: int | None,
) -> Moments:
    """Estimate the integral over r > 0 of exp(-sqrt(n+1) r) vol(a r K).

    r is uniform on [0, r_max] and the slice point uniform in the bounding
    box of K, so each draw contributes
    r_max (a r)^n |box| 1[p in int K] exp(-sqrt(n+1) r).
    """
    r_max = _r_max(n)
    low, high = polytope.bounding_box()
    box_volume = float(np.prod(high - low))
    decay = math.sqrt(n + 1)

    def task(rng: np.random.Generator, count: int) -> Moments:
        r = r_max * rng.random(count)
        points = low + (high - low) * rng.random((count, n))
        inside = polytope.contains(points, strict=True)
        values = (
            r_max
            * (radius_scale * r) ** n
            * box_volume
            * np.exp(-decay * r)
            * inside
        )
        return Moments.of(values)

    return run_chunks(task, samples, seed, stream, chunk_size, threads)


def _mc_check(
    name: str, moments: Moments, closed_form: float, n: int
) -> CheckModel:
    deviation = abs(moments.mean - closed_form)
    return CheckModel(
        name=name,
        passed=bool(
            deviation <= STDERR_FACTOR * moments.stderr
            or deviation <= 1e-9 * closed_form
        ),
        details={
            "estimate": moments.mean,
            "stderr": moments.stderr,
            "closed_form": closed_form,
            "deviation": deviation,
            "stderr_factor": STDERR_FACTOR,
            "r_max": _r_max(n),
        },
    )


def _jacobian_check(
    probes: list[TransportProbe], Zbar: LiftedMeasure, which: int
) -> CheckModel:
    transport = transport_map(Zbar, which)
    worst = 0.0
    for probe in probes[:JACOBIAN_PROBES]:
        numeric = finite_difference_jacobian(transport, probe.y)
        scale = max(1.0, float(np.max(np.abs(probe.jacobian))))
        worst = max(
            worst, float(np.max(np.abs(numeric - probe.jacobian))) / scale
        )
    return CheckModel(
        name="jacobian_consistency",
        passed=bool(worst <= JACOBIAN_TOL),
        details={"max_error": worst, "tol": JACOBIAN_TOL},
    )


def _pointwise_checks(
    probes: list[TransportProbe], identities: list[str]
) -> list[CheckModel]:
    min_eigenvalue = min(p.min_eigenvalue for p in probes)
    min_scaled = min(p.min_scaled_eigenvalue for p in probes)
    log_slacks = [p.log_det_jacobian - p.log_ball_barthe_rhs for p in probes]
    checks = [
        CheckModel(
            name="positive_definite",
            passed=all(p.positive_definite for p in probes),
            details={
                "min_eigenvalue": min_eigenvalue,
                "min_scaled_eigenvalue": min_scaled,
            },
        ),
        CheckModel(
            name="ball_barthe_step",
            passed=all(p.ball_barthe_holds for p in probes),
            details={
                "min_log_slack": min(log_slacks),
                "slack": BALL_BARTHE_SLACK,
            },
        ),
    ]
    for key in identities:
        worst = max(p.identities[key] for p in probes)
        checks.append(
            CheckModel(
                name=f"{key}_identity",
                passed=bool(worst <= IDENTITY_TOL),
                details={"max_residual": worst, "tol": IDENTITY_TOL},
            )
        )
    return checks


def chain_verify_thm1(
    Z: DiscreteMeasure,
    samples: int,
    seed: int,
    probes: int = 1000,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threads: int | None = None,
    tol: float = CHAIN_TOL,
) -> ChainReport:
    """Follow the polar-body chain: pointwise steps, cone integral, bound.

    Raises:
        DomainError: If samples < 10**4.
        PreconditionError: If Z is not isotropic centered within tol.
    """
    Zbar, body = _prepare(Z, samples, tol)
    polar = polar_of(Z, body)
    n = Z.dim
    rng = rng_stream(seed, STREAM_PROBES, 1)
    points = sample_cone_thm1(Z, 2 * probes, rng, polar)
    evaluated = [transport1(y, Zbar) for y in points[:probes]]
    logger.debug("Evaluated %d probes of the first transport", probes)

    checks = _pointwise_checks(evaluated, ["rearrangement", "centroid"])
    worst_lemma1 = min(p.identities["lemma1_slack"] for p in evaluated)
    checks.append(
        CheckModel(
            name="lemma1_step",
            passed=bool(worst_lemma1 >= -IDENTITY_TOL),
            details={"min_relative_slack": worst_lemma1},
        )
    )
    checks.append(_jacobian_check(evaluated, Zbar, 1))
    collisions = injectivity_spot_check(
        transport_map(Zbar, 1), points[:probes], points[probes:]
    )
    checks.append(
        CheckModel(
            name="injectivity",
            passed=collisions == 0,
            details={"pairs": probes, "collisions": collisions},
        )
    )

    polar_volume = volume(polar)
    closed_form = thm1_closed_form(polar_volume, n)
    moments = _cone_integral(
        polar,
        1.0 / math.sqrt(n),
        n,
        samples,
        seed,
        STREAM_CHAIN_T1,
        chunk_size,
        threads,
    )
    checks.append(_mc_check("cone_integral", moments, closed_form, n))
    checks.append(
        CheckModel(
            name="theorem_bound",
            passed=bool(closed_form <= 1.0 + 1e-9),
            details={
                "closed_form": closed_form,
                "polar_volume": polar_volume,
                "equality": bool(abs(closed_form - 1.0) <= 1e-9),
            },
        )
    )
    return ChainReport(
        theorem="T1",
        n=n,
        samples=samples,
        seed=seed,
        probes=probes,
        checks=checks,
    )


def chain_verify_thm2(
    Z: DiscreteMeasure,
    samples: int,
    seed: int,
    probes: int = 1000,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threads: int | None = None,
    tol: float = CHAIN_TOL,
) -> ChainReport:
    """Follow the body chain from the Gaussian integral to the volume bound.

    Besides the pointwise steps and the cone integral, the push-forward
    mass of exp(-sqrt(n+1) Ty.e_{n+1}) |dT(y)| is estimated with y drawn
    from the density pi^{-(n+1)/2} exp(-|y|^2); it must lie between 1 and
    the closed form.

    Raises:
        DomainError: If samples < 10**4.
        PreconditionError: If Z is not isotropic centered within tol.
    """
    Zbar, body = _prepare(Z, samples, tol)
    n = Z.dim
    rng = rng_stream(seed, STREAM_PROBES, 2)
    points = rng.standard_normal((2 * probes, n + 1))
    evaluated = [transport2(y, Zbar, body) for y in points[:probes]]
    logger.debug("Evaluated %d probes of the second transport", probes)

    checks = _pointwise_checks(evaluated, ["isotropy", "rearrangement"])
    checks.append(
        CheckModel(
            name="component_decomposition",
            passed=all(components_consistent(p) for p in evaluated),
            details={
                key: max(p.identities[key] for p in evaluated)
                for key in (
                    "projection",
                    "last_component",
                    "last_component_lifted",
                )
            },
        )
    )
    outside = sum(1 for p in evaluated if not p.in_cone)
    checks.append(
        CheckModel(
            name="image_in_cone",
            passed=outside == 0,
            details={"outside": outside},
        )
    )
    checks.append(_jacobian_check(evaluated, Zbar, 2))
    collisions = injectivity_spot_check(
        transport_map(Zbar, 2), points[:probes], points[probes:]
    )
    checks.append(
        CheckModel(
            name="injectivity",
            passed=collisions == 0,
            details={"pairs": probes, "collisions": collisions},
        )
    )

    body_volume = volume(body)
    closed_form = thm2_closed_form(body_volume, n)
    checks.append(
        CheckModel(
            name="theorem_bound",
            passed=bool(1.0 <= closed_form + 1e-9),
            details={
                "closed_form": closed_form,
                "body_volume": body_volume,
                "equality": bool(abs(closed_form - 1.0) <= 1e-9),
            },
        )
    )

    def pushforward(rng: np.random.Generator, count: int) -> Moments:
        ys = rng.standard_normal((count, n + 1)) / math.sqrt(2.0)
        return Moments.of(np.exp(log_ball_barthe_ratios(ys, Zbar, 2)))

    mass = run_chunks(
        pushforward, samples, seed, STREAM_PUSHFORWARD, chunk_size, threads
    )
    checks.append(
        CheckModel(
            name="pushforward_mass",
            passed=bool(
                mass.mean >= 1.0 - 1e-12
                and mass.mean - STDERR_FACTOR * mass.stderr
                <= closed_form * (1.0 + 1e-9)
            ),
            details={
                "estimate": mass.mean,
                "stderr": mass.stderr,
                "closed_form": closed_form,
            },
        )
    )

    moments = _cone_integral(
        body,
        math.sqrt(n),
        n,
        samples,
        seed,
        STREAM_CHAIN_T2,
        chunk_size,
        threads,
    )
    checks.append(_mc_check("cone_integral", moments, closed_form, n))
    return ChainReport(
        theorem="T2",
        n=n,
        samples=samples,
        seed=seed,
        probes=probes,
        checks=checks,
    )
