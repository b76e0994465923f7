"""Monotone rearrangements between the exponential and Gaussian laws.

phi1 maps (0, inf) to R and pushes the density e^{-s} on (0, inf) to the
density e^{-s^2}/sqrt(pi); phi2 maps R to (0, inf) and does the reverse.
Both are evaluated through the log-domain normal CDF, which stays
accurate in the tails:

    phi1(t) = -ndtri_exp(-t) / sqrt(2)      (erf(phi1) = 1 - 2 e^{-t})
    phi2(t) = -log_ndtr(-sqrt(2) t)         (phi2 = -log(erfc(t) / 2))
"""

import math
import numpy as np

from numpy.typing import ArrayLike
from scipy.special import log_ndtr, ndtri_exp

from src.isomeasure.utils.errors import DomainError

LOG_SQRT_PI = 0.5 * math.log(math.pi)
SQRT2 = math.sqrt(2.0)


def _positive(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise DomainError("phi1 is defined for finite t > 0 only.")
    return t


def phi1(t: ArrayLike) -> np.ndarray:
    """Exponential-to-Gaussian rearrangement.

    Args:
        t (ArrayLike): Points of (0, inf).

    Returns:
        np.ndarray: phi1(t), increasing from -inf to inf.

    Raises:
        DomainError: If some t is not finite and positive.
    """
    return -ndtri_exp(-_positive(t)) / SQRT2


def log_phi1_prime(t: ArrayLike) -> np.ndarray:
    """Logarithm of phi1'(t), i.e. log sqrt(pi) + phi1(t)^2 - t.

    Args:
        t (ArrayLike): Points of (0, inf).

    Returns:
        np.ndarray: log phi1'(t).
    """
    t = _positive(t)
    return LOG_SQRT_PI + phi1(t) ** 2 - t


def phi1_prime(t: ArrayLike) -> np.ndarray:
    """Derivative sqrt(pi) exp(phi1(t)^2 - t), positive on (0, inf)."""
    return np.exp(log_phi1_prime(t))


def phi2(t: ArrayLike) -> np.ndarray:
    """Gaussian-to-exponential rearrangement.

    Args:
        t (ArrayLike): Points of R.

    Returns:
        np.ndarray: phi2(t) in (0, inf). Below t ~ -27 the value
            underflows to 0; use log_phi2 there.
    """
    return -log_ndtr(-SQRT2 * np.asarray(t, dtype=float))


def log_phi2(t: ArrayLike) -> np.ndarray:
    """Logarithm of phi2(t), finite on all of R.

    With q = (1 + erf t) / 2 we have phi2 = -log(1 - q), so for small q
    log phi2 = log q + log(-log1p(-q) / q) and the correction tends to 0.

    Args:
        t (ArrayLike): Points of R.

    Returns:
        np.ndarray: log phi2(t).
    """
    t = np.asarray(t, dtype=float)
    log_q = log_ndtr(SQRT2 * t)
    q = np.exp(np.minimum(log_q, -1.0))
    safe_q = np.where(q > 0, q, 1.0)
    correction = np.where(q > 0, np.log(-np.log1p(-safe_q) / safe_q), 0.0)
    direct = np.log(phi2(np.where(log_q < -1.0, 0.0, t)))
    return np.where(log_q < -1.0, log_q + correction, direct)


def log_phi2_prime(t: ArrayLike) -> np.ndarray:
    """Logarithm of phi2'(t), i.e. phi2(t) - t^2 - log sqrt(pi).

    Args:
        t (ArrayLike): Points of R.

    Returns:
        np.ndarray: log phi2'(t), finite wherever t^2 is.
    """
    t = np.asarray(t, dtype=float)
    return phi2(t) - t**2 - LOG_SQRT_PI


def phi2_prime(t: ArrayLike) -> np.ndarray:
    """Derivative exp(phi2(t) - t^2) / sqrt(pi), positive on R."""
    return np.exp(log_phi2_prime(t))


def phi1_identity_residual(t: ArrayLike) -> np.ndarray:
    """|-t + log sqrt(pi) + phi1^2 - log phi1'| with phi1' evaluated."""
    t = _positive(t)
    return np.abs(-t + LOG_SQRT_PI + phi1(t) ** 2 - np.log(phi1_prime(t)))


def phi2_identity_residual(t: ArrayLike) -> np.ndarray:
    """|t^2 - phi2 + log phi2' + log sqrt(pi)| with phi2' evaluated."""
    t = np.asarray(t, dtype=float)
    return np.abs(t**2 - phi2(t) + np.log(phi2_prime(t)) + LOG_SQRT_PI)


def phi1_defining_residual(t: ArrayLike) -> np.ndarray:
    """Residual of the defining equation in log form: log(erfc(phi)/2) = -t."""
    t = _positive(t)
    return np.abs(log_ndtr(-SQRT2 * phi1(t)) + t)


def phi2_defining_residual(t: ArrayLike) -> np.ndarray:
    """Residual of log(1 - e^{-phi}) = log((1 + erf t) / 2)."""
    t = np.asarray(t, dtype=float)
    return np.abs(np.log(-np.expm1(-phi2(t))) - log_ndtr(SQRT2 * t))
