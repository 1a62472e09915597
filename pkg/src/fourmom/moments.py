"""Moment and quadrature representations of the four-moment model.

A state is either a moment vector ``M = (m0, m1, m2, m3)`` or a two-node
quadrature ``(rho1, rho2, v1, v2)`` with ``v1 >= v2``.  The reduced
coordinates ``(m0, m1, e, q)`` are the centred second and third moments,
left unnormalised::

    e = m0*m2 - m1**2
    q = (m3*m0**2 - m1**3) - 3*m1*e

The frontier of the moment space is ``e = 0`` (monokinetic states).
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import FrontierError, NonpositiveDensityError, UnrealizableMomentError

DEFAULT_EPS1 = 1e-9
# e in (-E_NEG_RTOL * scale, 0] is round-off and snaps to the frontier
E_NEG_RTOL = 1e-12
# below the smallest normal double, e is pure underflow noise
E_NEG_ATOL = 2.2250738585072014e-308


class MomentVector(NamedTuple):
    m0: float
    m1: float
    m2: float
    m3: float


class QuadratureState(NamedTuple):
    rho1: float
    rho2: float
    v1: float
    v2: float


class ReducedMoments(NamedTuple):
    m0: float
    m1: float
    e: float
    q: float


class SigmaCoefficients(NamedTuple):
    sigma0: float
    sigma1: float


def _check_density(m0):
    if not m0 > 0.0:
        raise NonpositiveDensityError(f"nonpositive density m0={m0!r}")


def moments_from_quadrature(u) -> MomentVector:
    rho1, rho2, v1, v2 = u
    return MomentVector(
        rho1 + rho2,
        rho1 * v1 + rho2 * v2,
        rho1 * v1**2 + rho2 * v2**2,
        rho1 * v1**3 + rho2 * v2**3,
    )


def reduced_from_moments(m) -> ReducedMoments:
    m0, m1, m2, m3 = m
    _check_density(m0)
    e = m0 * m2 - m1 * m1
    q = (m3 * m0 * m0 - m1**3) - 3.0 * m1 * e
    return ReducedMoments(m0, m1, e, q)


def realizable_e(m0, m1, m2, e):
    """Snap round-off negative ``e`` to zero, raise if it is genuinely negative."""
    if e >= 0.0:
        return e
    scale = max(m0 * m2, m1 * m1)
    if e > -E_NEG_RTOL * scale - E_NEG_ATOL:
        return 0.0
    raise UnrealizableMomentError(
        f"moments outside the moment space: e={e!r} (m0={m0!r}, m1={m1!r}, m2={m2!r})"
    )


def two_node_from_reduced(m0, m1, e, q) -> QuadratureState:
    """Closed-form two-node inversion for ``e > 0``.

    Every branch avoids the subtraction of nearly equal quantities: the
    light node (the one running away as e -> 0 at fixed q) gets its weight
    from ``2*m0*e**3 / (s*(s+|q|))`` and the heavy node keeps the rest.
    """
    s = math.sqrt(q * q + 4.0 * e**3)
    u = m1 / m0
    if q >= 0.0:
        v1 = u + (q + s) / (2.0 * m0 * e)
        v2 = u - 2.0 * e * e / (m0 * (s + q))
        rho1 = 2.0 * m0 * e**3 / (s * (s + q))
        rho2 = m0 - rho1
    else:
        v1 = u + 2.0 * e * e / (m0 * (s - q))
        v2 = u + (q - s) / (2.0 * m0 * e)
        rho2 = 2.0 * m0 * e**3 / (s * (s - q))
        rho1 = m0 - rho2
    return QuadratureState(rho1, rho2, v1, v2)


def quadrature_from_moments(m, eps1: float = DEFAULT_EPS1) -> QuadratureState:
    """Invert moments into the ordered two-node quadrature.

    Below the dispersion threshold ``e/m0**2 <= eps1`` the state is treated
    as monokinetic and split into two equal half-weights at ``m1/m0``.

    Raises
    ------
    NonpositiveDensityError
        If ``m0 <= 0``.
    UnrealizableMomentError
        If ``e`` is negative beyond round-off.
    """
    m0, m1, m2, m3 = m
    _check_density(m0)
    _, _, e, q = reduced_from_moments(m)
    e = realizable_e(m0, m1, m2, e)
    if e <= eps1 * m0 * m0:
        v = m1 / m0
        return QuadratureState(0.5 * m0, 0.5 * m0, v, v)
    return two_node_from_reduced(m0, m1, e, q)


def sigma_coefficients(m) -> SigmaCoefficients:
    m0, m1, m2, m3 = m
    e = m0 * m2 - m1 * m1
    if not e > 0.0:
        raise FrontierError(f"sigma coefficients need e > 0, got e={e!r}")
    return SigmaCoefficients((m1 * m3 - m2 * m2) / e, (m1 * m2 - m0 * m3) / e)


def closure_m4(m, eps1: float = DEFAULT_EPS1) -> float:
    """Closing flux moment ``rho1*v1**4 + rho2*v2**4`` as a function of ``m``.

    On (or numerically at) the frontier it is the monokinetic limit
    ``m1**4/m0**3``.
    """
    m0, m1, m2, m3 = m
    _check_density(m0)
    e = realizable_e(m0, m1, m2, m0 * m2 - m1 * m1)
    if e <= eps1 * m0 * m0:
        return m1**4 / m0**3
    s0, s1 = sigma_coefficients(m)
    return -m2 * s0 - m3 * s1


def flux_vector(m, eps1: float = DEFAULT_EPS1) -> MomentVector:
    m0, m1, m2, m3 = m
    return MomentVector(m1, m2, m3, closure_m4(m, eps1))


def flux_from_reduced(r) -> float:
    """Closing flux moment written in the frontier-adapted variables."""
    m0, m1, e, q = r
    _check_density(m0)
    if not e > 0.0:
        raise FrontierError(f"reduced flux needs e > 0, got e={e!r}")
    u = m1 / m0
    ratio = q / (m0 * e)
    en = e / (m0 * m0)
    m4_over_m0 = -(ratio * u + u * u - en) * (en + u * u) + (ratio + 2.0 * u) * (
        q / m0**3 + u**3 + 3.0 * u * en
    )
    return m0 * m4_over_m0


def flux_jacobian(m) -> np.ndarray:
    """Companion-form Jacobian of the flux with respect to the moments."""
    s0, s1 = sigma_coefficients(m)
    jac = np.zeros((4, 4))
    jac[0, 1] = jac[1, 2] = jac[2, 3] = 1.0
    jac[3] = (-s0 * s0, -2.0 * s0 * s1, -2.0 * s0 - s1 * s1, -2.0 * s1)
    return jac


def characteristic_coefficients(m) -> np.ndarray:
    """Coefficients (highest degree first) of det(lambda*I - J).

    Faddeev-LeVerrier recursion; no eigenvalues are formed, so the double
    roots of the weakly hyperbolic Jacobian cost no accuracy.
    """
    a = flux_jacobian(m)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    mk = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ mk) / k
    return coeffs
