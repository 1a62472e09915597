"""Behaviour of the quadrature near the frontier ``e = 0`` of the moment space.

The admissible cone ``|q| <= eta * m0 * e`` bounds the distance between
the two abscissas by ``eta``; outside it, the closure flux loses
regularity at the frontier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FrontierError, NonpositiveDensityError
from .moments import DEFAULT_EPS1, MomentVector, reduced_from_moments

DEFAULT_ETA = 2.0

# q is a difference of O(m0**2*|m3| + |m1|**3 + 3|m1|m0 m2) terms; a clamp
# decision closer than this many ulps of that scale is round-off.
_CLAMP_ULPS = 64


@dataclass(frozen=True)
class ConeParameters:
    eta: float = DEFAULT_ETA
    eps1: float = DEFAULT_EPS1

    def __post_init__(self):
        if not self.eta > 0.0:
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        if not self.eps1 > 0.0:
            raise ValueError(f"eps1 must be positive, got {self.eps1!r}")


@dataclass(frozen=True)
class FrontierRegime:
    """Limits of the quadrature as ``e -> 0+`` at fixed ``(m0, m1, q)``.

    Unbounded abscissas are reported as ``+inf`` / ``-inf``.  The
    ``interior`` regime carries no limits (all ``nan``).
    """

    regime: str
    rho1: float
    rho2: float
    v1: float
    v2: float


def frontier_regime_limits(m0, m1, q) -> FrontierRegime:
    if not m0 > 0.0:
        raise NonpositiveDensityError(f"nonpositive density m0={m0!r}")
    v = m1 / m0
    if q > 0.0:
        return FrontierRegime("positive-q", 0.0, m0, math.inf, v)
    if q < 0.0:
        return FrontierRegime("negative-q", m0, 0.0, v, -math.inf)
    return FrontierRegime("zero-q", 0.5 * m0, 0.5 * m0, v, v)


def classify_state(m, eps1: float = DEFAULT_EPS1) -> FrontierRegime:
    """Interior if the dispersion exceeds the threshold, else the limit regime."""
    m0, m1, e, q = reduced_from_moments(m)
    if e > eps1 * m0 * m0:
        nan = math.nan
        return FrontierRegime("interior", nan, nan, nan, nan)
    return frontier_regime_limits(m0, m1, q)


def cone_ratio(r) -> float:
    """Signed ratio ``q / (m0 * e)``; bounded by the abscissa gap."""
    m0, _, e, q = r
    if not e > 0.0:
        raise FrontierError(f"cone ratio undefined at e={e!r}")
    return q / (m0 * e)


def cone_membership(r, cone: ConeParameters) -> bool:
    m0, _, e, q = r
    if not e > 0.0:
        raise FrontierError(f"cone membership is vacuous at e={e!r}")
    return abs(q) <= cone.eta * m0 * e


def q_to_m3(m0, m1, m2, q):
    """Exact inverse of the definition of q for fixed (m0, m1, m2)."""
    return (q + 3.0 * m1 * m0 * m2 - 2.0 * m1**3) / (m0 * m0)


def cone_clamp(m, cone: ConeParameters) -> MomentVector:
    """Project ``m`` onto the cone by rewriting ``m3`` only.

    ``m0, m1, m2`` are returned untouched, ``q`` is set to
    ``sign(q) * eta * m0 * e``.  States already inside the cone (up to the
    round-off of q) come back unchanged, which makes the clamp idempotent.
    """
    m0, m1, m2, m3 = m
    _, _, e, q = reduced_from_moments(m)
    if not e > 0.0:
        raise FrontierError(f"cone clamp needs e > 0, got e={e!r}")
    bound = cone.eta * m0 * e
    qscale = m0 * m0 * abs(m3) + abs(m1) ** 3 + 3.0 * abs(m1) * m0 * m2
    if abs(q) - bound <= _CLAMP_ULPS * 2.2e-16 * qscale:
        return MomentVector(*m)
    return MomentVector(m0, m1, m2, q_to_m3(m0, m1, m2, math.copysign(bound, q)))


def monokinetic_state(m0, m1) -> MomentVector:
    if not m0 > 0.0:
        raise NonpositiveDensityError(f"nonpositive density m0={m0!r}")
    return MomentVector(m0, m1, m1 * m1 / m0, m1**3 / (m0 * m0))
