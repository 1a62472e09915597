"""Entropy / entropy-flux pairs built on the two-node quadrature.

For a generating function ``S`` the pair is::

    eta  = rho1*S(v1)    + rho2*S(v2)
    flux = rho1*v1*S(v1) + rho2*v2*S(v2)

``S(v) = v**(2*alpha)`` with ``alpha`` in {0, 1/2, 1, 3/2} gives back the
conserved moments, ``alpha >= 2`` gives strict entropies.
"""
from __future__ import annotations

from dataclasses import dataclass

from .moments import DEFAULT_EPS1, quadrature_from_moments

LEFT = "left"
RIGHT = "right"


def _falling(n, k):
    out = 1
    for i in range(k):
        out *= n - i
    return out


@dataclass(frozen=True)
class EntropySpec:
    """``S(v) = v**power + sum(tail[k] * v**k)``.

    ``power`` is ``2*alpha``; half-integer alphas are thus plain odd powers.
    """

    power: int
    tail: tuple = ()

    def __post_init__(self):
        if int(self.power) != self.power or self.power < 0:
            raise ValueError(f"power must be a nonnegative integer, got {self.power!r}")
        object.__setattr__(self, "power", int(self.power))
        object.__setattr__(self, "tail", tuple(float(c) for c in self.tail))

    @classmethod
    def from_alpha(cls, alpha, tail=()):
        two_alpha = 2 * alpha
        if not float(two_alpha).is_integer():
            raise ValueError(f"2*alpha must be an integer, got alpha={alpha!r}")
        return cls(int(two_alpha), tail)

    @property
    def alpha(self):
        return self.power / 2

    def value(self, v, shift=0):
        """``v**shift * S(v)``, each monomial raised directly."""
        out = v ** (self.power + shift)
        for k, c in enumerate(self.tail):
            if c:
                out = out + c * v ** (k + shift)
        return out

    def derivative(self, v, order=1):
        def mono(p):
            if order > p:
                return 0.0 * v
            return _falling(p, order) * v ** (p - order)

        out = mono(self.power)
        for k, c in enumerate(self.tail):
            if c:
                out = out + c * mono(k)
        return out

    def __call__(self, v):
        return self.value(v)


def entropy_pair_eval(u, s: EntropySpec):
    rho1, rho2, v1, v2 = u
    eta = rho1 * s.value(v1) + rho2 * s.value(v2)
    flux = rho1 * s.value(v1, 1) + rho2 * s.value(v2, 1)
    return eta, flux


def entropy_pair_of_moments(m, s: EntropySpec, eps1: float = DEFAULT_EPS1):
    return entropy_pair_eval(quadrature_from_moments(m, eps1), s)


def entropy_condition_residuals(v1, v2, s: EntropySpec):
    """Left-hand sides ``(F1, F2)`` of the sufficient entropy inequalities.

    Both are nonnegative for every ``(v1, v2)`` when ``S''''>= 0``.  Works
    elementwise on numpy arrays.
    """
    d = v1 - v2
    s1, s2 = s.value(v1), s.value(v2)
    d1, d2 = s.derivative(v1, 1), s.derivative(v2, 1)
    f1 = 6.0 * (s1 - s2) - 4.0 * d * d1 - 2.0 * d * d2 + d * d * s.derivative(v1, 2)
    f2 = -6.0 * (s1 - s2) + 2.0 * d * d1 + 4.0 * d * d2 + d * d * s.derivative(v2, 2)
    return f1, f2


def residual_scale(v1, v2, s: EntropySpec):
    """Sum of the magnitudes of the terms in the residuals (round-off scale)."""
    d = abs(v1 - v2)
    return (
        6.0 * (abs(s.value(v1)) + abs(s.value(v2)))
        + 4.0 * d * (abs(s.derivative(v1, 1)) + abs(s.derivative(v2, 1)))
        + d * d * (abs(s.derivative(v1, 2)) + abs(s.derivative(v2, 2)))
    )


def riemann_dissipation(sigma, inner, outer, mass_rate, s: EntropySpec, side, eps1=DEFAULT_EPS1):
    """Entropy production per unit time of one wave of a measure solution.

    ``inner`` is the star state, ``outer`` the initial state on ``side``;
    the delta mass carried by the wave grows as ``mass_rate * t``.
    Admissible waves give ``<= 0`` for strict entropies and ``0`` for the
    conserved pairs.
    """
    eta_in, q_in = entropy_pair_of_moments(inner, s, eps1)
    eta_out, q_out = entropy_pair_of_moments(outer, s, eps1)
    source = mass_rate * s.value(sigma)
    if side == LEFT:
        return sigma * (eta_out - eta_in) - (q_out - q_in) + source
    if side == RIGHT:
        return sigma * (eta_in - eta_out) - (q_in - q_out) + source
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")
