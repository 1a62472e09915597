"""Exact and semi-exact reference solutions.

* measure solutions of Riemann problems (two delta-shocks around a
  constant star state) and their generalized Rankine-Hugoniot residual;
* the symmetric four-packet collision, whose star state comes from a
  damped Newton solve;
* free transport of monokinetic packets with affine velocity profiles,
  which covers the two-packet crossing and the free-boundary case.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .entropy import LEFT, RIGHT, EntropySpec, riemann_dissipation
from .errors import NoConvergenceError, NonEntropicRootError, ValidityError
from .moments import DEFAULT_EPS1, MomentVector, flux_vector


class RiemannData(NamedTuple):
    left: MomentVector
    right: MomentVector


class Wave(NamedTuple):
    speed: float
    mass_rate: float


@dataclass(frozen=True)
class MeasureSolution:
    star: MomentVector
    left_wave: Wave
    right_wave: Wave

    def delta_moments(self, side, t):
        wave = self.left_wave if side == LEFT else self.right_wave
        s = wave.speed
        return wave.mass_rate * t * np.array([1.0, s, s * s, s**3])


class FourPacketStar(NamedTuple):
    rho_star: float
    v_star: float
    sigma: float
    mu: float


class DeltaMass(NamedTuple):
    """Point mass ``mass`` moving at ``speed``; moments ``mass*(1, s, s**2, s**3)``."""

    mass: float
    speed: float

    def moments(self):
        s = self.speed
        return MomentVector(self.mass, self.mass * s, self.mass * s * s, self.mass * s**3)


def generalized_rh_residual(data: RiemannData, sol: MeasureSolution, eps1=DEFAULT_EPS1):
    """Both jump relations per unit time, stacked (left wave first)."""
    ml, mr, ms = (np.asarray(v, dtype=float) for v in (data.left, data.right, sol.star))
    fl, fr, fs = (np.asarray(flux_vector(v, eps1)) for v in (data.left, data.right, sol.star))
    sl, mul = sol.left_wave
    sr, mur = sol.right_wave
    left = sl * (ml - ms) - (fl - fs) + mul * np.array([1.0, sl, sl * sl, sl**3])
    right = sr * (ms - mr) - (fs - fr) + mur * np.array([1.0, sr, sr * sr, sr**3])
    return np.concatenate([left, right])


def wave_dissipation(data: RiemannData, sol: MeasureSolution, s: EntropySpec, eps1=DEFAULT_EPS1):
    """Entropy production of the left and right waves."""
    dl = riemann_dissipation(sol.left_wave.speed, sol.star, data.left, sol.left_wave.mass_rate, s, LEFT, eps1)
    dr = riemann_dissipation(sol.right_wave.speed, sol.star, data.right, sol.right_wave.mass_rate, s, RIGHT, eps1)
    return dl, dr


# --- symmetric four-packet collision ---------------------------------------


def four_packet_states(rho, v1, v2) -> RiemannData:
    left = MomentVector(
        rho, 0.5 * rho * (v1 + v2), 0.5 * rho * (v1 * v1 + v2 * v2), 0.5 * rho * (v1**3 + v2**3)
    )
    right = MomentVector(left.m0, -left.m1, left.m2, -left.m3)
    return RiemannData(left, right)


def four_packet_measure_solution(star: FourPacketStar) -> MeasureSolution:
    rs, vs, sigma, mu = star
    return MeasureSolution(
        MomentVector(rs, 0.0, rs * vs * vs, 0.0), Wave(-sigma, mu), Wave(sigma, mu)
    )


def four_packet_equations(x, rho, v1, v2):
    """The four nontrivial jump relations of the symmetric configuration."""
    rs, vs, sg, mu = x
    a1 = v1 + v2
    a2 = v1 * v1 + v2 * v2
    a3 = v1**3 + v2**3
    a4 = v1**4 + v2**4
    return np.array(
        [
            2 * sg * rs - 2 * sg * rho - rho * a1 + 2 * mu,
            2 * sg * rs * vs**2 - sg * rho * a2 - rho * a3 + 2 * mu * sg**2,
            2 * rs * vs**2 - sg * rho * a1 - rho * a2 - 2 * mu * sg,
            2 * rs * vs**4 - sg * rho * a3 - rho * a4 - 2 * mu * sg**3,
        ]
    )


def four_packet_jacobian(x, rho, v1, v2):
    rs, vs, sg, mu = x
    a1 = v1 + v2
    a2 = v1 * v1 + v2 * v2
    a3 = v1**3 + v2**3
    return np.array(
        [
            [2 * sg, 0.0, 2 * rs - 2 * rho, 2.0],
            [2 * sg * vs**2, 4 * sg * rs * vs, 2 * rs * vs**2 - rho * a2 + 4 * mu * sg, 2 * sg**2],
            [2 * vs**2, 4 * rs * vs, -rho * a1 - 2 * mu, -2 * sg],
            [2 * vs**4, 8 * rs * vs**3, -rho * a3 - 6 * mu * sg**2, -2 * sg**3],
        ]
    )


def solve_four_packet_star(
    rho,
    v1,
    v2,
    tol=1e-12,
    max_iter=100,
    check_alphas: Sequence[float] = (2, 3, 4),
    entropy_tol=1e-12,
) -> FourPacketStar:
    """Star state, wave speed and delta mass rate of the four-packet collision.

    Damped Newton from ``(2*rho, vbar, vbar, rho*(v2-v1)/4)`` with
    ``vbar = (v1+v2)/2``: the step is halved until the residual max-norm
    decreases.  The root is then checked to be entropic for every alpha in
    ``check_alphas``.

    Raises
    ------
    NoConvergenceError
        Residual still above ``tol`` after ``max_iter`` iterations, or no
        decreasing step could be found.
    NonEntropicRootError
        A strict entropy is produced (``D(alpha) > entropy_tol``).
    """
    if not (v2 > v1 > 0.0 and rho > 0.0):
        raise ValueError(f"need v2 > v1 > 0 and rho > 0, got rho={rho}, v1={v1}, v2={v2}")
    vbar = 0.5 * (v1 + v2)
    x = np.array([2.0 * rho, vbar, vbar, 0.25 * rho * (v2 - v1)])
    res = four_packet_equations(x, rho, v1, v2)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            break
        step = np.linalg.solve(four_packet_jacobian(x, rho, v1, v2), -res)
        damping = 1.0
        for _ in range(60):
            trial = x + damping * step
            trial_res = four_packet_equations(trial, rho, v1, v2)
            trial_norm = np.max(np.abs(trial_res))
            if trial_norm < norm:
                break
            damping *= 0.5
        else:
            raise NoConvergenceError("no decreasing Newton step", residual=norm)
        x, res, norm = trial, trial_res, trial_norm
    if not norm < tol:
        raise NoConvergenceError(f"Newton stalled at residual {norm:.3e}", residual=norm)

    star = FourPacketStar(*(float(c) for c in x))
    for alpha in check_alphas:
        d = four_packet_dissipation(star, rho, v1, v2, EntropySpec.from_alpha(alpha))
        if d > entropy_tol:
            raise NonEntropicRootError(f"root produces entropy: D({alpha})={d:.6g}")
    return star


def four_packet_dissipation(star: FourPacketStar, rho, v1, v2, s: EntropySpec):
    """Entropy dissipation rate of the left delta-shock (equal to the right one)."""
    data = four_packet_states(rho, v1, v2)
    sol = four_packet_measure_solution(star)
    return wave_dissipation(data, sol, s)[0]


def four_packet_solution_at(x, t, star: FourPacketStar, rho, v1, v2, center=0.0):
    """Pointwise measure solution; a :class:`DeltaMass` exactly on a shock."""
    if star is None:
        raise ValidityError("four-packet star state not solved")
    data = four_packet_states(rho, v1, v2)
    sol = four_packet_measure_solution(star)
    xi = x - center
    front = star.sigma * t
    if t > 0.0 and xi == -front:
        return DeltaMass(star.mu * t, -star.sigma)
    if t > 0.0 and xi == front:
        return DeltaMass(star.mu * t, star.sigma)
    if xi < -front:
        return data.left
    if xi > front:
        return data.right
    return sol.star


def four_packet_cell_values(edges, t, star: FourPacketStar, rho, v1, v2, center=0.0):
    """Reference grid field: states sampled at cell centres plus each delta
    mass divided by the width of the cell that contains it."""
    if star is None:
        raise ValidityError("four-packet star state not solved")
    edges = np.asarray(edges, dtype=float)
    centres = 0.5 * (edges[:-1] + edges[1:])
    data = four_packet_states(rho, v1, v2)
    sol = four_packet_measure_solution(star)
    xi = centres - center
    front = star.sigma * t
    out = np.empty((centres.size, 4))
    out[:] = np.asarray(sol.star)
    out[xi < -front] = np.asarray(data.left)
    out[xi > front] = np.asarray(data.right)
    if t > 0.0:
        for side, pos in ((LEFT, center - front), (RIGHT, center + front)):
            j = np.searchsorted(edges, pos, side="right") - 1
            if 0 <= j < centres.size:
                out[j] += sol.delta_moments(side, t) / (edges[j + 1] - edges[j])
    return out


# --- free transport of affine-velocity packets -----------------------------


@dataclass(frozen=True)
class Packet:
    """Monokinetic packet: density ``rho`` on ``[x_left, x_right)`` and
    velocity ``v_left + slope*(x - x_left)``."""

    x_left: float
    x_right: float
    rho: float
    v_left: float
    slope: float = 0.0

    def transported(self, t) -> "Packet":
        stretch = 1.0 + self.slope * t
        if not stretch > 0.0:
            raise ValidityError(f"packet characteristics cross before t={t}")
        v_right = self.v_left + self.slope * (self.x_right - self.x_left)
        return Packet(
            self.x_left + self.v_left * t,
            self.x_right + v_right * t,
            self.rho / stretch,
            self.v_left,
            self.slope / stretch,
        )

    def velocity(self, x):
        return self.v_left + self.slope * (x - self.x_left)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.x_left) & (x < self.x_right), self.rho, 0.0)

    def moments(self, x):
        """``(n, 4)`` pointwise moments ``rho * v**k``."""
        x = np.asarray(x, dtype=float)
        rho = self.density(x)
        v = self.velocity(x)
        return np.stack([rho * v**k for k in range(4)], axis=-1)

    def cell_integrals(self, edges):
        """Exact integrals of ``rho * v**k`` over each cell."""
        edges = np.asarray(edges, dtype=float)
        a = np.clip(edges[:-1], self.x_left, self.x_right)
        b = np.clip(edges[1:], self.x_left, self.x_right)
        out = np.empty((a.size, 4))
        if self.slope == 0.0:
            width = b - a
            for k in range(4):
                out[:, k] = self.rho * self.v_left**k * width
        else:
            va, vb = self.velocity(a), self.velocity(b)
            for k in range(4):
                out[:, k] = self.rho * (vb ** (k + 1) - va ** (k + 1)) / ((k + 1) * self.slope)
        return out


def packets_moments_at(packets, x, t):
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape + (4,))
    for p in packets:
        total += p.transported(t).moments(x)
    return total


def packets_cell_averages(packets, edges, t=0.0):
    edges = np.asarray(edges, dtype=float)
    total = np.zeros((edges.size - 1, 4))
    for p in packets:
        total += p.transported(t).cell_integrals(edges)
    return total / np.diff(edges)[:, None]


def two_packet_packets(rho_l=1.0, v_l=1.0, rho_r=1.0, v_r=-1.0, left=(0.1, 0.5), right=(0.5, 0.9)):
    """Each monokinetic packet is two coincident half-weight nodes; as one
    kinetic packet it carries the full density."""
    return [Packet(left[0], left[1], rho_l, v_l), Packet(right[0], right[1], rho_r, v_r)]


def two_packet_solution_at(x, t, rho_l=1.0, v_l=1.0, rho_r=1.0, v_r=-1.0, left=(0.1, 0.5), right=(0.5, 0.9)):
    """Exact moments of two freely crossing monokinetic packets."""
    if not v_l > 0.0 > v_r:
        raise ValueError("crossing configuration needs v_l > 0 > v_r")
    out = packets_moments_at(two_packet_packets(rho_l, v_l, rho_r, v_r, left, right), x, t)
    return MomentVector(*out) if out.ndim == 1 else out


# node 2: square wave at v=1 on [0, 0.5]; node 1: v=1, then 1->2 linearly, then 2
FREE_BOUNDARY_NODE2 = (Packet(0.0, 0.5, 0.5, 1.0),)
FREE_BOUNDARY_NODE1 = (
    Packet(0.0, 0.1, 0.5, 1.0),
    Packet(0.1, 0.4, 0.5, 1.0, 1.0 / 0.3),
    Packet(0.4, 0.5, 0.5, 2.0),
)
FREE_BOUNDARY_PACKETS = FREE_BOUNDARY_NODE1 + FREE_BOUNDARY_NODE2


def free_boundary_solution_at(x, t):
    """Exact moments of the free-boundary case: superposition of the two
    nodes, each transported as a pressureless gas."""
    if t < 0.0:
        raise ValidityError(f"free-boundary oracle needs t >= 0, got t={t}")
    out = packets_moments_at(FREE_BOUNDARY_PACKETS, x, t)
    return MomentVector(*out) if out.ndim == 1 else out


def free_boundary_node_fields(x, t):
    """``(node1, node2)`` pointwise moments of each quadrature node separately."""
    if t < 0.0:
        raise ValidityError(f"free-boundary oracle needs t >= 0, got t={t}")
    return packets_moments_at(FREE_BOUNDARY_NODE1, x, t), packets_moments_at(FREE_BOUNDARY_NODE2, x, t)
