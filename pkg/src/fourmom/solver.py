"""First-order kinetic finite-volume scheme for the four-moment system.

One step is: invert every cell to two nodes, transport the nodes with the
upwind kinetic flux, then re-project (the conservative update), and finally
enforce the admissible cone on the new moments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .cases import get_case
from .errors import RealizabilityViolation
from .frontier import ConeParameters
from .kernels import get_backend, kernels as _default_kernels

BOUNDARIES = ("outflow", "periodic", "vacuum")

# densities below this fraction of the largest initial density are vacuum
VACUUM_RTOL = 1e-12

# a final step shorter than this fraction of the CFL step is merged into it
_MERGE_RTOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ValueError(f"n_cells must be a positive integer, got {self.n_cells!r}")
        object.__setattr__(self, "n_cells", int(self.n_cells))
        if not self.x_max > self.x_min:
            raise ValueError(f"empty domain [{self.x_min}, {self.x_max}]")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def edges(self):
        return self.x_min + self.dx * np.arange(self.n_cells + 1)

    @property
    def centers(self):
        return self.x_min + self.dx * (np.arange(self.n_cells) + 0.5)


@dataclass(frozen=True)
class SolverConfig:
    cfl: float = 1.0
    cone: ConeParameters = field(default_factory=ConeParameters)
    boundary: str = "outflow"
    t_end: float = math.inf
    clamp: bool = True

    def __post_init__(self):
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl!r}")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")


@dataclass
class Diagnostics:
    """Running statistics over every step taken so far.

    ``max_cone_ratio`` is ``max |q| / (m0 e)`` over cells above the
    dispersion threshold, measured after the update and before the clamp.
    ``min_e_ratio`` is ``min e / max(m0 m2, m1**2)`` over non-vacuum cells.
    ``boundary_inflow`` is the time integral of the flux entering through
    the left boundary minus the flux leaving through the right one.
    """

    n_steps: int = 0
    n_clamped: int = 0
    max_cone_ratio: float = 0.0
    min_e_ratio: float = 0.0
    boundary_inflow: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def copy(self):
        return replace(self, boundary_inflow=self.boundary_inflow.copy())


@dataclass
class FieldState:
    grid: Grid1D
    cells: np.ndarray
    time: float = 0.0
    eps1: float = 1e-9
    vacuum_m0: float | None = None
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        self.cells = np.ascontiguousarray(self.cells, dtype=float)
        if self.cells.shape != (self.grid.n_cells, 4):
            raise ValueError(f"cells must have shape ({self.grid.n_cells}, 4), got {self.cells.shape}")
        if self.vacuum_m0 is None:
            self.vacuum_m0 = VACUUM_RTOL * max(float(self.cells[:, 0].max(initial=0.0)), 1.0e-300)

    def copy(self):
        return replace(self, cells=self.cells.copy(), diagnostics=self.diagnostics.copy())

    def quadrature(self, backend=None):
        """``(n, 4)`` array of ``(rho1, rho2, v1, v2)``; zeros in vacuum."""
        k = backend or _default_kernels
        U, bad = k.invert_cells(self.cells, self.eps1, self.vacuum_m0)
        if bad >= 0:
            raise RealizabilityViolation(f"cell {bad} is not realizable: {self.cells[bad]}")
        return U

    def total(self):
        """Integral of each moment over the domain."""
        return self.grid.dx * self.cells.sum(axis=0)


def initialize_case(case, grid: Grid1D, exact_init=False, eps1=1e-9) -> FieldState:
    spec = get_case(case)
    cells = spec.initial(grid.edges, exact_init)
    return FieldState(grid, cells, 0.0, eps1)


def _ghost_rows(arr, boundary):
    """``outflow`` copies the edge cells, ``periodic`` wraps, ``vacuum``
    puts empty cells outside so nothing enters the domain."""
    if boundary == "periodic":
        return arr[-1], arr[0]
    if boundary == "vacuum":
        empty = np.zeros_like(arr[0])
        return empty, empty
    return arr[0], arr[-1]


def apply_boundary(state: FieldState, config: SolverConfig):
    """Left and right ghost cells (moment vectors) for the next step."""
    left, right = _ghost_rows(state.cells, config.boundary)
    return left.copy(), right.copy()


def interface_flux(left_u, right_u, backend=None) -> np.ndarray:
    """Kinetic upwind flux between two quadrature states."""
    k = backend or _default_kernels
    U = np.array([tuple(left_u), tuple(right_u)], dtype=float)
    return k.interface_fluxes(U)[0]


def _extend(U, boundary):
    left, right = _ghost_rows(U, boundary)
    return np.ascontiguousarray(np.vstack([left, U, right]))


def _min_e_ratio(M, vacuum_m0):
    m0, m1, m2 = M[:, 0], M[:, 1], M[:, 2]
    live = m0 > vacuum_m0
    if not np.any(live):
        return 0.0
    m0, m1, m2 = m0[live], m1[live], m2[live]
    scale = np.maximum(m0 * m2, m1 * m1)
    e = m0 * m2 - m1 * m1
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(scale > 0.0, e / scale, 0.0)
    return float(r.min())


def stable_dt(state: FieldState, config: SolverConfig, backend=None):
    k = backend or _default_kernels
    vmax = k.max_speed(state.quadrature(k))
    if vmax == 0.0:
        return math.inf
    return config.cfl * state.grid.dx / vmax


def step(state: FieldState, config: SolverConfig, backend=None) -> FieldState:
    """Advance ``state`` by one CFL-limited step (cut to land on ``t_end``).

    Returns a new :class:`FieldState`; ``state`` is left untouched.
    """
    k = backend or _default_kernels
    remaining = config.t_end - state.time
    if not remaining > 0.0:
        return state.copy()
    U = state.quadrature(k)
    vmax = k.max_speed(U)
    if vmax == 0.0:
        if math.isinf(remaining):
            raise ValueError("zero velocity field and no final time: the step is unbounded")
        dt = remaining
    else:
        dt = config.cfl * state.grid.dx / vmax
        if dt >= remaining * (1.0 - _MERGE_RTOL):
            dt = remaining
    lam = dt / state.grid.dx
    M_new, f_left, f_right = k.conservative_update(state.cells, _extend(U, config.boundary), lam)
    n_clamped, ratio, bad = k.postprocess(
        M_new, state.eps1, config.cone.eta, state.vacuum_m0, config.clamp
    )
    if bad >= 0:
        raise RealizabilityViolation(
            f"step to t={state.time + dt:.17g} left cell {bad} outside the moment space: {M_new[bad]}"
        )
    diag = state.diagnostics.copy()
    diag.n_steps += 1
    diag.n_clamped += n_clamped
    diag.max_cone_ratio = max(diag.max_cone_ratio, ratio)
    diag.min_e_ratio = min(diag.min_e_ratio, _min_e_ratio(M_new, state.vacuum_m0))
    if config.boundary != "periodic":
        diag.boundary_inflow += dt * (np.asarray(f_left) - np.asarray(f_right))
    new_time = config.t_end if dt == remaining else state.time + dt
    return FieldState(state.grid, M_new, new_time, state.eps1, state.vacuum_m0, diag)


def advance_to_time(state: FieldState, config: SolverConfig, backend=None, callback=None) -> FieldState:
    """Step until ``config.t_end``; ``callback(state)`` sees every new state."""
    if config.t_end < state.time:
        raise ValueError(f"t_end={config.t_end} is before the current time {state.time}")
    if math.isinf(config.t_end):
        raise ValueError("advance_to_time needs a finite t_end")
    k = get_backend(backend) if isinstance(backend, str) else backend
    current = state
    while current.time < config.t_end:
        current = step(current, config, k)
        if callback is not None:
            callback(current)
    return current


def run_case(case, n_cells, cfl=None, t_end=None, eps1=1e-9, eta=2.0, exact_init=False, backend=None):
    """Initialise ``case`` on its default domain and advance it to ``t_end``."""
    spec = get_case(case)
    grid = Grid1D(spec.domain[0], spec.domain[1], n_cells)
    config = SolverConfig(
        cfl=spec.cfl if cfl is None else cfl,
        cone=ConeParameters(eta, eps1),
        boundary=spec.boundary,
        t_end=spec.t_end if t_end is None else t_end,
    )
    state = initialize_case(case, grid, exact_init, eps1)
    return advance_to_time(state, config, backend), config


def pressureless_upwind_step(rho, v, lam, boundary="outflow"):
    """One upwind step of a single pressureless node ``(rho, rho*v)``.

    Reference scheme for checking that the quadrature nodes decouple in
    smooth regions.  Returns the new ``(rho, rho*v)``.
    """
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    U = np.zeros((rho.size, 4))
    U[:, 0] = rho
    U[:, 2] = v
    F = _default_kernels.interface_fluxes(_extend(U, boundary))
    mass = rho - lam * (F[1:, 0] - F[:-1, 0])
    mom = rho * v - lam * (F[1:, 1] - F[:-1, 1])
    return mass, mom


__all__ = [
    "BOUNDARIES",
    "Diagnostics",
    "FieldState",
    "Grid1D",
    "SolverConfig",
    "advance_to_time",
    "apply_boundary",
    "initialize_case",
    "interface_flux",
    "pressureless_upwind_step",
    "run_case",
    "stable_dt",
    "step",
]
