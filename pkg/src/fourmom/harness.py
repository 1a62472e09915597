"""Error norms, convergence fits, run reports and field files."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidityError

MOMENT_NAMES = ("M0", "M1", "M2", "M3")
FIELD_COLUMNS = (
    "x", "M0", "M1", "M2", "M3", "rho1", "rho2", "v1", "v2", "e", "q", "q_over_m0e", "q_over_e32",
)
_TIME_RTOL = 1e-12


class InsufficientGridsError(ValueError):
    pass


def _check_time(field_state, t):
    if abs(field_state.time - t) > _TIME_RTOL * max(1.0, abs(t)):
        raise ValidityError(f"field is at t={field_state.time!r}, oracle requested at t={t!r}")


def l1_error(field_state, oracle, t):
    """Per-moment ``dx * sum_j |M_ij - oracle_i(x_j, t)|``.

    ``oracle(edges, t)`` returns the ``(n, 4)`` reference field on the grid
    (cell-centre samples, delta masses spread over their cell).
    """
    _check_time(field_state, t)
    ref = np.asarray(oracle(field_state.grid.edges, t), dtype=float)
    return field_state.grid.dx * np.abs(field_state.cells - ref).sum(axis=0)


def relative_l1_error(field_state, oracle, t):
    """:func:`l1_error` divided by the L1 norm of the reference field."""
    _check_time(field_state, t)
    ref = np.asarray(oracle(field_state.grid.edges, t), dtype=float)
    dx = field_state.grid.dx
    num = dx * np.abs(field_state.cells - ref).sum(axis=0)
    den = dx * np.abs(ref).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0.0, num / den, num)


def convergence_order(errors):
    """Observed order of each moment from a table of errors.

    Parameters
    ----------
    errors : mapping or sequence of pairs
        ``{n_cells: error_vector}``.

    Returns
    -------
    numpy.ndarray
        Minus the least-squares slope of ``log2(error)`` against
        ``log2(n_cells)``, one entry per error component.
    """
    items = sorted(dict(errors).items())
    if len(items) < 2:
        raise InsufficientGridsError(f"need at least two grids, got {len(items)}")
    n = np.log2(np.array([k for k, _ in items], dtype=float))
    err = np.array([np.atleast_1d(np.asarray(v, dtype=float)) for _, v in items])
    if np.any(err <= 0.0):
        raise ValueError("errors must be positive to fit an order")
    slope = np.polyfit(n, np.log2(err), 1)[0]
    return -np.atleast_1d(slope)


@dataclass
class RunReport:
    case: str
    n_cells: list
    cfl: float
    t_end: float
    eps1: float = 1e-9
    eta: float = 2.0
    boundary: str = "outflow"
    backend: str = ""
    l1_errors: dict = field(default_factory=dict)
    relative_l1_errors: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    relative_orders: dict = field(default_factory=dict)
    star: dict = field(default_factory=dict)
    dissipation: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls(**json.loads(text))

    def write(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json(), encoding="utf-8")
        return path


def errors_as_dict(err):
    return {name: float(v) for name, v in zip(MOMENT_NAMES, err)}


def _fmt(v):
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:.17g}"


def field_rows(field_state):
    """Rows of :data:`FIELD_COLUMNS`; quadrature columns are ``None`` in
    vacuum, the two cone ratios are ``None`` at or below the dispersion
    threshold."""
    M = field_state.cells
    U = field_state.quadrature()
    m0, m1, m2, m3 = M.T
    e = m0 * m2 - m1 * m1
    q = (m3 * m0 * m0 - m1**3) - 3.0 * m1 * e
    x = field_state.grid.centers
    vac = field_state.vacuum_m0
    rows = []
    for j in range(M.shape[0]):
        live = m0[j] > vac
        quad = tuple(float(u) for u in U[j]) if live else (None,) * 4
        if live and e[j] > field_state.eps1 * m0[j] * m0[j]:
            ratios = (float(q[j] / (m0[j] * e[j])), float(q[j] / e[j] ** 1.5))
        else:
            ratios = (None, None)
        ej, qj = (float(e[j]), float(q[j])) if live else (0.0, 0.0)
        rows.append((float(x[j]), *map(float, M[j]), *quad, ej, qj, *ratios))
    return rows


def write_fields_csv(field_state, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELD_COLUMNS)
        for row in field_rows(field_state):
            w.writerow([_fmt(v) for v in row])
    return path


def read_fields_csv(path):
    """Columns of a field file as float arrays (empty cells become ``nan``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = [[] for _ in header]
        for row in reader:
            for c, v in zip(cols, row):
                c.append(float(v) if v else math.nan)
    return {name: np.array(c) for name, c in zip(header, cols)}


def write_convergence_csv(report: RunReport, path):
    """One row per grid with absolute and relative errors, then the fitted
    orders (grid column ``order``)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ["n_cells"] + [f"L1_{m}" for m in MOMENT_NAMES] + [f"relL1_{m}" for m in MOMENT_NAMES]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for n in report.n_cells:
            a = report.l1_errors[str(n)]
            r = report.relative_l1_errors[str(n)]
            w.writerow([n] + [_fmt(a[m]) for m in MOMENT_NAMES] + [_fmt(r[m]) for m in MOMENT_NAMES])
        if report.orders:
            w.writerow(
                ["order"]
                + [_fmt(report.orders[m]) for m in MOMENT_NAMES]
                + [_fmt(report.relative_orders[m]) for m in MOMENT_NAMES]
            )
    return path
