"""Four-moment quadrature method for one-dimensional particle transport.

Submodules
----------
moments
    Two-node inversion, flux closure and Jacobian.
frontier
    Regimes near ``e = 0`` and the admissible cone.
entropy
    Entropy pairs and entropy-condition residuals.
riemann
    Delta-shock Riemann solutions and exact reference solutions.
solver
    Kinetic finite-volume scheme.
harness, cli
    Error norms, reports, CSV output and the command line.
"""
from .errors import MomentError
from .kernels import BACKEND
from .moments import (
    DEFAULT_EPS1,
    MomentVector,
    QuadratureState,
    closure_m4,
    flux_vector,
    moments_from_quadrature,
    quadrature_from_moments,
)

__version__ = "0.1.0"
