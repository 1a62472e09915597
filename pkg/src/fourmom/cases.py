"""Registry of the reference test cases with their exact solutions.

Every case lives on ``[0, 1]`` and supplies:

* an initial field (cell averages on a given grid),
* a reference field at time ``t`` used by the error norms.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import UnknownCaseError
from .riemann import (
    FREE_BOUNDARY_PACKETS,
    four_packet_cell_values,
    four_packet_states,
    packets_cell_averages,
    packets_moments_at,
    solve_four_packet_star,
    two_packet_packets,
)

FOUR_PACKET_RHO = 1.0
FOUR_PACKET_V = (0.8, 1.2)
FOUR_PACKET_CENTER = 0.5


@dataclass(frozen=True)
class CaseSpec:
    name: str
    description: str
    initial: Callable
    reference: Callable
    domain: tuple = (0.0, 1.0)
    boundary: str = "outflow"
    cfl: float = 1.0
    t_end: float = 0.1


def _two_packets_initial(edges, exact_init=False):
    return packets_cell_averages(two_packet_packets(), edges, 0.0)


def _two_packets_reference(edges, t):
    return packets_cell_averages(two_packet_packets(), edges, t)


@lru_cache(maxsize=None)
def four_packet_star(rho=FOUR_PACKET_RHO, v1=FOUR_PACKET_V[0], v2=FOUR_PACKET_V[1]):
    return solve_four_packet_star(rho, v1, v2)


def _four_packets_initial(edges, exact_init=False):
    data = four_packet_states(FOUR_PACKET_RHO, *FOUR_PACKET_V)
    edges = np.asarray(edges, dtype=float)
    width = np.diff(edges)
    left_part = np.clip(FOUR_PACKET_CENTER - edges[:-1], 0.0, width) / width
    return (
        left_part[:, None] * np.asarray(data.left)[None, :]
        + (1.0 - left_part)[:, None] * np.asarray(data.right)[None, :]
    )


def _four_packets_reference(edges, t):
    star = four_packet_star()
    return four_packet_cell_values(
        edges, t, star, FOUR_PACKET_RHO, *FOUR_PACKET_V, center=FOUR_PACKET_CENTER
    )


def _free_boundary_initial(edges, exact_init=False):
    edges = np.asarray(edges, dtype=float)
    if exact_init:
        return packets_cell_averages(FREE_BOUNDARY_PACKETS, edges, 0.0)
    centres = 0.5 * (edges[:-1] + edges[1:])
    return packets_moments_at(FREE_BOUNDARY_PACKETS, centres, 0.0)


def _free_boundary_reference(edges, t):
    edges = np.asarray(edges, dtype=float)
    centres = 0.5 * (edges[:-1] + edges[1:])
    return packets_moments_at(FREE_BOUNDARY_PACKETS, centres, t)


CASES = {
    "two_packets": CaseSpec(
        "two_packets",
        "two monokinetic packets (v = +1 and -1) crossing each other",
        _two_packets_initial,
        _two_packets_reference,
        cfl=1.0,
        t_end=0.1,
    ),
    "four_packets": CaseSpec(
        "four_packets",
        "symmetric collision of two two-node states, forming a pair of delta shocks",
        _four_packets_initial,
        _four_packets_reference,
        cfl=1.0,
        t_end=0.1,
    ),
    "free_boundary": CaseSpec(
        "free_boundary",
        "two-node packet with a linear abscissa profile, stretching freely",
        _free_boundary_initial,
        _free_boundary_reference,
        boundary="vacuum",
        cfl=0.98,
        t_end=0.2,
    ),
}


def get_case(name) -> CaseSpec:
    try:
        return CASES[name]
    except KeyError:
        raise UnknownCaseError(f"unknown case {name!r}; expected one of {sorted(CASES)}") from None
