"""Vectorised numpy implementation of the per-step kernels.

Reference backend; the compiled module ``_ckernels`` must reproduce it to
round-off.  All arrays are C-contiguous float64 with shape ``(n, 4)``.
"""
import numpy as np

E_NEG_RTOL = 1e-12
E_NEG_ATOL = 2.2250738585072014e-308
CLAMP_ULPS = 64
_EPS = 2.220446049250313e-16


def invert_cells(M, eps1, vacuum_m0):
    """Two-node quadrature of every cell.

    Returns ``(U, bad)`` with ``U[:, :] = (rho1, rho2, v1, v2)`` (zeros in
    vacuum cells) and ``bad`` the index of the first unrealizable cell, or
    -1.
    """
    m0, m1, m2, m3 = M[:, 0], M[:, 1], M[:, 2], M[:, 3]
    n = M.shape[0]
    U = np.zeros((n, 4))
    live = m0 > vacuum_m0
    bad = -1
    if np.any(m0 < -vacuum_m0):
        return U, int(np.argmax(m0 < -vacuum_m0))

    e = m0 * m2 - m1 * m1
    q = (m3 * m0 * m0 - m1**3) - 3.0 * m1 * e
    neg = live & (e < 0.0)
    if np.any(neg):
        scale = np.maximum(m0 * m2, m1 * m1)
        hard = neg & (e <= -E_NEG_RTOL * scale - E_NEG_ATOL)
        if np.any(hard):
            bad = int(np.argmax(hard))
        e = np.where(neg, 0.0, e)

    interior = live & (e > eps1 * m0 * m0)
    mono = live & ~interior
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(live, m1 / np.where(live, m0, 1.0), 0.0)
        s = np.sqrt(q * q + 4.0 * e**3)
        pos = q >= 0.0
        aq = np.abs(q)
        # light node weight and heavy/light offsets, cancellation free
        light = 2.0 * m0 * e**3 / (s * (s + aq))
        far = (aq + s) / (2.0 * m0 * e)
        near = 2.0 * e * e / (m0 * (s + aq))
        v1 = np.where(pos, u + far, u + near)
        v2 = np.where(pos, u - near, u - far)
        rho1 = np.where(pos, light, m0 - light)
        rho2 = np.where(pos, m0 - light, light)

    U[interior, 0] = rho1[interior]
    U[interior, 1] = rho2[interior]
    U[interior, 2] = v1[interior]
    U[interior, 3] = v2[interior]
    U[mono, 0] = U[mono, 1] = 0.5 * m0[mono]
    U[mono, 2] = U[mono, 3] = u[mono]
    return U, bad


def max_speed(U):
    return float(np.max(np.abs(U[:, 2:]), initial=0.0))


def interface_fluxes(U_ext):
    """Kinetic upwind fluxes at the ``n+1`` interfaces of ``n+2`` cells
    (ghost cells included).  Row ``k`` is the flux between ``U_ext[k]`` and
    ``U_ext[k+1]``."""
    rho = U_ext[:, :2]
    v = U_ext[:, 2:]
    vp = np.maximum(v, 0.0)
    vm = np.minimum(v, 0.0)
    pos = np.empty((U_ext.shape[0], 4))
    neg = np.empty((U_ext.shape[0], 4))
    for i in range(4):
        vi = v**i
        pos[:, i] = (rho * vp * vi).sum(axis=1)
        neg[:, i] = (rho * vm * vi).sum(axis=1)
    return pos[:-1] + neg[1:]


def conservative_update(M, U_ext, lam):
    F = interface_fluxes(U_ext)
    return M - lam * (F[1:] - F[:-1]), F[0].copy(), F[-1].copy()


def postprocess(M, eps1, eta, vacuum_m0, clamp=True):
    """Realizability check and cone clamp, in place.

    Returns ``(n_clamped, max_ratio, bad)`` where ``max_ratio`` is the
    largest ``|q|/(m0*e)`` over cells above the dispersion threshold,
    measured before clamping.
    """
    m0, m1, m2, m3 = M[:, 0], M[:, 1], M[:, 2], M[:, 3]
    live = m0 > vacuum_m0
    bad = -1
    if np.any(m0 < -vacuum_m0):
        bad = int(np.argmax(m0 < -vacuum_m0))
    e = m0 * m2 - m1 * m1
    q = (m3 * m0 * m0 - m1**3) - 3.0 * m1 * e
    scale = np.maximum(m0 * m2, m1 * m1)
    hard = live & (e <= -E_NEG_RTOL * scale - E_NEG_ATOL) & (e < 0.0)
    if bad < 0 and np.any(hard):
        bad = int(np.argmax(hard))
    interior = live & (e > eps1 * m0 * m0)
    if not np.any(interior):
        return 0, 0.0, bad
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(interior, np.abs(q) / (m0 * e), 0.0)
    max_ratio = float(ratio.max())
    n_clamped = 0
    if clamp:
        bound = eta * m0 * e
        qscale = m0 * m0 * np.abs(m3) + np.abs(m1) ** 3 + 3.0 * np.abs(m1) * m0 * m2
        fire = interior & (np.abs(q) - bound > CLAMP_ULPS * _EPS * qscale)
        n_clamped = int(np.count_nonzero(fire))
        if n_clamped:
            qc = np.copysign(bound[fire], q[fire])
            a, b, c = m0[fire], m1[fire], m2[fire]
            M[fire, 3] = (qc + 3.0 * b * a * c - 2.0 * b**3) / (a * a)
    return n_clamped, max_ratio, bad
