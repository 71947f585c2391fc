"""Closed-form static potential integrals over a flat triangle.

For an observation point r and a source triangle T, computes

    I0  = integral over T of 1/R dS'
    Iv  = integral over T of r'/R dS'      (3-vector)

with R = |r - r'|, by summing per-edge contributions of the standard
line-integral reduction.  Used to extract the 1/R singularity of the EFIE
kernel for self and touching triangle pairs.

The function body is plain scalar numpy so that it can also be re-compiled
with numba.njit for the accelerated backend.
"""

import numpy as np

_EPS = 1e-30


def static_potentials(r, q0, q1, q2):
    """Return (I0, Iv0, Iv1, Iv2) for observation point r over triangle (q0, q1, q2)."""
    e1x = q1[0] - q0[0]
    e1y = q1[1] - q0[1]
    e1z = q1[2] - q0[2]
    e2x = q2[0] - q0[0]
    e2y = q2[1] - q0[1]
    e2z = q2[2] - q0[2]
    nx = e1y * e2z - e1z * e2y
    ny = e1z * e2x - e1x * e2z
    nz = e1x * e2y - e1y * e2x
    nn = np.sqrt(nx * nx + ny * ny + nz * nz)
    nx /= nn
    ny /= nn
    nz /= nn
    d = nx * (r[0] - q0[0]) + ny * (r[1] - q0[1]) + nz * (r[2] - q0[2])
    px = r[0] - d * nx
    py = r[1] - d * ny
    pz = r[2] - d * nz
    absd = abs(d)

    i0 = 0.0
    ivx = 0.0
    ivy = 0.0
    ivz = 0.0
    ax, ay, az = q0[0], q0[1], q0[2]
    for edge in range(3):
        if edge == 0:
            bx, by, bz = q1[0], q1[1], q1[2]
        elif edge == 1:
            ax, ay, az = q1[0], q1[1], q1[2]
            bx, by, bz = q2[0], q2[1], q2[2]
        else:
            ax, ay, az = q2[0], q2[1], q2[2]
            bx, by, bz = q0[0], q0[1], q0[2]
        lx = bx - ax
        ly = by - ay
        lz = bz - az
        ll = np.sqrt(lx * lx + ly * ly + lz * lz)
        lx /= ll
        ly /= ll
        lz /= ll
        # in-plane outward edge normal u = l x n
        ux = ly * nz - lz * ny
        uy = lz * nx - lx * nz
        uz = lx * ny - ly * nx
        lp = (bx - px) * lx + (by - py) * ly + (bz - pz) * lz
        lm = (ax - px) * lx + (ay - py) * ly + (az - pz) * lz
        p0 = (ax - px) * ux + (ay - py) * uy + (az - pz) * uz  # signed distance
        r02 = p0 * p0 + d * d
        rp = np.sqrt((bx - r[0]) ** 2 + (by - r[1]) ** 2 + (bz - r[2]) ** 2)
        rm = np.sqrt((ax - r[0]) ** 2 + (ay - r[1]) ** 2 + (az - r[2]) ** 2)
        if r02 < _EPS:
            # observation point on the edge line: the f2 log term is finite in
            # the I0 sum (weighted by p0 = 0) and the Iv term uses the limit.
            f2 = 0.0
            if rp + lp > _EPS and rm + lm > _EPS:
                f2 = np.log((rp + lp) / (rm + lm))
            beta = 0.0
        else:
            f2 = np.log((rp + lp) / (rm + lm)) if (rm + lm) > _EPS else 0.0
            beta = np.arctan2(p0 * lp, r02 + absd * rp) - np.arctan2(p0 * lm, r02 + absd * rm)
        i0 += p0 * f2 - absd * beta
        coef = 0.5 * (r02 * f2 + lp * rp - lm * rm)
        ivx += ux * coef
        ivy += uy * coef
        ivz += uz * coef
    # shift the in-plane moment to absolute coordinates: Iv is currently
    # integral of (r' - p)/R; add p * I0.
    ivx += px * i0
    ivy += py * i0
    ivz += pz * i0
    return i0, ivx, ivy, ivz
