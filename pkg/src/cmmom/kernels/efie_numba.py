"""Numba-accelerated backend for the triangle-pair interaction moments.

Same contract as :mod:`cmmom.kernels.efie_numpy`; see that module for the
definitions of the returned moment arrays.
"""

import numba
import numpy as np

from .potential import static_potentials

_static_potentials = numba.njit(cache=True)(static_potentials)

FOUR_PI = 4.0 * np.pi


@numba.njit(cache=True, parallel=True)
def _moments_kernel(tri_verts, share, k, qp_far, qw_far, qp_near, qw_near):
    T = tri_verts.shape[0]
    nf = qp_far.shape[1]
    nn = qp_near.shape[1]
    S00 = np.zeros((T, T), dtype=np.complex128)
    S10 = np.zeros((T, T, 3), dtype=np.complex128)
    S01 = np.zeros((T, T, 3), dtype=np.complex128)
    S11 = np.zeros((T, T), dtype=np.complex128)
    for p in numba.prange(T):
        for q in range(p, T):
            s00 = 0.0 + 0.0j
            s10x = 0.0 + 0.0j
            s10y = 0.0 + 0.0j
            s10z = 0.0 + 0.0j
            s01x = 0.0 + 0.0j
            s01y = 0.0 + 0.0j
            s01z = 0.0 + 0.0j
            s11 = 0.0 + 0.0j
            if share[p, q]:
                for a in range(nn):
                    rax = qp_near[p, a, 0]
                    ray = qp_near[p, a, 1]
                    raz = qp_near[p, a, 2]
                    wa = qw_near[p, a]
                    for b in range(nn):
                        rbx = qp_near[q, b, 0]
                        rby = qp_near[q, b, 1]
                        rbz = qp_near[q, b, 2]
                        R = np.sqrt(
                            (rax - rbx) ** 2 + (ray - rby) ** 2 + (raz - rbz) ** 2
                        )
                        if R < 1e-14:
                            g = -1j * k / FOUR_PI
                        else:
                            kr = k * R
                            g = (np.cos(kr) - 1.0 - 1j * np.sin(kr)) / (FOUR_PI * R)
                        w = wa * qw_near[q, b] * g
                        s00 += w
                        s10x += w * rax
                        s10y += w * ray
                        s10z += w * raz
                        s01x += w * rbx
                        s01y += w * rby
                        s01z += w * rbz
                        s11 += w * (rax * rbx + ray * rby + raz * rbz)
                    i0, ivx, ivy, ivz = _static_potentials(
                        qp_near[p, a], tri_verts[q, 0], tri_verts[q, 1], tri_verts[q, 2]
                    )
                    ws = wa / FOUR_PI
                    s00 += ws * i0
                    s10x += ws * i0 * rax
                    s10y += ws * i0 * ray
                    s10z += ws * i0 * raz
                    s01x += ws * ivx
                    s01y += ws * ivy
                    s01z += ws * ivz
                    s11 += ws * (rax * ivx + ray * ivy + raz * ivz)
            else:
                for a in range(nf):
                    rax = qp_far[p, a, 0]
                    ray = qp_far[p, a, 1]
                    raz = qp_far[p, a, 2]
                    wa = qw_far[p, a]
                    for b in range(nf):
                        rbx = qp_far[q, b, 0]
                        rby = qp_far[q, b, 1]
                        rbz = qp_far[q, b, 2]
                        R = np.sqrt(
                            (rax - rbx) ** 2 + (ray - rby) ** 2 + (raz - rbz) ** 2
                        )
                        kr = k * R
                        g = (np.cos(kr) - 1j * np.sin(kr)) / (FOUR_PI * R)
                        w = wa * qw_far[q, b] * g
                        s00 += w
                        s10x += w * rax
                        s10y += w * ray
                        s10z += w * raz
                        s01x += w * rbx
                        s01y += w * rby
                        s01z += w * rbz
                        s11 += w * (rax * rbx + ray * rby + raz * rbz)
            if p == q:
                # symmetrize: the asymmetric inner/outer scheme must not
                # break the S10 == S01 identity of coincident triangles
                s10x = s01x = 0.5 * (s10x + s01x)
                s10y = s01y = 0.5 * (s10y + s01y)
                s10z = s01z = 0.5 * (s10z + s01z)
            S00[p, q] = s00
            S00[q, p] = s00
            S11[p, q] = s11
            S11[q, p] = s11
            S10[p, q, 0] = s10x
            S10[p, q, 1] = s10y
            S10[p, q, 2] = s10z
            S01[p, q, 0] = s01x
            S01[p, q, 1] = s01y
            S01[p, q, 2] = s01z
            S10[q, p, 0] = s01x
            S10[q, p, 1] = s01y
            S10[q, p, 2] = s01z
            S01[q, p, 0] = s10x
            S01[q, p, 1] = s10y
            S01[q, p, 2] = s10z
    return S00, S10, S01, S11


def compute_moments(tri_verts, tri_idx, k, qp_far, qw_far, qp_near, qw_near):
    share = np.zeros((tri_idx.shape[0],) * 2, dtype=np.bool_)
    for i in range(3):
        for j in range(3):
            share |= tri_idx[:, None, i] == tri_idx[None, :, j]
    return _moments_kernel(
        np.ascontiguousarray(tri_verts),
        share,
        float(k),
        np.ascontiguousarray(qp_far),
        np.ascontiguousarray(qw_far),
        np.ascontiguousarray(qp_near),
        np.ascontiguousarray(qw_near),
    )
