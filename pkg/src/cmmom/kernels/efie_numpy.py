"""Pure-numpy backend for the triangle-pair interaction moments.

For every ordered triangle pair (p, q) the backend accumulates the weighted
Green's-function moments

    S00 = sum w_a w_b G(r_a, r_b)
    S10 = sum w_a w_b G r_a            S01 = sum w_a w_b G r_b
    S11 = sum w_a w_b G (r_a . r_b)

with G = exp(-jkR)/(4 pi R).  Pairs sharing at least one vertex are
re-evaluated with singularity extraction: the smooth part
(exp(-jkR) - 1)/(4 pi R) by quadrature and the static 1/R part by the
closed-form triangle potentials.
"""

import numpy as np

from .potential import static_potentials

FOUR_PI = 4.0 * np.pi


def near_pair_mask(tri_idx: np.ndarray) -> np.ndarray:
    """(T, T) bool: triangle pairs sharing at least one vertex."""
    share = np.zeros((tri_idx.shape[0],) * 2, dtype=bool)
    for i in range(3):
        for j in range(3):
            share |= tri_idx[:, None, i] == tri_idx[None, :, j]
    return share


def _pair_moments_extracted(k, pts_o, wts_o, pts_s, wts_s, qtri):
    """Moments for one near pair: outer quadrature, smooth inner quadrature
    plus analytic static inner integrals."""
    d = pts_o[:, None, :] - pts_s[None, :, :]
    R = np.sqrt(np.sum(d * d, axis=2))
    kr = k * R
    gs = np.where(
        R < 1e-14,
        -1j * k / FOUR_PI,
        (np.cos(kr) - 1.0 - 1j * np.sin(kr)) / (FOUR_PI * np.where(R < 1e-14, 1.0, R)),
    )
    wg = wts_o[:, None] * gs * wts_s[None, :]
    s00 = wg.sum()
    s10 = wg.sum(axis=1) @ pts_o
    s01 = wg.sum(axis=0) @ pts_s
    s11 = np.einsum("ab,ax,bx->", wg, pts_o, pts_s)
    q0, q1, q2 = qtri
    for a in range(pts_o.shape[0]):
        i0, ivx, ivy, ivz = static_potentials(pts_o[a], q0, q1, q2)
        w = wts_o[a] / FOUR_PI
        iv = np.array([ivx, ivy, ivz])
        s00 += w * i0
        s10 += w * i0 * pts_o[a]
        s01 += w * iv
        s11 += w * (pts_o[a] @ iv)
    return s00, s10, s01, s11


def compute_moments(tri_verts, tri_idx, k, qp_far, qw_far, qp_near, qw_near):
    """Interaction moments for all pairs of T triangles.

    tri_verts: (T, 3, 3) vertex coordinates, tri_idx: (T, 3) vertex indices.
    qp/qw: quadrature points and area-scaled weights, far rule used for
    separated pairs and near rule (outer and smooth inner) for touching ones.
    Returns S00 (T, T), S10 (T, T, 3), S01 (T, T, 3), S11 (T, T), complex.
    """
    T, nq = qp_far.shape[:2]
    pts = qp_far.reshape(T * nq, 3)
    diff = pts[:, None, :] - pts[None, :, :]
    R = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(R, 1.0)  # placeholder; near pairs are overwritten below
    G = np.exp(-1j * k * R) / (FOUR_PI * R)
    G4 = G.reshape(T, nq, T, nq)
    WG = qw_far[:, :, None, None] * G4 * qw_far[None, None, :, :]
    S00 = WG.sum(axis=(1, 3))
    S10 = np.einsum("tasb,tax->tsx", WG, qp_far)
    S01 = np.einsum("tasb,sbx->tsx", WG, qp_far)
    S11 = np.einsum("tasb,tax,sbx->ts", WG, qp_far, qp_far)

    near = near_pair_mask(tri_idx)
    ps, qs = np.nonzero(near)
    for p, q in zip(ps, qs):
        if q < p:
            continue
        s00, s10, s01, s11 = _pair_moments_extracted(
            k, qp_near[p], qw_near[p], qp_near[q], qw_near[q], tri_verts[q]
        )
        if p == q:
            # the asymmetric inner/outer scheme must not break S10 == S01 here
            s10 = s01 = 0.5 * (s10 + s01)
        S00[p, q] = S00[q, p] = s00
        S11[p, q] = S11[q, p] = s11
        S10[p, q] = s10
        S01[p, q] = s01
        S10[q, p] = s01
        S01[q, p] = s10
    return S00, S10, S01, S11
