"""Symmetric Gauss quadrature rules on the reference triangle.

Rules are given as barycentric coordinates and weights summing to 1; physical
weights are obtained by multiplying with the triangle area.
"""

import numpy as np

# degree-1 (centroid)
_BARY_1 = np.array([[1 / 3, 1 / 3, 1 / 3]])
_W_1 = np.array([1.0])

# degree-2, 3 points (interior variant)
_BARY_3 = np.array([
    [2 / 3, 1 / 6, 1 / 6],
    [1 / 6, 2 / 3, 1 / 6],
    [1 / 6, 1 / 6, 2 / 3],
])
_W_3 = np.array([1 / 3, 1 / 3, 1 / 3])

# degree-5, 7 points
_A1 = 0.059715871789770
_B1 = 0.470142064105115
_A2 = 0.797426985353087
_B2 = 0.101286507323456
_BARY_7 = np.array(
    [[1 / 3, 1 / 3, 1 / 3],
     [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
     [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2]]
)
_W_7 = np.array([0.225,
                 0.132394152788506, 0.132394152788506, 0.132394152788506,
                 0.125939180544827, 0.125939180544827, 0.125939180544827])

RULES = {1: (_BARY_1, _W_1), 3: (_BARY_3, _W_3), 7: (_BARY_7, _W_7)}


def triangle_rule(npoints: int):
    """(bary, weights) for a supported point count (1, 3 or 7)."""
    try:
        return RULES[npoints]
    except KeyError:
        raise ValueError(f"no {npoints}-point triangle rule; choose from {sorted(RULES)}")


def points_weights(vertices: np.ndarray, areas: np.ndarray, npoints: int):
    """Quadrature nodes and area-scaled weights for a batch of triangles.

    vertices: (T, 3, 3); areas: (T,).  Returns (T, npoints, 3) points and
    (T, npoints) weights.
    """
    bary, w = triangle_rule(npoints)
    pts = np.einsum("qk,tkx->tqx", bary, vertices)
    wts = areas[:, None] * w[None, :]
    return pts, wts
