"""Triangle surface meshes, parametric generators, and RWG basis enumeration.

Meshes are flat lists of vertices (meters) and CCW-oriented triangles.  Each
interior (two-triangle) edge carries one RWG basis function; those edges are
the "ports" of the network picture used by the rest of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MeshError(Exception):
    """Invalid mesh topology or geometry."""


@dataclass(frozen=True)
class Mesh:
    """Triangulated surface.

    vertices: (V, 3) float array, meters.
    triangles: (T, 3) int array of vertex indices, CCW w.r.t. outward normal.
    named_edges: optional labels for special edges (e.g. feed/load ports),
        mapping a name to a (vmin, vmax) vertex-index pair.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    named_edges: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "triangles", np.asarray(self.triangles, dtype=np.int64))
        self.vertices.setflags(write=False)
        self.triangles.setflags(write=False)
        _validate(self)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices[self.triangles]
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        return 0.5 * np.linalg.norm(n, axis=1)

    def edge_census(self) -> tuple[int, int]:
        """(interior, boundary) edge counts."""
        counts = _edge_counts(self.triangles)
        interior = sum(1 for c in counts.values() if c == 2)
        boundary = sum(1 for c in counts.values() if c == 1)
        return interior, boundary


def _edge_counts(triangles) -> dict:
    counts: dict[tuple[int, int], int] = {}
    for t in triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = (min(a, b), max(a, b))
            counts[key] = counts.get(key, 0) + 1
    return counts


def _validate(mesh: Mesh) -> None:
    if mesh.vertices.ndim != 2 or mesh.vertices.shape[1] != 3:
        raise MeshError("vertices must be (V, 3)")
    if mesh.triangles.ndim != 2 or mesh.triangles.shape[1] != 3:
        raise MeshError("triangles must be (T, 3)")
    if mesh.triangles.size and (
        mesh.triangles.min() < 0 or mesh.triangles.max() >= mesh.num_vertices
    ):
        raise MeshError("triangle vertex index out of range")
    areas = mesh.triangle_areas()
    bad = np.nonzero(areas <= 0.0)[0]
    if bad.size:
        raise MeshError(f"degenerate triangle (area <= 0) at index {bad[0]}")
    counts = _edge_counts(mesh.triangles)
    for (a, b), c in counts.items():
        if c > 2:
            raise MeshError(f"non-manifold edge ({a}, {b}) shared by {c} triangles")


def load_mesh(path) -> Mesh:
    """Read the plain-text mesh format: 'V T' counts, V 'x y z' lines (meters),
    then T 'i j k' zero-based triangle lines."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise MeshError(f"{path}: missing header counts")
    try:
        nv, nt = int(tokens[0]), int(tokens[1])
        vals = [float(x) for x in tokens[2 : 2 + 3 * nv]]
        tris = [int(x) for x in tokens[2 + 3 * nv : 2 + 3 * nv + 3 * nt]]
    except ValueError as exc:
        raise MeshError(f"{path}: parse failure: {exc}") from exc
    if len(vals) != 3 * nv or len(tris) != 3 * nt:
        raise MeshError(f"{path}: truncated file")
    vertices = np.array(vals, dtype=float).reshape(nv, 3)
    triangles = np.array(tris, dtype=np.int64).reshape(nt, 3)
    return Mesh(vertices, triangles)


def save_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{mesh.num_vertices} {mesh.num_triangles}\n")
        for v in mesh.vertices:
            fh.write(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}\n")
        for t in mesh.triangles:
            fh.write(f"{t[0]} {t[1]} {t[2]}\n")


def gen_plate(length: float, width: float, nx: int, ny: int) -> Mesh:
    """Structured triangulation of a rectangle in the xy-plane.

    The plate spans [-length/2, length/2] x [-width/2, width/2], z = 0, with
    nx-by-ny cells split along one diagonal: 2*nx*ny triangles.
    """
    if nx < 1 or ny < 1:
        raise ValueError("nx, ny must be >= 1")
    if length <= 0 or width <= 0:
        raise ValueError("length, width must be > 0")
    xs = np.linspace(-length / 2, length / 2, nx + 1)
    ys = np.linspace(-width / 2, width / 2, ny + 1)
    verts = np.array([(x, y, 0.0) for y in ys for x in xs])
    tris = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            b = a + 1
            c = a + (nx + 1)
            d = c + 1
            tris.append((a, b, d))
            tris.append((a, d, c))
    return Mesh(verts, np.array(tris))


def _stitch_columns(tris, col_a, col_b, pts):
    """Triangulate the band between two y-sorted vertex columns by always
    advancing across the shorter diagonal; CCW for col_a left of col_b."""
    i, j = 0, 0
    while i < len(col_a) - 1 or j < len(col_b) - 1:
        can_a = i < len(col_a) - 1
        can_b = j < len(col_b) - 1
        if can_a and can_b:
            da = np.linalg.norm(pts[col_a[i + 1]] - pts[col_b[j]])
            db = np.linalg.norm(pts[col_a[i]] - pts[col_b[j + 1]])
            can_a = da <= db
            can_b = not can_a
        if can_a:
            tris.append((col_a[i], col_b[j], col_a[i + 1]))
            i += 1
        else:
            tris.append((col_a[i], col_b[j], col_b[j + 1]))
            j += 1


def gen_bowtie(length: float, flare_angle: float, density: int) -> Mesh:
    """Two triangular fins joined at a short central gap edge.

    The bowtie lies in the xy-plane with the long dimension along x (total
    extent = length).  ``flare_angle`` is the angle between the two arms in
    degrees; each fin opens with apex angle 180 - flare_angle.  ``density``
    is the number of columns per fin along x; the transverse subdivision
    tracks the local fin width so elements stay roughly isotropic.  The
    single gap edge at x = 0 is published as named edge "center".
    """
    if not (0.0 < flare_angle < 180.0):
        raise ValueError("flare_angle must be in (0, 180) degrees")
    if density < 1:
        raise ValueError("density too low to form center edge")
    apex = np.deg2rad(180.0 - flare_angle)
    half_len = length / 2.0
    tip_half_w = half_len * np.tan(apex / 2.0)
    ns = int(density)
    # Truncate the apex so the innermost column ends on a finite center edge.
    gap_half_w = tip_half_w / (2.0 * ns)
    dx = half_len / ns

    def half_width(x):
        return gap_half_w + (abs(x) / half_len) * (tip_half_w - gap_half_w)

    xs = np.linspace(-half_len, half_len, 2 * ns + 1)
    verts: list[tuple[float, float, float]] = []
    cols: list[list[int]] = []
    for x in xs:
        w = half_width(x)
        nseg = 1 if abs(x) < 0.5 * dx else max(1, int(round(2.0 * w / dx)))
        base = len(verts)
        for y in np.linspace(-w, w, nseg + 1):
            verts.append((x, y, 0.0))
        cols.append(list(range(base, base + nseg + 1)))
    pts = np.array(verts)[:, :2]
    tris: list[tuple[int, int, int]] = []
    for a, b in zip(cols[:-1], cols[1:]):
        _stitch_columns(tris, a, b, pts)
    center = cols[ns]
    named = {"center": (center[0], center[1])}
    return Mesh(np.array(verts), np.array(tris), named_edges=named)


def gen_strip_loop(side: float, wire_radius: float, density: int) -> Mesh:
    """Closed square strip loop in the xy-plane (equivalent-strip wire model).

    Strip width w = 4 * wire_radius; the strip centerline is a square of the
    given side length centered at the origin.  ``density`` segments per side
    around the ring.  Midside rung edges are published as named edges
    "mid_side_0".."mid_side_3", and "feed" is the rung adjacent to
    "mid_side_0" (one ring position counterclockwise).
    """
    w = 4.0 * wire_radius
    if side <= w:
        raise ValueError("side must exceed strip width 4*wire_radius")
    if density < 2:
        raise ValueError("density too low to host midside ports")
    n = int(density)
    h = side / 2.0
    corners = np.array([(h, h), (-h, h), (-h, -h), (h, -h)])
    centerline = []
    for s in range(4):
        p0, p1 = corners[s], corners[(s + 1) % 4]
        for i in range(n):
            centerline.append(p0 + (p1 - p0) * (i / n))
    centerline = np.array(centerline)  # (4n, 2) going CCW
    nring = 4 * n
    # Offset inner/outer rings by +-w/2 along the local outward direction.
    # For a square, scale each point's dominant coordinate; corner points sit
    # on the diagonal and scale both.
    scale_out = (h + w / 2.0) / h
    scale_in = (h - w / 2.0) / h
    outer = np.empty((nring, 2))
    inner = np.empty((nring, 2))
    for i, (x, y) in enumerate(centerline):
        if abs(abs(x) - h) < 1e-12 and abs(abs(y) - h) < 1e-12:  # corner
            outer[i] = (x * scale_out, y * scale_out)
            inner[i] = (x * scale_in, y * scale_in)
        elif abs(abs(x) - h) < 1e-12:  # on a vertical side
            outer[i] = (x * scale_out, y)
            inner[i] = (x * scale_in, y)
        else:  # horizontal side
            outer[i] = (x, y * scale_out)
            inner[i] = (x, y * scale_in)
    verts = np.zeros((2 * nring, 3))
    verts[:nring, :2] = inner
    verts[nring:, :2] = outer
    tris = []
    for i in range(nring):
        j = (i + 1) % nring
        a, b = i, j                    # inner
        c, d = nring + i, nring + j    # outer
        tris.append((a, b, d))
        tris.append((a, d, c))
    named = {}
    for s in range(4):
        pos = s * n + n // 2
        named[f"mid_side_{s}"] = (min(pos, nring + pos), max(pos, nring + pos))
    feed_pos = n // 2 + 1
    named["feed"] = (feed_pos, nring + feed_pos)
    return Mesh(verts, np.array(tris), named_edges=named)


@dataclass(frozen=True)
class BasisSet:
    """RWG basis functions, one per interior mesh edge.

    Arrays are indexed by basis number alpha in [0, N).  tri_pm holds the
    (plus, minus) triangle indices; opp_pm the vertex index opposite the
    shared edge in each triangle.  Ordering is canonical: sorted by
    (min vertex, max vertex) of the edge.
    """

    mesh: Mesh
    edge_verts: np.ndarray   # (N, 2) vertex indices, (vmin, vmax)
    tri_pm: np.ndarray       # (N, 2) triangle indices (plus, minus)
    opp_pm: np.ndarray       # (N, 2) opposite-vertex indices
    lengths: np.ndarray      # (N,) edge lengths, meters

    @property
    def size(self) -> int:
        return self.edge_verts.shape[0]

    def port_index(self, name_or_pair) -> int:
        """Resolve a named edge (from the mesh) or a (v0, v1) pair to a basis index."""
        if isinstance(name_or_pair, str):
            pair = self.mesh.named_edges[name_or_pair]
        else:
            pair = name_or_pair
        key = (min(pair), max(pair))
        hits = np.nonzero((self.edge_verts[:, 0] == key[0]) & (self.edge_verts[:, 1] == key[1]))[0]
        if not hits.size:
            raise KeyError(f"edge {key} is not an interior edge")
        return int(hits[0])


def build_basis(mesh: Mesh) -> BasisSet:
    """Enumerate RWG bases over interior edges in canonical edge order."""
    owners: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ti, t in enumerate(mesh.triangles):
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            key = (min(a, b), max(a, b))
            owners.setdefault(key, []).append((ti, t[(k + 2) % 3]))
    interior = sorted(k for k, v in owners.items() if len(v) == 2)
    n = len(interior)
    edge_verts = np.array(interior, dtype=np.int64).reshape(n, 2)
    tri_pm = np.empty((n, 2), dtype=np.int64)
    opp_pm = np.empty((n, 2), dtype=np.int64)
    for i, key in enumerate(interior):
        (t0, o0), (t1, o1) = owners[key]
        tri_pm[i] = (t0, t1)
        opp_pm[i] = (o0, o1)
    lengths = np.linalg.norm(
        mesh.vertices[edge_verts[:, 1]] - mesh.vertices[edge_verts[:, 0]], axis=1
    ) if n else np.zeros(0)
    return BasisSet(mesh, edge_verts, tri_pm, opp_pm, lengths)
