"""Single-frequency EFIE kernel over RWG bases.

Mixed-potential Galerkin EFIE with singularity extraction for touching
triangle pairs, plus Gram/overlap matrices, plane-wave and delta-gap
excitations, far fields, and multi-harmonic backscatter bookkeeping.

Phase convention: time dependence exp(+j w t); outgoing Green's function
exp(-j k R) / (4 pi R).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constants import C0, EPS0, ETA0, MU0
from .mesh import BasisSet
from .quadrature import points_weights, triangle_rule

NQ_FAR = 3
NQ_NEAR = 7
N_THETA = 32
N_PHI = 64
DB_FLOOR = -200.0


class AssemblyError(Exception):
    """Non-finite entry produced during matrix assembly."""


@dataclass(frozen=True)
class ImpedanceMatrix:
    omega: float
    matrix: np.ndarray  # (N, N) complex


@dataclass(frozen=True)
class GramMatrix:
    matrix: np.ndarray  # (N, N) real symmetric positive definite


@dataclass(frozen=True)
class Excitation:
    kind: str                      # "plane_wave" | "delta_gap"
    k_hat: np.ndarray | None = None
    e_hat: np.ndarray | None = None
    amplitude: float = 1.0         # E0 in V/m or V0 in volts
    port: int | None = None

    def __post_init__(self):
        if self.kind == "plane_wave":
            k_hat = np.asarray(self.k_hat, dtype=float)
            e_hat = np.asarray(self.e_hat, dtype=float)
            if abs(np.linalg.norm(k_hat) - 1) > 1e-9 or abs(np.linalg.norm(e_hat) - 1) > 1e-9:
                raise ValueError("k_hat and e_hat must be unit vectors")
            if abs(k_hat @ e_hat) > 1e-9:
                raise ValueError("polarization must be orthogonal to propagation")
            object.__setattr__(self, "k_hat", k_hat)
            object.__setattr__(self, "e_hat", e_hat)
        elif self.kind == "delta_gap":
            if self.port is None:
                raise ValueError("delta_gap excitation requires a port index")
        else:
            raise ValueError(f"unknown excitation kind {self.kind!r}")


class _BasisGeometry:
    """Precomputed per-basis arrays shared by the assembly routines."""

    def __init__(self, basis: BasisSet):
        mesh = basis.mesh
        self.tri_verts = mesh.vertices[mesh.triangles]          # (T, 3, 3)
        self.tri_idx = mesh.triangles
        self.areas = mesh.triangle_areas()
        self.qp_far, self.qw_far = points_weights(self.tri_verts, self.areas, NQ_FAR)
        self.qp_near, self.qw_near = points_weights(self.tri_verts, self.areas, NQ_NEAR)
        n = basis.size
        self.tri = basis.tri_pm                                  # (N, 2)
        self.sign = np.array([1.0, -1.0])
        self.opp = mesh.vertices[basis.opp_pm]                   # (N, 2, 3)
        la = basis.lengths[:, None]
        a = self.areas[self.tri]                                 # (N, 2)
        self.c = self.sign[None, :] * la / (2.0 * a)             # f coefficient
        self.d = self.sign[None, :] * la / a                     # div f
        self.n = n


_GEOM_CACHE: dict[int, _BasisGeometry] = {}


def _geometry(basis: BasisSet) -> _BasisGeometry:
    key = id(basis)
    geom = _GEOM_CACHE.get(key)
    if geom is None or geom.tri is not basis.tri_pm:
        geom = _BasisGeometry(basis)
        _GEOM_CACHE.clear()
        _GEOM_CACHE[key] = geom
    return geom


def _sphere_rule(n_theta: int, n_phi: int):
    """Unit-sphere quadrature: Gauss-Legendre in cos(theta) x uniform phi."""
    x, wt = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sin(theta)
    dirs = np.empty((n_theta * n_phi, 3))
    dirs[:, 0] = np.outer(st, np.cos(phi)).ravel()
    dirs[:, 1] = np.outer(st, np.sin(phi)).ravel()
    dirs[:, 2] = np.outer(np.cos(theta), np.ones(n_phi)).ravel()
    w = np.outer(wt, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    return dirs, w


def _pattern_matrix(basis: BasisSet, omega: float, dirs: np.ndarray) -> np.ndarray:
    """Per-basis transverse radiation vectors F_n(d): (ndirs, 3, N) complex."""
    g = _geometry(basis)
    k = omega / C0
    pts = g.qp_near.reshape(-1, 3)
    E = np.exp(1j * k * (dirs @ pts.T)).reshape(dirs.shape[0], -1, g.qp_near.shape[1])
    F = np.zeros((dirs.shape[0], 3, g.n), dtype=complex)
    for i in range(2):
        p = g.tri[:, i]
        rho = g.qp_near[p] - g.opp[:, i][:, None, :]
        wrho = (g.qw_near[p][:, :, None] * rho) * g.c[:, i][:, None, None]
        F += np.einsum("dnq,nqx->dxn", E[:, p, :], wrho)
    F *= -1j * omega * MU0 / (4.0 * np.pi)
    # transverse projection
    proj = np.einsum("dx,dxn->dn", dirs, F)
    F -= dirs[:, :, None] * proj[:, None, :]
    return F


def radiation_gram(basis: BasisSet, omega: float,
                   n_theta: int = N_THETA, n_phi: int = N_PHI) -> np.ndarray:
    """Radiation-resistance matrix: sphere Gram of the basis far-field
    patterns, (1/eta0) * oint F^H F dOmega.  PSD by construction."""
    dirs, w = _sphere_rule(n_theta, n_phi)
    F = _pattern_matrix(basis, omega, dirs)
    Fw = F * w[:, None, None]
    m = np.einsum("dxm,dxn->mn", F.conj(), Fw) / ETA0
    m = 0.5 * (m + m.conj().T)
    return np.real(m)


def assemble_Z(basis: BasisSet, omega: float) -> ImpedanceMatrix:
    """Galerkin EFIE impedance matrix at angular frequency omega.

    The reactive part comes from the mixed-potential kernel with singularity
    extraction; the resistive part is the radiation Gram, which keeps the
    Hermitian part positive semidefinite to rounding.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    g = _geometry(basis)
    k = omega / C0
    S00, S10, S01, S11 = kernels.compute_moments(
        g.tri_verts, g.tri_idx, k, g.qp_far, g.qw_far, g.qp_near, g.qw_near
    )
    n = g.n
    A = np.zeros((n, n), dtype=complex)
    Phi = np.zeros((n, n), dtype=complex)
    for i in range(2):
        p = g.tri[:, i]
        vm = g.opp[:, i]
        for j in range(2):
            q = g.tri[:, j]
            vn = g.opp[:, j]
            s00 = S00[p[:, None], q[None, :]]
            s11 = S11[p[:, None], q[None, :]]
            s10 = S10[p[:, None], q[None, :]]
            s01 = S01[p[:, None], q[None, :]]
            dots = (
                s11
                - np.einsum("mnx,nx->mn", s10, vn)
                - np.einsum("mx,mnx->mn", vm, s01)
                + (vm @ vn.T) * s00
            )
            cc = np.outer(g.c[:, i], g.c[:, j])
            dd = np.outer(g.d[:, i], g.d[:, j])
            A += cc * dots
            Phi += dd * s00
    Zk = 1j * omega * MU0 * A - 1j / (omega * EPS0) * Phi
    Z = radiation_gram(basis, omega) + 1j * Zk.imag
    if not np.all(np.isfinite(Z)):
        bad = np.argwhere(~np.isfinite(Z))[0]
        raise AssemblyError(f"non-finite impedance entry at ({bad[0]}, {bad[1]})")
    return ImpedanceMatrix(omega, Z)


def assemble_anisotropic_overlap(basis: BasisSet, tensor_field: np.ndarray) -> np.ndarray:
    """Weighted overlap matrix int psi_a . R . psi_b dS with a per-triangle
    2x2 tensor given in each triangle's local (u, v) frame.

    The local frame is u along the first triangle edge (v1 - v0) and
    v = n x u.  A constant tensor per triangle keeps the integrand quadratic,
    so the 3-point rule is exact.
    """
    g = _geometry(basis)
    tensor_field = np.asarray(tensor_field, dtype=float)
    T = g.tri_verts.shape[0]
    if tensor_field.shape != (T, 2, 2):
        raise ValueError(f"tensor frame mismatch: expected shape {(T, 2, 2)}, got {tensor_field.shape}")
    e1 = g.tri_verts[:, 1] - g.tri_verts[:, 0]
    u = e1 / np.linalg.norm(e1, axis=1)[:, None]
    nrm = np.cross(e1, g.tri_verts[:, 2] - g.tri_verts[:, 0])
    nrm = nrm / np.linalg.norm(nrm, axis=1)[:, None]
    v = np.cross(nrm, u)
    # 3D tensor per triangle: R3 = u R_uu u^T + u R_uv v^T + ...
    frame = np.stack([u, v], axis=1)                              # (T, 2, 3)
    R3 = np.einsum("tia,tij,tjb->tab", frame, tensor_field, frame)  # (T, 3, 3)

    n = g.n
    out = np.zeros((n, n))
    # group bases by triangle for the shared-triangle sparsity pattern
    tri_to_bases: dict[int, list[tuple[int, int]]] = {}
    for m in range(n):
        for i in range(2):
            tri_to_bases.setdefault(int(g.tri[m, i]), []).append((m, i))
    bary, wref = triangle_rule(3)
    for t, members in tri_to_bases.items():
        pts = bary @ g.tri_verts[t]                               # (3, 3)
        w = g.areas[t] * wref
        Rt = R3[t]
        for (m, i) in members:
            fm = g.c[m, i] * (pts - g.opp[m, i])                  # (3, 3)
            for (mm, j) in members:
                fn = g.c[mm, j] * (pts - g.opp[mm, j])
                out[m, mm] += np.einsum("q,qa,ab,qb->", w, fm, Rt, fn)
    return out


def assemble_gram(basis: BasisSet) -> GramMatrix:
    """Basis overlap matrix int psi_a . psi_b dS (exact; integrand quadratic)."""
    T = basis.mesh.num_triangles
    eye = np.broadcast_to(np.eye(2), (T, 2, 2))
    return GramMatrix(assemble_anisotropic_overlap(basis, eye))


def excite_planewave(basis: BasisSet, omega: float, exc: Excitation) -> np.ndarray:
    """Tested incident-field vector V_a = <psi_a, E_inc>, same quadrature as assemble_Z."""
    if exc.kind != "plane_wave":
        raise ValueError("plane-wave excitation required")
    g = _geometry(basis)
    k = omega / C0
    phase = np.exp(-1j * k * (g.qp_far @ exc.k_hat))              # (T, nq)
    efield = exc.amplitude * exc.e_hat
    v = np.zeros(g.n, dtype=complex)
    for i in range(2):
        p = g.tri[:, i]
        rho = g.qp_far[p] - g.opp[:, i][:, None, :]               # (N, nq, 3)
        v += g.c[:, i] * np.einsum("mq,mqx,x->m", g.qw_far[p] * phase[p], rho, efield)
    return v


def excite_deltagap(basis: BasisSet, port: int, v0: float) -> np.ndarray:
    """Delta-gap vector: single entry V0 * edge length at the port basis."""
    if not (0 <= port < basis.size):
        raise IndexError(f"port {port} out of range for N = {basis.size}")
    v = np.zeros(basis.size, dtype=complex)
    v[port] = v0 * basis.lengths[port]
    return v


def far_field(basis: BasisSet, currents: np.ndarray, omega: float, direction) -> np.ndarray:
    """Radiation vector r * E_sc as r -> infinity (V), transverse to direction."""
    direction = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(direction) - 1) > 1e-9:
        raise ValueError("direction must be a unit vector")
    g = _geometry(basis)
    k = omega / C0
    phase = np.exp(1j * k * (g.qp_near @ direction))              # (T, nq)
    vec = np.zeros(3, dtype=complex)
    currents = np.asarray(currents)
    for i in range(2):
        p = g.tri[:, i]
        rho = g.qp_near[p] - g.opp[:, i][:, None, :]
        vec += np.einsum(
            "m,mq,mqx->x", currents * g.c[:, i], g.qw_near[p] * phase[p], rho
        )
    vec *= -1j * omega * MU0 / (4.0 * np.pi)
    return vec - (vec @ direction) * direction


def radiated_power(basis: BasisSet, currents: np.ndarray, omega: float,
                   n_theta: int = 32, n_phi: int = 64) -> float:
    """Total radiated power by sphere integration of the far field (W).

    Gauss-Legendre in cos(theta) crossed with a uniform phi grid.
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    thetas = np.arccos(x)
    phis = 2.0 * np.pi * np.arange(n_phi) / n_phi
    total = 0.0
    for th, wt in zip(thetas, w):
        st, ct = np.sin(th), np.cos(th)
        for ph in phis:
            d = np.array([st * np.cos(ph), st * np.sin(ph), ct])
            F = far_field(basis, currents, omega, d)
            total += wt * (2.0 * np.pi / n_phi) * np.real(F @ np.conj(F))
    return total / (2.0 * ETA0)


def backscatter_psi(e_sc_far: np.ndarray, e_inc_mag: float) -> float:
    """Multi-harmonic backscatter Psi = 4 pi |r E_sc|^2 / |E_inc|^2 (m^2)."""
    if e_inc_mag <= 0:
        raise ValueError("incident magnitude must be positive")
    e_sc_far = np.asarray(e_sc_far)
    return float(4.0 * np.pi * np.real(e_sc_far @ np.conj(e_sc_far)) / e_inc_mag**2)


def to_dbsm(psi: float) -> float:
    """Psi in dB relative to 1 m^2, floored at DB_FLOOR."""
    if psi <= 10.0 ** (DB_FLOOR / 10.0):
        return DB_FLOOR
    return float(10.0 * np.log10(psi))


_MAGIC = b"CMOM"


def save_matrix(path, matrix: np.ndarray, omega: float) -> None:
    """Binary matrix file: 16-byte header (magic 'CMOM', u32 N, u64 freq in uHz)
    then row-major interleaved little-endian f64 (re, im)."""
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise ValueError("matrix must be square")
    freq_uhz = int(round(omega / (2.0 * np.pi) * 1e6))
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<IQ", n, freq_uhz))
        inter = np.empty((n, n, 2))
        inter[..., 0] = matrix.real
        inter[..., 1] = matrix.imag
        fh.write(inter.astype("<f8").tobytes())


def load_matrix(path) -> tuple[np.ndarray, float]:
    """Inverse of save_matrix; returns (matrix, omega)."""
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != _MAGIC:
            raise ValueError(f"{path}: bad matrix file header")
        n, freq_uhz = struct.unpack("<IQ", header[4:])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != 2 * n * n:
        raise ValueError(f"{path}: truncated matrix payload")
    data = data.reshape(n, n, 2)
    return data[..., 0] + 1j * data[..., 1], 2.0 * np.pi * freq_uhz * 1e-6
