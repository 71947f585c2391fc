"""Harmonic system solvers.

The discrete system is C_V = (C_Z + C_R) C_I in frequency-major ordering,
where C_Z is block diagonal with the static impedance matrix at each comb
frequency and C_R couples harmonics through the time-varying loading.  When
the loading touches only N_l of the N ports, the unloaded unknowns can be
eliminated per harmonic (Schur complement), shrinking the coupled solve
from N * N_f to N_l * N_f unknowns.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .cm import ConversionMatrix, HarmonicGrid


class SolverError(Exception):
    pass


@dataclass(frozen=True)
class HarmonicSolution:
    """Port currents on the comb, frequency-major: I[(k + K) * N + port]."""

    grid: HarmonicGrid
    n_ports: int
    currents: np.ndarray
    method: str
    residual_rel: float
    timings: dict = field(default_factory=dict)

    def at_harmonic(self, k: int) -> np.ndarray:
        n, kk = self.n_ports, k + self.grid.k_max
        return self.currents[kk * n : (kk + 1) * n]


def _as_freq_major(cm: ConversionMatrix) -> np.ndarray:
    if cm.ordering != "frequency-major":
        from .cm import reorder

        cm = reorder(cm, "frequency-major")
    return cm.matrix


def solve_full(static_cm: ConversionMatrix, dynamic_cm: ConversionMatrix,
               v: np.ndarray) -> HarmonicSolution:
    """Direct LU solve of the complete (N * N_f) system."""
    if static_cm.grid != dynamic_cm.grid or static_cm.block_size != dynamic_cm.block_size:
        raise SolverError("static and dynamic conversion matrices do not match")
    n, grid = static_cm.block_size, static_cm.grid
    v = np.asarray(v, dtype=complex)
    if v.shape != (n * grid.n_freq,):
        raise SolverError(f"excitation must have length {n * grid.n_freq}")
    a = _as_freq_major(static_cm) + _as_freq_major(dynamic_cm)
    t0 = time.perf_counter()
    try:
        lu = lu_factor(a)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular system: {exc}") from exc
    i = lu_solve(lu, v)
    dt = time.perf_counter() - t0
    scale = np.linalg.norm(v)
    res = float(np.linalg.norm(a @ i - v) / scale) if scale > 0 else 0.0
    return HarmonicSolution(grid, n, i, "full", res, {"solve_s": dt})


@dataclass(frozen=True)
class CompressedSystem:
    """Per-harmonic Schur reduction onto the loaded ports.

    loaded: sorted port indices carrying time-varying loads (size N_l).
    z_reduced: (N_f, N_l, N_l) Schur complements Z_ll - Z_lu Z_uu^-1 Z_ul.
    uu_factors: cached LU factorizations of Z_uu(w_k) for recovery.
    z_ul: (N_f, N_u, N_l) coupling blocks for recovery.
    """

    grid: HarmonicGrid
    n_ports: int
    loaded: np.ndarray
    unloaded: np.ndarray
    z_reduced: np.ndarray
    z_ul: np.ndarray
    uu_factors: tuple
    construct_s: float


def build_compressed(static_cm: ConversionMatrix, loaded_ports) -> CompressedSystem:
    """Eliminate unloaded unknowns from each static block."""
    n, grid = static_cm.block_size, static_cm.grid
    loaded = np.unique(np.asarray(loaded_ports, dtype=int))
    if loaded.size == 0:
        raise SolverError("no loaded ports: nothing to compress onto")
    if loaded.min() < 0 or loaded.max() >= n:
        raise SolverError("loaded port index out of range")
    unloaded = np.setdiff1d(np.arange(n), loaded)
    mat = _as_freq_major(static_cm)
    nf, nl, nu = grid.n_freq, loaded.size, unloaded.size
    z_red = np.empty((nf, nl, nl), dtype=complex)
    z_ul = np.empty((nf, nu, nl), dtype=complex)
    factors = []
    t0 = time.perf_counter()
    for kk in range(nf):
        zk = mat[kk * n : (kk + 1) * n, kk * n : (kk + 1) * n]
        zll = zk[np.ix_(loaded, loaded)]
        if nu == 0:
            z_red[kk] = zll
            factors.append(None)
            continue
        zlu = zk[np.ix_(loaded, unloaded)]
        zul = zk[np.ix_(unloaded, loaded)]
        zuu = zk[np.ix_(unloaded, unloaded)]
        try:
            lu = lu_factor(zuu)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"singular unloaded block at harmonic {kk - grid.k_max}: {exc}") from exc
        z_red[kk] = zll - zlu @ lu_solve(lu, zul)
        z_ul[kk] = zul
        factors.append((lu, zlu))
    return CompressedSystem(grid, n, loaded, unloaded, z_red, z_ul,
                            tuple(factors), time.perf_counter() - t0)


def solve_compressed(comp: CompressedSystem, dynamic_cm: ConversionMatrix,
                     v: np.ndarray) -> HarmonicSolution:
    """Solve the reduced coupled system and recover the unloaded currents."""
    grid, n = comp.grid, comp.n_ports
    if dynamic_cm.grid != grid or dynamic_cm.block_size != n:
        raise SolverError("dynamic conversion matrix does not match compressed system")
    v = np.asarray(v, dtype=complex)
    if v.shape != (n * grid.n_freq,):
        raise SolverError(f"excitation must have length {n * grid.n_freq}")
    nf, nl = grid.n_freq, comp.loaded.size
    dyn = _as_freq_major(dynamic_cm)

    # dynamic loading restricted to the loaded ports (zero elsewhere by premise)
    lidx = (np.arange(nf)[:, None] * n + comp.loaded[None, :]).ravel()
    uidx = (np.arange(nf)[:, None] * n + comp.unloaded[None, :]).ravel()
    if comp.unloaded.size:
        outside = np.abs(dyn[np.ix_(uidx, uidx)]).max(initial=0.0)
        outside = max(outside, np.abs(dyn[np.ix_(uidx, lidx)]).max(initial=0.0),
                      np.abs(dyn[np.ix_(lidx, uidx)]).max(initial=0.0))
        if outside > 1e-12 * max(1.0, np.abs(dyn).max()):
            raise SolverError("dynamic loading touches ports outside the compressed set")

    t0 = time.perf_counter()
    a = dyn[np.ix_(lidx, lidx)].copy()
    v_red = v[lidx].copy()
    for kk in range(nf):
        sl = slice(kk * nl, (kk + 1) * nl)
        a[sl, sl] += comp.z_reduced[kk]
        if comp.unloaded.size:
            lu, zlu = comp.uu_factors[kk]
            vu = v[kk * n + comp.unloaded]
            v_red[sl] -= zlu @ lu_solve(lu, vu)
    try:
        i_l = lu_solve(lu_factor(a), v_red)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular reduced system: {exc}") from exc

    i_full = np.zeros(n * nf, dtype=complex)
    i_full[lidx] = i_l
    for kk in range(nf):
        if not comp.unloaded.size:
            break
        lu, _ = comp.uu_factors[kk]
        vu = v[kk * n + comp.unloaded]
        rhs = vu - comp.z_ul[kk] @ i_l[kk * nl : (kk + 1) * nl]
        i_full[kk * n + comp.unloaded] = lu_solve(lu, rhs)
    dt = time.perf_counter() - t0

    # residual against the reduced system (the full operator is not stored)
    scale = np.linalg.norm(v_red)
    res = float(np.linalg.norm(a @ i_l - v_red) / scale) if scale > 0 else 0.0
    return HarmonicSolution(grid, n, i_full, "compressed", res,
                            {"construct_s": comp.construct_s, "solve_s": dt})


def _time_lu(dim: int, trials: int, rng: np.random.Generator) -> float:
    """Median wall time of one in-place LU factorization at the given size."""
    times = []
    for _ in range(trials):
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a += dim * np.eye(dim)
        t0 = time.perf_counter()
        lu_factor(a, overwrite_a=True, check_finite=False)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_compression(n: int, n_l: int, k_values, trials: int = 3,
                      seed: int = 0) -> list[dict]:
    """Model the cost of full vs compressed solves at growing comb sizes.

    Dense-solve cost is dominated by one LU factorization, so each
    configuration times an in-place LU at the relevant dimension:
    full solve at N * N_f; compressed at N (per-harmonic elimination,
    N_f of them) plus N_l * N_f (the coupled reduced system).
    """
    if not (0 < n_l <= n):
        raise SolverError("need 0 < N_l <= N")
    rng = np.random.default_rng(seed)
    rows = []
    t_block = _time_lu(n, trials, rng)
    for k_max in k_values:
        nf = 2 * int(k_max) + 1
        t_full = _time_lu(n * nf, trials, rng)
        t_construct = nf * t_block
        t_invert = _time_lu(n_l * nf, trials, rng)
        rows.append({
            "N": n,
            "N_l": n_l,
            "N_f": nf,
            "t_uncompressed_s": t_full,
            "t_construct_s": t_construct,
            "t_invert_s": t_invert,
            "speedup": t_full / (t_construct + t_invert),
        })
    return rows
