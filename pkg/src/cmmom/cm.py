"""Conversion-matrix algebra for periodically time-varying loads.

A periodic waveform g(t) with Fourier coefficients c_k maps voltage to
current harmonics on the comb w_k = w_c + k*w_0 through the banded matrix
with entry (row k, col l) = c_{k-l}.  Multiport systems replace scalars by
N x N blocks; everything here uses frequency-major ordering
(global index = (k + K) * N + port) unless reordered explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class HarmonicGrid:
    """Frequency comb w_k = w_c + k * w_0 for k in [-K, K]."""

    omega_c: float
    omega_0: float
    k_max: int

    def __post_init__(self):
        if self.omega_0 <= 0:
            raise ValueError("omega_0 must be positive")
        if self.omega_c <= 0:
            raise ValueError("omega_c must be positive")
        if self.k_max < 0:
            raise ValueError("k_max must be >= 0")

    @property
    def n_freq(self) -> int:
        return 2 * self.k_max + 1

    @property
    def all_positive(self) -> bool:
        """True when every comb frequency is strictly positive.  Sub-DC combs
        are served by conjugate folding in assemble_static; operations that
        need an invertible frequency matrix require this to be True."""
        return self.omega_c - self.k_max * self.omega_0 > 0

    @property
    def harmonics(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_c + self.harmonics * self.omega_0


@dataclass(frozen=True)
class FourierWaveform:
    """Complex Fourier coefficients c_k, k in [-order, order], of a real
    T0-periodic scalar waveform; units is a tag like 'ohm', 'S', 'F', 'H'
    or '' (dimensionless)."""

    coeffs: np.ndarray
    units: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coeffs must have odd length (k = -K_w .. K_w)")
        kw = c.size // 2
        if not np.allclose(c[::-1], np.conj(c), rtol=0, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise ValueError("coefficients must be Hermitian (real waveform)")
        # enforce exactly
        c = 0.5 * (c + np.conj(c[::-1]))
        c[kw] = c[kw].real
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size // 2

    def coeff(self, k: int) -> complex:
        if abs(k) > self.order:
            return 0.0 + 0.0j
        return self.coeffs[k + self.order]

    def sample(self, tau: np.ndarray) -> np.ndarray:
        """Evaluate the waveform at normalized times tau = t/T0 (real output)."""
        tau = np.asarray(tau, dtype=float)
        ks = np.arange(-self.order, self.order + 1)
        vals = np.exp(2j * np.pi * np.outer(tau, ks)) @ self.coeffs
        return vals.real

    def min_value(self, n: int = 4096) -> float:
        return float(self.sample(np.arange(n) / n).min())

    def min_value_fejer(self, n: int = 4096) -> float:
        """Minimum of the Fejer (Cesaro) mean, which stays nonnegative for
        truncations of nonnegative waveforms (no Gibbs undershoot)."""
        ks = np.arange(-self.order, self.order + 1)
        taper = 1.0 - np.abs(ks) / (self.order + 1.0)
        tau = np.arange(n) / n
        vals = (np.exp(2j * np.pi * np.outer(tau, ks)) @ (self.coeffs * taper)).real
        return float(vals.min())

    def __add__(self, other: "FourierWaveform") -> "FourierWaveform":
        n = max(self.order, other.order)
        c = np.zeros(2 * n + 1, dtype=complex)
        c[n - self.order : n + self.order + 1] += self.coeffs
        c[n - other.order : n + other.order + 1] += other.coeffs
        return FourierWaveform(c, self.units)

    def __mul__(self, scalar: float) -> "FourierWaveform":
        return FourierWaveform(self.coeffs * scalar, self.units)

    __rmul__ = __mul__

    def product(self, other: "FourierWaveform") -> "FourierWaveform":
        """Pointwise-in-time product: coefficient convolution."""
        return FourierWaveform(np.convolve(self.coeffs, other.coeffs), self.units)


def waveform_constant(value: float, units: str = "") -> FourierWaveform:
    return FourierWaveform(np.array([value], dtype=complex), units)


def waveform_cosine(mean: float, gamma: float, units: str = "") -> FourierWaveform:
    """mean * (1 + gamma * cos(w0 t)): c0 = mean, c_(+-1) = mean*gamma/2."""
    half = mean * gamma / 2.0
    return FourierWaveform(np.array([half, mean, half], dtype=complex), units)


def waveform_square(low: float, high: float, duty: float, order: int,
                    units: str = "") -> FourierWaveform:
    """Square wave equal to `high` during the final `duty` fraction of each
    period, `low` elsewhere, truncated at the given Fourier order."""
    if not (0.0 < duty < 1.0):
        raise ValueError("duty must be in (0, 1)")
    c = np.zeros(2 * order + 1, dtype=complex)
    c[order] = low + (high - low) * duty
    for k in range(1, order + 1):
        # (high-low)/T * int_{T(1-duty)}^{T} exp(-j k w0 t) dt
        val = (high - low) * (1.0 - np.exp(2j * np.pi * k * duty)) / (-2j * np.pi * k)
        c[order + k] = val
        c[order - k] = np.conj(val)
    return FourierWaveform(c, units)


def waveform_from_samples(samples, order: int, units: str = "") -> FourierWaveform:
    """Fourier analysis of uniform samples of one period (>= 4*order+1 points)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 4 * order + 1:
        raise ValueError(f"need at least {4 * order + 1} samples for order {order}")
    spec = np.fft.fft(samples) / samples.size
    c = np.zeros(2 * order + 1, dtype=complex)
    c[order] = spec[0]
    for k in range(1, order + 1):
        c[order + k] = spec[k]    # s_n = sum c_k e^{+j 2 pi k n / N}
        c[order - k] = spec[-k]
    c = 0.5 * (c + np.conj(c[::-1]))
    return FourierWaveform(c, units)


@dataclass(frozen=True)
class ConversionMatrix:
    """Dense (N * N_f)-dimensional conversion matrix over a harmonic grid.

    ordering 'frequency-major': global = (k + K) * N + port;
    'port-major': global = port * N_f + (k + K).
    """

    grid: HarmonicGrid
    block_size: int
    matrix: np.ndarray
    ordering: str = "frequency-major"

    def __post_init__(self):
        dim = self.block_size * self.grid.n_freq
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim} x {dim}")
        if self.ordering not in ("frequency-major", "port-major"):
            raise ValueError(f"unknown ordering {self.ordering!r}")

    def block(self, k: int, l: int) -> np.ndarray:
        """The (k, l) harmonic block (frequency-major only)."""
        if self.ordering != "frequency-major":
            raise ValueError("block access requires frequency-major ordering")
        K, n = self.grid.k_max, self.block_size
        return self.matrix[(k + K) * n : (k + K + 1) * n, (l + K) * n : (l + K + 1) * n]


def small_cm(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """(N_f x N_f) scalar conversion matrix: entry (k, l) = c_{k-l}."""
    nf = grid.n_freq
    if w.order > 2 * grid.k_max:
        w = FourierWaveform(
            w.coeffs[w.order - 2 * grid.k_max : w.order + 2 * grid.k_max + 1], w.units
        )
    out = np.zeros((nf, nf), dtype=complex)
    for k in range(nf):
        for l in range(nf):
            out[k, l] = w.coeff(k - l)
    return out


def omega_matrix(grid: HarmonicGrid) -> np.ndarray:
    """Diagonal frequency matrix with entries w_k on the comb."""
    return np.diag(grid.omegas.astype(complex))


def cm_resistor(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Impedance-form conversion matrix of a time-varying series resistance."""
    return small_cm(w, grid)


def cm_conductor(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Admittance-form conversion matrix of a time-varying conductance."""
    return small_cm(w, grid)


def _check_invertible_waveform(w: FourierWaveform, what: str) -> None:
    scale = float(np.abs(w.coeffs).sum())
    if w.min_value() <= 1e-9 * scale:
        raise ValueError(
            f"{what} waveform touches zero: the inverse representation has a "
            "divergent Fourier series"
        )


def cm_resistor_admittance(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Admittance form of a resistance waveform: inverse of cm_resistor.
    Requires r(t) bounded away from zero."""
    _check_invertible_waveform(w, "resistance")
    return np.linalg.inv(cm_resistor(w, grid))


def cm_capacitor(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Admittance-form conversion matrix of a time-varying capacitance:
    Y = j Omega C."""
    return 1j * omega_matrix(grid) @ small_cm(w, grid)


def cm_capacitor_impedance(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Impedance form of a capacitance waveform (inverse of j Omega C).
    Requires c(t) bounded away from zero and a strictly positive comb."""
    if not grid.all_positive:
        raise ValueError("capacitive impedance needs all comb frequencies > 0")
    _check_invertible_waveform(w, "capacitance")
    return np.linalg.inv(cm_capacitor(w, grid))


def cm_inductor(w: FourierWaveform, grid: HarmonicGrid) -> np.ndarray:
    """Impedance-form conversion matrix of a time-varying inductance:
    V = j Omega L I."""
    return 1j * omega_matrix(grid) @ small_cm(w, grid)


def combine(mode: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Series/parallel combination of impedance-form conversion matrices."""
    if a.shape != b.shape:
        raise ValueError("operand grids do not match")
    if mode == "series":
        return a + b
    if mode == "parallel":
        try:
            return np.linalg.inv(np.linalg.inv(a) + np.linalg.inv(b))
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"singular operand in parallel combination: {exc}") from exc
    raise ValueError(f"unknown combination mode {mode!r}")


@dataclass(frozen=True)
class TimeVaryingLoad:
    """Element tree of time-varying R/G/L/C components at one port.

    node kinds: ('R'|'G'|'L'|'C', waveform) leaves or
    ('series'|'parallel', [children]) combinations.  R/G waveforms must be
    nonnegative in time, L/C strictly positive (element passivity).
    """

    kind: str
    waveform: FourierWaveform | None = None
    children: tuple = field(default_factory=tuple)
    port: int | None = None

    def __post_init__(self):
        if self.kind in ("R", "G"):
            if self.waveform.min_value_fejer() < -1e-12 * (1 + np.abs(self.waveform.coeffs).sum()):
                raise ValueError(f"{self.kind} waveform must be nonnegative in time")
        elif self.kind in ("L", "C"):
            if self.waveform.min_value() <= 0:
                raise ValueError(f"{self.kind} waveform must be positive in time")
        elif self.kind in ("series", "parallel"):
            if not self.children:
                raise ValueError("combination node needs children")
        else:
            raise ValueError(f"unknown element kind {self.kind!r}")

    def impedance_cm(self, grid: HarmonicGrid) -> np.ndarray:
        """Reduce the tree to one impedance-form (N_f x N_f) conversion matrix."""
        if self.kind == "R":
            return cm_resistor(self.waveform, grid)
        if self.kind == "G":
            _check_invertible_waveform(self.waveform, "conductance")
            return np.linalg.inv(cm_conductor(self.waveform, grid))
        if self.kind == "C":
            return cm_capacitor_impedance(self.waveform, grid)
        if self.kind == "L":
            return cm_inductor(self.waveform, grid)
        mats = [c.impedance_cm(grid) for c in self.children]
        out = mats[0]
        for m in mats[1:]:
            out = combine(self.kind, out, m)
        return out


def assemble_static(grid: HarmonicGrid, z_provider, n: int) -> ConversionMatrix:
    """Block-diagonal static conversion matrix with Z(w_k) at block k.

    Combs extending below DC are folded: Z(-w) = conj(Z(w)) for a real
    network, and an exact-DC harmonic is evaluated at a tiny positive
    frequency, where the charge term makes the structure an effective open
    circuit (no DC current on a disconnected scatterer).
    """
    nf = grid.n_freq
    w_floor = 1e-6 * grid.omega_0
    out = np.zeros((n * nf, n * nf), dtype=complex)
    for i, w in enumerate(grid.omegas):
        zk = np.asarray(z_provider(max(abs(w), w_floor)), dtype=complex)
        if zk.shape != (n, n):
            raise ValueError(f"provider returned shape {zk.shape}, expected {(n, n)}")
        if w < 0:
            zk = np.conj(zk)
        out[i * n : (i + 1) * n, i * n : (i + 1) * n] = zk
    return ConversionMatrix(grid, n, out)


def assemble_lumped_loads(grid: HarmonicGrid, loads: list[TimeVaryingLoad], n: int) -> ConversionMatrix:
    """Dynamic loading matrix for lumped loads attached to distinct ports."""
    ports = [ld.port for ld in loads]
    if len(set(ports)) != len(ports):
        raise ValueError("port collision in load list")
    nf = grid.n_freq
    out = np.zeros((n * nf, n * nf), dtype=complex)
    for ld in loads:
        if ld.port is None or not (0 <= ld.port < n):
            raise ValueError(f"load port {ld.port} out of range for N = {n}")
        m = ld.impedance_cm(grid)
        idx = np.arange(nf) * n + ld.port
        out[np.ix_(idx, idx)] += m
    return ConversionMatrix(grid, n, out)


def assemble_distributed(grid: HarmonicGrid, material: FourierWaveform,
                         gram: np.ndarray) -> ConversionMatrix:
    """Distributed surface-resistivity loading: block (k, l) = c_{k-l} * overlap."""
    n = gram.shape[0]
    nf = grid.n_freq
    if material.order > 2 * grid.k_max:
        raise ValueError("material harmonic content exceeds the comb (missing coefficient)")
    out = np.zeros((n * nf, n * nf), dtype=complex)
    for k in range(nf):
        for l in range(nf):
            c = material.coeff(k - l)
            if c != 0:
                out[k * n : (k + 1) * n, l * n : (l + 1) * n] = c * gram
    return ConversionMatrix(grid, n, out)


def assemble_lorentz_drude(grid: HarmonicGrid,
                           alpha: FourierWaveform, beta: FourierWaveform,
                           kappa: FourierWaveform,
                           overlap_a: np.ndarray, overlap_b: np.ndarray,
                           overlap_k: np.ndarray) -> ConversionMatrix:
    """Damped-oscillator surface model: j*Omega*A + B - j*K*Omega^{-1} with
    per-parameter overlap matrices (the comb keeps Omega invertible)."""
    if not grid.all_positive:
        raise ValueError("oscillator surface model needs all comb frequencies > 0")
    a = assemble_distributed(grid, alpha, overlap_a).matrix
    b = assemble_distributed(grid, beta, overlap_b).matrix
    kmat = assemble_distributed(grid, kappa, overlap_k).matrix
    n = overlap_a.shape[0]
    w_rows = np.repeat(grid.omegas, n)
    out = 1j * w_rows[:, None] * a + b - 1j * kmat / w_rows[:, None]
    return ConversionMatrix(grid, n, out)


def reorder(cm: ConversionMatrix, to: str) -> ConversionMatrix:
    """Similarity permutation between frequency-major and port-major ordering."""
    if to not in ("frequency-major", "port-major"):
        raise ValueError(f"unknown ordering {to!r}")
    if to == cm.ordering:
        return cm
    n, nf = cm.block_size, cm.grid.n_freq
    if cm.ordering == "frequency-major":
        # perm[new] = old: new port-major index (a, k) reads old (k, a)
        perm = np.array([k * n + a for a in range(n) for k in range(nf)])
    else:
        perm = np.array([a * nf + k for k in range(nf) for a in range(n)])
    return ConversionMatrix(cm.grid, n, cm.matrix[np.ix_(perm, perm)], to)
