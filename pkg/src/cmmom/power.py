"""Power bookkeeping on the harmonic comb.

For an excitation confined to the carrier, the extinguished power is
P_ext = (1/2) Re{ I^H V }.  Each harmonic re-radiates / dissipates
P_lti^k = (1/2) I_k^H Herm(Z(w_k)) I_k through the static network, and
exchanges P_tv^k = (1/2) Re{ I_k^H (C_dyn I)_k } with the modulation.
Conservation: P_ext = sum_k (P_lti^k + P_tv^k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .cm import ConversionMatrix
from .solver import HarmonicSolution


@dataclass(frozen=True)
class PowerReport:
    harmonics: np.ndarray        # k values
    p_ext_w: float
    p_lti_w: np.ndarray          # per harmonic, W
    p_rad_w: np.ndarray | None   # per harmonic radiated part (if grams given)
    p_tv_w: np.ndarray           # per harmonic power absorbed from the modulation
    balance_residual_rel: float

    @property
    def p_abs_w(self) -> np.ndarray | None:
        """Static ohmic loss per harmonic (total LTI minus radiated)."""
        if self.p_rad_w is None:
            return None
        return self.p_lti_w - self.p_rad_w

    def to_dict(self) -> dict:
        out = {
            "harmonics": [int(k) for k in self.harmonics],
            "p_ext_w": self.p_ext_w,
            "p_lti_w": [float(p) for p in self.p_lti_w],
            "p_tv_w": [float(p) for p in self.p_tv_w],
            "balance_residual_rel": self.balance_residual_rel,
        }
        if self.p_rad_w is not None:
            out["p_rad_w"] = [float(p) for p in self.p_rad_w]
            out["p_abs_w"] = [float(p) for p in self.p_abs_w]
        return out

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def extinction_power(sol: HarmonicSolution, v: np.ndarray) -> float:
    """(1/2) Re{ I^H V } over the whole comb."""
    v = np.asarray(v, dtype=complex)
    return float(0.5 * np.real(np.vdot(sol.currents, v)))


def lti_powers(sol: HarmonicSolution, static_cm: ConversionMatrix) -> np.ndarray:
    """Per-harmonic power into the static (time-invariant) network."""
    n, grid = sol.n_ports, sol.grid
    mat = static_cm.matrix
    out = np.empty(grid.n_freq)
    for kk in range(grid.n_freq):
        zk = mat[kk * n : (kk + 1) * n, kk * n : (kk + 1) * n]
        ik = sol.currents[kk * n : (kk + 1) * n]
        out[kk] = 0.5 * np.real(np.vdot(ik, 0.5 * (zk + zk.conj().T) @ ik))
    return out


def radiated_powers(sol: HarmonicSolution, rad_grams: np.ndarray) -> np.ndarray:
    """Per-harmonic radiated power through the radiation Gram at each w_k."""
    n, grid = sol.n_ports, sol.grid
    if rad_grams.shape != (grid.n_freq, n, n):
        raise ValueError(f"expected rad_grams shape {(grid.n_freq, n, n)}")
    out = np.empty(grid.n_freq)
    for kk in range(grid.n_freq):
        ik = sol.currents[kk * n : (kk + 1) * n]
        out[kk] = 0.5 * np.real(np.vdot(ik, rad_grams[kk] @ ik))
    return out


def tv_power(sol: HarmonicSolution, dynamic_cm: ConversionMatrix) -> np.ndarray:
    """Per-harmonic power delivered from the wave to the time-varying loading.

    Uses the full dynamic conversion matrix (not its Hermitian part): the
    cross-harmonic terms are exactly what the modulation moves between
    harmonics, so for lossless-in-the-mean modulation these sum against the
    per-harmonic LTI powers.
    """
    n, grid = sol.n_ports, sol.grid
    w = dynamic_cm.matrix @ sol.currents
    out = np.empty(grid.n_freq)
    for kk in range(grid.n_freq):
        ik = sol.currents[kk * n : (kk + 1) * n]
        out[kk] = 0.5 * np.real(np.vdot(ik, w[kk * n : (kk + 1) * n]))
    return out


def power_report(sol: HarmonicSolution, static_cm: ConversionMatrix,
                 dynamic_cm: ConversionMatrix, v: np.ndarray,
                 rad_grams: np.ndarray | None = None) -> PowerReport:
    p_ext = extinction_power(sol, v)
    p_lti = lti_powers(sol, static_cm)
    p_tv = tv_power(sol, dynamic_cm)
    p_rad = radiated_powers(sol, rad_grams) if rad_grams is not None else None
    total = p_lti.sum() + p_tv.sum()
    scale = max(abs(p_ext), abs(p_lti).max(), abs(p_tv).max(), 1e-300)
    residual = abs(p_ext - total) / scale
    return PowerReport(sol.grid.harmonics, p_ext, p_lti, p_rad, p_tv, residual)
