"""Born-Markov (overdamped) response of a two-mirror fiber-grating cavity.

The guided emission rate is multiplied by an impact factor G that depends
on the phase per crossing and the atom's axial position.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emission_rates import AtomSpec, RateReport, rates as cavity_free_rates
from .fiber_modes import FiberSpec, GuidedModeSolution


@dataclass(frozen=True)
class CavitySpec:
    """Mirror separation ``L`` (m), reflection coefficient |R| e^{i phi_R}.

    ``alpha`` is the intensity absorption coefficient of the fiber in 1/cm.
    """

    L: float
    R_mag: float
    phi_R: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"cavity length L must be positive, got {self.L}")
        if not 0.0 <= self.R_mag < 1.0:
            raise ValueError(f"mirror |R| must lie in [0, 1), got {self.R_mag}")
        if not self.alpha >= 0.0:
            raise ValueError(f"absorption alpha must be >= 0, got {self.alpha}")

    @classmethod
    def from_reflectivity(cls, L: float, R2: float, **kw) -> "CavitySpec":
        if not 0.0 <= R2 < 1.0:
            raise ValueError(f"reflectivity |R|^2 must lie in [0, 1), got {R2}")
        return cls(L=L, R_mag=math.sqrt(R2), **kw)

    @property
    def T_mag(self) -> float:
        return math.sqrt(1.0 - self.R_mag**2)

    @property
    def alpha_per_m(self) -> float:
        return self.alpha * 100.0


@dataclass(frozen=True)
class CavityReport:
    Phi0: float
    G0: float
    gamma_cavgyd: float
    Gamma_total: float
    eta: float
    finesse: float
    gamma_gyd: float
    gamma_rad: float


def finesse(R_mag: float) -> float:
    return math.pi * R_mag / (1.0 - R_mag**2)


def impact_bounds(R_mag: float) -> tuple[float, float]:
    """(G_min, G_max) reached at resonant nodes and antinodes."""
    return (1 - R_mag) / (1 + R_mag), (1 + R_mag) / (1 - R_mag)


def phase_per_crossing(mode: GuidedModeSolution, cavity: CavitySpec, q: int,
                       omega: float | None = None):
    """Phase per crossing for dipole component ``q``.

    Complex when the cavity has absorption.  ``omega`` defaults to the
    frequency the mode was solved at.
    """
    beta = mode.beta
    if omega is not None:
        beta = beta + (omega - mode.omega) / mode.v_g
    if cavity.alpha > 0:
        beta = beta + 0.5j * cavity.alpha_per_m
    return beta * cavity.L + cavity.phi_R + (1 + q) * math.pi


def impact_factor(Phi, R_mag: float, beta_z):
    """Cavity impact factor G for real phase ``Phi`` and local phase ``beta_z``."""
    if not 0.0 <= R_mag < 1.0:
        raise ValueError(f"mirror |R| must lie in [0, 1), got {R_mag}")
    Phi = np.asarray(Phi, dtype=float)
    beta_z = np.asarray(beta_z, dtype=float)
    R2 = R_mag * R_mag
    num = 1 + R2 + 2 * R_mag * np.cos(Phi) * np.cos(2 * beta_z)
    den = 1 - R2 + 4 * R2 / (1 - R2) * np.sin(Phi) ** 2
    G = num / den
    return float(G) if G.ndim == 0 else G


def impact_series(Phi, R_mag: float, beta_z, N: int):
    """Multiple-reflection Fourier series for G truncated after order ``N``."""
    if N < 0:
        raise ValueError("truncation order N must be >= 0")
    Phi = np.asarray(Phi, dtype=float)
    beta_z = np.asarray(beta_z, dtype=float)
    total = np.zeros(np.broadcast(Phi, beta_z).shape)
    for n in range(N + 1):
        even = R_mag ** (2 * n) * np.cos(2 * n * Phi)
        total = total + (even if n == 0 else 2 * even)
        odd = (2 * n + 1) * Phi
        total = total + R_mag ** (2 * n + 1) * (np.cos(odd + 2 * beta_z) + np.cos(odd - 2 * beta_z))
    return float(total) if total.ndim == 0 else total


def overdamped_report(fiber: FiberSpec, mode: GuidedModeSolution, atom: AtomSpec,
                      cavity: CavitySpec, free: RateReport | None = None) -> CavityReport:
    """Cavity-modified rates at the resonant phase, Born-Markov regime.

    Pass ``free`` to reuse precomputed cavity-free rates.
    """
    if free is None:
        free = cavity_free_rates(fiber, atom, mode)
    Phi0 = float(np.real(phase_per_crossing(mode, cavity, atom.q)))
    G0 = impact_factor(Phi0, cavity.R_mag, mode.beta * atom.z * 1e-9)
    g_cav = free.gamma_gyd * G0
    Gamma = g_cav + free.gamma_rad
    return CavityReport(Phi0=Phi0, G0=G0, gamma_cavgyd=g_cav, Gamma_total=Gamma,
                        eta=g_cav / Gamma, finesse=finesse(cavity.R_mag),
                        gamma_gyd=free.gamma_gyd, gamma_rad=free.gamma_rad)


def tune_length(cavity: CavitySpec, mode: GuidedModeSolution, q: int, parity: str) -> float:
    """Length nearest ``cavity.L`` whose phase per crossing is an even/odd multiple of pi."""
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    offset = cavity.phi_R + (1 + q) * math.pi
    target = (mode.beta * cavity.L + offset) / math.pi
    want = 0 if parity == "even" else 1
    m = round(target)
    if m % 2 != want:
        m = m + 1 if target > m else m - 1
    L_new = (m * math.pi - offset) / mode.beta
    if L_new <= 0:
        m += 2
        L_new = (m * math.pi - offset) / mode.beta
    return L_new
