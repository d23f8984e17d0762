"""Single-mode reduction of the cavity dynamics.

Keeping only the cavity mode nearest the atomic line gives a damped
two-oscillator problem with coupling Omega and cavity damping kappa.
Rates here are in units of gamma0 unless noted; lengths are in metres.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cavity_response import CavitySpec, impact_bounds
from .decay_engine import DecayTrace, detect_oscillations
from .emission_rates import GAMMA0_CS_D2, AtomSpec, RateReport
from .fiber_modes import GuidedModeSolution

REGIMES = ("strong_coupling", "overdamped", "free_decay", "intermediate")


class RegimeMismatchWarning(UserWarning):
    pass


@dataclass(frozen=True)
class RegimeDiagnosis:
    regime: str
    ratios: dict


@dataclass(frozen=True)
class SingleModeReport:
    m_index: int
    Delta: float          # rad/s
    kappa: float
    Omega: float
    Lambda: complex
    gamma: float
    finesse: float
    L1: float
    L2: float
    L3: float
    regime: str
    ratios: dict
    tau_L: float          # s
    gamma0: float         # rad/s


def classify_regime(Omega: float, kappa: float, gamma: float,
                    threshold: float = 10.0) -> RegimeDiagnosis:
    """Label the dynamics by which of 2 Omega, kappa, gamma dominates."""
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    two_omega = 2 * Omega

    def ratio(x, y):
        return math.inf if y == 0 else x / y

    ratios = {
        "2Omega/kappa": ratio(two_omega, kappa),
        "2Omega/gamma": ratio(two_omega, gamma),
        "kappa/gamma": ratio(kappa, gamma),
    }
    if two_omega >= threshold * max(kappa, gamma):
        regime = "strong_coupling"
    elif kappa >= threshold * max(two_omega, gamma):
        regime = "overdamped"
    elif gamma >= threshold * max(two_omega, kappa):
        regime = "free_decay"
    else:
        regime = "intermediate"
    return RegimeDiagnosis(regime=regime, ratios=ratios)


def critical_lengths(rates: RateReport, mode: GuidedModeSolution, R_mag: float,
                     at_antinode: bool = True, *, cos2: float | None = None,
                     gamma0: float = GAMMA0_CS_D2) -> tuple[float, float, float]:
    """(L1, L2, L3) in metres.

    ``cos2`` is the squared standing-wave factor at the atom; it defaults
    to 1 at an antinode and is required otherwise.  At a node L1 is
    ``inf`` and L2 is 0.
    """
    if not 0 < R_mag < 1:
        raise ValueError("critical lengths need 0 < |R| < 1")
    if cos2 is None:
        if not at_antinode:
            raise ValueError("give cos2 for an atom away from an antinode")
        cos2 = 1.0
    v = mode.v_g
    gg = rates.gamma_gyd * gamma0
    g = rates.gamma_total_free * gamma0
    lnR = abs(math.log(R_mag))
    L2 = 16 * v * gg * cos2 / g**2
    L1 = math.inf if cos2 == 0 else v * lnR**2 / (4 * gg * cos2)
    L3 = 2 * v * lnR / g
    return L1, L2, L3


def _standing_wave(x: float, m: int) -> float:
    """cos(x + m pi / 2), exact at the quarter turns."""
    x = math.fmod(x, 2 * math.pi)
    return (math.cos(x), -math.sin(x), -math.cos(x), math.sin(x))[m % 4]


def single_mode_params(mode: GuidedModeSolution, atom: AtomSpec, cavity: CavitySpec,
                       rates: RateReport, threshold: float = 10.0) -> SingleModeReport:
    """Detuning, damping and coupling of the cavity mode nearest the atomic line."""
    if cavity.R_mag == 0:
        raise ValueError("single-mode reduction needs |R| > 0")
    z = atom.z * 1e-9
    if abs(z) > cavity.L / 2:
        raise ValueError(f"atom at z={atom.z} nm lies outside the cavity")
    g0 = atom.gamma0_phys
    v = mode.v_g
    tau_L = cavity.L / v
    Phi0 = mode.beta * cavity.L + cavity.phi_R + (1 + atom.q) * math.pi
    m = int(round(Phi0 / math.pi))
    Delta = (m * math.pi - Phi0) / tau_L
    lnR = abs(math.log(cavity.R_mag))
    kappa = 2 * lnR / tau_L / g0
    beta_c = mode.beta + Delta / v
    cos_f = _standing_wave(beta_c * z, m)
    Omega = 2 * math.sqrt(rates.gamma_gyd / (tau_L * g0)) * abs(cos_f)
    gamma = rates.gamma_total_free
    Lambda = cmath.sqrt((kappa - gamma) ** 2 / 4 - Omega**2)
    L1, L2, L3 = critical_lengths(rates, mode, cavity.R_mag, cos2=cos_f**2, gamma0=g0)
    diag = classify_regime(Omega, kappa, gamma, threshold)
    return SingleModeReport(m_index=m, Delta=Delta, kappa=kappa, Omega=Omega, Lambda=Lambda,
                            gamma=gamma, finesse=math.pi / (2 * lnR), L1=L1, L2=L2, L3=L3,
                            regime=diag.regime, ratios=diag.ratios, tau_L=tau_L, gamma0=g0)


def resonant_solution(Omega: float, kappa: float, gamma: float, t):
    """Amplitude C_a(t) at exact cavity-atom resonance (t in 1/gamma0)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    Lam = cmath.sqrt((kappa - gamma) ** 2 / 4 - Omega**2)
    x = 0.5 * Lam * t
    small = np.abs(x) < 5e-7
    xs = np.where(small, 1.0, x)
    cosh = np.where(small, 1 + x * x / 2, np.cosh(xs))
    # sinh(Lam t/2) / Lam, with its series near Lam t = 0
    sinh_over = np.where(small, 0.5 * t * (1 + x * x / 6),
                         np.sinh(xs) / (Lam if Lam != 0 else 1.0))
    C = np.exp(-(kappa + gamma) * t / 4) * (cosh + 0.5 * (kappa - gamma) * sinh_over)
    return C[()] if C.ndim == 0 else C


def overdamped_impact(R_mag: float, beta0_z: float, m_index: int) -> tuple[float, float, float]:
    """(G0, G_max, G_min) of the single-mode overdamped limit."""
    if not 0 < R_mag < 1:
        raise ValueError("overdamped impact factor needs 0 < |R| < 1")
    lnR = abs(math.log(R_mag))
    c = _standing_wave(beta0_z, m_index)
    return 1 + 2 * c * c / lnR, 1 + 2 / lnR, 1.0


def compare_with_dde(report: SingleModeReport, trace: DecayTrace,
                     floor: float = 1e-8) -> dict:
    """Rabi period and pointwise agreement between the closed form and a DDE trace."""
    mismatch = report.regime in ("overdamped", "free_decay") or report.Omega == 0
    if mismatch:
        warnings.warn(f"configuration is {report.regime}; no Rabi oscillation expected",
                      RegimeMismatchWarning, stacklevel=2)
    C = resonant_solution(report.Omega, report.kappa, report.gamma, trace.times)
    pointwise = float(np.max(np.abs(np.abs(C) ** 2 - trace.population)))
    period_err = None
    if report.Omega > 0:
        osc = detect_oscillations(trace, floor=floor)
        if osc.period is not None:
            expected = 2 * math.pi / report.Omega
            period_err = abs(osc.period - expected) / expected
    return {"rabi_period_error": period_err, "pointwise_max_error": pointwise,
            "regime_mismatch": mismatch}


def bounds_agreement(R_mag: float) -> float:
    """Relative gap between the single-mode G_max and the exact cavity G_max."""
    exact = impact_bounds(R_mag)[1]
    return abs(overdamped_impact(R_mag, 0.0, 0)[1] - exact) / exact
