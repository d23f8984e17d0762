"""Cavity-free spontaneous-emission rates near the nanofiber.

All rates are in units of the free-space rate gamma0, so the dipole
magnitude never appears.  Multiply by ``AtomSpec.gamma0_phys`` for rad/s.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .fiber_modes import (C_LIGHT, FiberSpec, GuidedModeSolution, guided_profile,
                          solve_fundamental, wavenumber)
from .radiation_modes import mode_fields

# cesium D2 natural linewidth, 2 pi x 5.2 MHz
GAMMA0_CS_D2 = 2 * math.pi * 5.2e6

BAND_EDGE = 1e-9


class RateConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom with a single spherical dipole component ``q``.

    ``r`` and ``z`` are in nm, ``z`` measured from the cavity centre.
    ``gamma0_phys`` (rad/s) is only used to convert to absolute units.
    """

    r: float = 200.0
    phi: float = 0.0
    z: float = 0.0
    q: int = 1
    lambda0: float = 852.0
    gamma0_phys: float = GAMMA0_CS_D2

    def __post_init__(self):
        if self.q not in (-1, 0, 1):
            raise ValueError(f"dipole index q must be -1, 0 or 1, got {self.q}")
        if not self.r >= 0:
            raise ValueError(f"radial position must be non-negative, got {self.r}")
        if not self.lambda0 > 0:
            raise ValueError("transition wavelength must be positive")
        if not self.gamma0_phys > 0:
            raise ValueError("gamma0_phys must be positive")

    @property
    def k0(self) -> float:
        return wavenumber(self.lambda0)

    @property
    def omega0(self) -> float:
        return self.k0 * C_LIGHT


@dataclass(frozen=True)
class RateReport:
    gamma_gyd: float
    gamma_rad: float
    gamma_total_free: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma_total_free", self.gamma_gyd + self.gamma_rad)


def guided_spherical_magnitudes(mode: GuidedModeSolution, fiber: FiberSpec, r_nm: float):
    """|e_0|, |e_+1|, |e_-1| of the (+, +) guided mode at radius ``r_nm``."""
    e = guided_profile(mode, fiber, 1, 1, r_nm)
    er, ep = abs(e.e_r), abs(e.e_phi)
    return abs(e.e_z), (er - ep) / math.sqrt(2), (er + ep) / math.sqrt(2)


def gamma_guided(fiber: FiberSpec, mode: GuidedModeSolution, atom: AtomSpec) -> float:
    """Rate of emission into the guided modes, no mirrors."""
    e0, e_plus, e_minus = guided_spherical_magnitudes(mode, fiber, atom.r)
    comps = {0: e0, 1: e_plus, -1: e_minus}
    s = comps[-atom.q] ** 2 + comps[atom.q] ** 2
    w0 = atom.omega0
    return float(3 * math.pi * C_LIGHT**3 / (w0**2 * mode.v_g) * s)


def _spherical(e_r, e_phi, e_z, q: int):
    # atom at phi = 0, so (e_x, e_y) = (e_r, e_phi)
    if q == 0:
        return e_z
    return -q * (e_r + 1j * q * e_phi) / math.sqrt(2)


def radiation_integrand(fiber: FiberSpec, atom: AtomSpec, beta, m_values, l: int | None = None):
    """|e_q|^2 of unit-normalised radiation modes, shape ``(len(m), len(beta))``.

    Summed over both polarisations unless ``l`` is given.
    """
    w0 = atom.omega0
    ls = (1, -1) if l is None else (l,)
    out = 0.0
    for pol in ls:
        er, ep, ez = mode_fields(fiber, w0, beta, m_values, pol, atom.r)
        out = out + np.abs(_spherical(er, ep, ez, atom.q)) ** 2
    return out


def _shell_integrals(fiber, atom, m_max, rtol, n_nodes):
    k0 = atom.k0
    ms = np.arange(-m_max, m_max + 1)

    # beta = k0 (1 - u^2) tames the logarithmic behaviour at the band edge
    def f(u):
        return radiation_integrand(fiber, atom, k0 * (1 - u * u), ms) * (2 * k0 * u)

    # integrand summed over l is even in beta
    per_m = 2 * quadrature.integrate(f, math.sqrt(BAND_EDGE), 1.0, rtol=rtol, n=n_nodes,
                                     max_panels=256)
    shells = per_m[m_max:].copy()
    shells[1:] += per_m[:m_max][::-1]
    return shells


def gamma_rad(fiber: FiberSpec, atom: AtomSpec, *, rtol: float = 1e-6,
              shell_tol: float = 1e-8, n_nodes: int = 64) -> float:
    """Rate of emission into radiation modes, no mirrors.

    Shells |m| = 0, 1, ... are accumulated until two consecutive shells
    each add less than ``shell_tol`` of the running sum.
    """
    if atom.r < fiber.a:
        raise ValueError("atom must sit on or outside the fiber surface")
    prefactor = 3 * math.pi * C_LIGHT**3 / (2 * atom.omega0**2)
    m_max = int(math.ceil(atom.k0 * atom.r * 1e-9)) + 16
    for _ in range(6):
        shells = _shell_integrals(fiber, atom, m_max, rtol, n_nodes)
        total = 0.0
        small = 0
        for s in shells:
            total += s
            small = small + 1 if s < shell_tol * total else 0
            if small == 2:
                return float(prefactor * total)
        m_max *= 2
    raise RateConvergenceError(f"m-sum did not converge up to |m| = {m_max}")


def rates(fiber: FiberSpec, atom: AtomSpec, mode: GuidedModeSolution | None = None) -> RateReport:
    if mode is None:
        mode = solve_fundamental(fiber, atom.lambda0)
    return RateReport(gamma_gyd=gamma_guided(fiber, mode, atom),
                      gamma_rad=gamma_rad(fiber, atom))


def gamma_nonrad_ratio(atom: AtomSpec, fiber: FiberSpec, eps_real: float,
                       eps_imag: float) -> float:
    """Near-surface nonradiative rate over gamma0 for a lossy dielectric.

    Returns ``inf`` (with a warning) for an atom on the surface.
    """
    d = (atom.r - fiber.a) * 1e-9
    if d < 0:
        raise ValueError("atom must be outside the fiber")
    if eps_imag == 0:
        return 0.0
    if d == 0:
        warnings.warn("atom on the surface: nonradiative ratio diverges", RuntimeWarning,
                      stacklevel=2)
        return math.inf
    eps = complex(eps_real, eps_imag)
    return eps_imag / (2 * abs(eps + 1) ** 2 * atom.k0**3 * d**3)


def nonrad_threshold_distance(lambda0_nm: float, eps_real: float, eps_imag: float) -> float:
    """Atom-surface distance (m) at which the nonradiative ratio equals one."""
    k0 = wavenumber(lambda0_nm)
    eps = complex(eps_real, eps_imag)
    return (eps_imag / (2 * abs(eps + 1) ** 2 * k0**3)) ** (1 / 3)
