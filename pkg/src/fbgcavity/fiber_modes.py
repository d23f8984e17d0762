"""Fundamental (HE11) guided mode of a step-index nanofiber.

Geometry is given in nanometres; everything returned is SI (rad/m,
m/s, 1/m for profile amplitudes) except the effective area, which is
reported in square micrometres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as sc
from scipy.special import jv, jvp, kv, kvp

from . import quadrature


@dataclass(frozen=True)
class Constants:
    c: float = sc.c
    eps0: float = sc.epsilon_0
    hbar: float = sc.hbar

    @property
    def mu0(self) -> float:
        # fixed by c and eps0 so that c^2 eps0 mu0 == 1 to rounding
        return 1.0 / (self.eps0 * self.c**2)


CONSTANTS = Constants()
C_LIGHT = CONSTANTS.c


class ModeSolverError(RuntimeError):
    """Base class for guided-mode solver failures."""


class NoRootError(ModeSolverError):
    pass


class ConvergenceError(ModeSolverError):
    pass


@dataclass(frozen=True)
class FiberSpec:
    """Step-index fiber: core radius ``a`` (nm), core and clad indices."""

    a: float = 200.0
    n1: float = 1.45
    n2: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"fiber radius a must be positive, got {self.a}")
        if not self.n2 >= 1.0:
            raise ValueError(f"clad index n2 must be >= 1, got {self.n2}")
        if not self.n1 > self.n2:
            raise ValueError(
                f"core index n1 ({self.n1}) must exceed clad index n2 ({self.n2})")

    @property
    def a_m(self) -> float:
        return self.a * 1e-9

    def n_at(self, r_nm):
        return np.where(np.asarray(r_nm) < self.a, self.n1, self.n2)


@dataclass(frozen=True)
class EVec:
    """Cylindrical components of a mode profile function."""

    e_r: complex | np.ndarray
    e_phi: complex | np.ndarray
    e_z: complex | np.ndarray

    def norm2(self):
        return abs(self.e_r) ** 2 + abs(self.e_phi) ** 2 + abs(self.e_z) ** 2


@dataclass(frozen=True)
class GuidedModeSolution:
    omega: float
    beta: float
    h: float
    q_out: float
    s: float
    norm_C: float | None = None
    v_g: float | None = None

    @property
    def k(self) -> float:
        return self.omega / C_LIGHT

    @property
    def wavelength_nm(self) -> float:
        return 2 * math.pi / self.k * 1e9

    @property
    def n_eff(self) -> float:
        return self.beta / self.k


def wavenumber(wavelength_nm: float) -> float:
    return 2 * math.pi / (wavelength_nm * 1e-9)


def eigen_residual(fiber: FiberSpec, k: float, beta):
    """Left minus right side of the HE11 eigenvalue equation (dimensionless)."""
    a, n1, n2 = fiber.a_m, fiber.n1, fiber.n2
    beta = np.asarray(beta, dtype=float)
    ha = np.sqrt(n1**2 * k**2 - beta**2) * a
    qa = np.sqrt(beta**2 - n2**2 * k**2) * a
    kr = kvp(1, qa) / (qa * kv(1, qa))
    lhs = jv(0, ha) / (ha * jv(1, ha))
    root = np.sqrt(((n1**2 - n2**2) / (2 * n1**2) * kr) ** 2
                   + beta**2 / (n1**2 * k**2) * (1 / qa**2 + 1 / ha**2) ** 2)
    rhs = -(n1**2 + n2**2) / (2 * n1**2) * kr + 1 / ha**2 - root
    return lhs - rhs


def _bisect(f, lo, hi, f_lo, width_tol, max_iter=200):
    for _ in range(max_iter):
        if hi - lo <= width_tol:
            return lo, hi
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # interval at machine resolution
            return lo, hi
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid, mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    raise ConvergenceError(f"bisection exceeded {max_iter} iterations")


def solve_beta(fiber: FiberSpec, k: float, n_scan: int = 512) -> float:
    """Propagation constant of HE11 at wavenumber ``k`` (rad/m)."""
    n1, n2 = fiber.n1, fiber.n2
    grid = np.linspace(n2 * k * (1 + 1e-9), n1 * k * (1 - 1e-9), n_scan)
    with np.errstate(all="ignore"):
        vals = eigen_residual(fiber, k, grid)
    ok = np.isfinite(vals)
    flips = np.nonzero(ok[:-1] & ok[1:] & (np.sign(vals[:-1]) != np.sign(vals[1:])))[0]

    def f(b):
        return float(eigen_residual(fiber, k, b))

    # HE11 is the root nearest n1 k; poles of J0/J1 also flip sign, skip them
    for i in flips[::-1]:
        # run on to machine resolution; near cutoff the residual is steep in beta
        lo, hi = _bisect(f, grid[i], grid[i + 1], vals[i], 0.0)
        beta = lo if abs(f(lo)) <= abs(f(hi)) else hi
        if abs(f(beta)) < 1e-8:
            return float(beta)
    raise NoRootError(
        f"no HE11 root for a={fiber.a} nm, n1={n1}, n2={n2}, k={k:.6g} 1/m")


def _amplitudes(fiber: FiberSpec, beta, h, q, s, r_m):
    """Real profile amplitudes (e_r/iC, -e_phi/(lC), e_z/(fC)) at radius r (m)."""
    a = fiber.a_m
    r = np.asarray(r_m, dtype=float)
    inside = r < a
    out = ~inside
    er = np.empty_like(r)
    ep = np.empty_like(r)
    ez = np.empty_like(r)
    ri = r[inside]
    pref = q * kv(1, q * a) / (h * jv(1, h * a))
    j0, j1, j2 = jv(0, h * ri), jv(1, h * ri), jv(2, h * ri)
    er[inside] = pref * ((1 - s) * j0 - (1 + s) * j2)
    ep[inside] = pref * ((1 - s) * j0 + (1 + s) * j2)
    ez[inside] = 2 * q * kv(1, q * a) / (beta * jv(1, h * a)) * j1
    ro = r[out]
    k0, k1, k2 = kv(0, q * ro), kv(1, q * ro), kv(2, q * ro)
    er[out] = (1 - s) * k0 + (1 + s) * k2
    ep[out] = (1 - s) * k0 - (1 + s) * k2
    ez[out] = 2 * q / beta * k1
    return er, ep, ez


def _outer_cutoff(fiber: FiberSpec, q: float) -> float:
    return fiber.a_m + 12.0 / q


def _radial_integral(fiber, g, r_max_m, rtol=1e-10):
    """Integral of g(r) * 2 pi r dr over the core and over [a, r_max]."""
    a = fiber.a_m
    inner = quadrature.integrate(lambda r: g(r) * 2 * np.pi * r, 0.0, a, rtol=rtol)
    outer = quadrature.integrate(lambda r: g(r) * 2 * np.pi * r, a, r_max_m, rtol=rtol)
    return inner, outer


def _normalization(fiber, beta, h, q, s):
    def dens(r):
        er, ep, ez = _amplitudes(fiber, beta, h, q, s, r)
        return er**2 + ep**2 + ez**2

    inner, outer = _radial_integral(fiber, dens, _outer_cutoff(fiber, q))
    total = fiber.n1**2 * inner + fiber.n2**2 * outer
    return 1.0 / math.sqrt(total)


def group_velocity(fiber: FiberSpec, wavelength_nm: float, rel_step: float = 1e-6) -> float:
    """Group velocity d(omega)/d(beta) by a centred difference in frequency."""
    k = wavenumber(wavelength_nm)
    b_plus = solve_beta(fiber, k * (1 + rel_step))
    b_minus = solve_beta(fiber, k * (1 - rel_step))
    omega = k * C_LIGHT
    return float(2 * omega * rel_step / (b_plus - b_minus))


def solve_fundamental(fiber: FiberSpec, wavelength_nm: float) -> GuidedModeSolution:
    """Solve HE11 at the given vacuum wavelength and normalise its profile."""
    k = wavenumber(wavelength_nm)
    beta = solve_beta(fiber, k)
    a = fiber.a_m
    h = math.sqrt(fiber.n1**2 * k**2 - beta**2)
    q = math.sqrt(beta**2 - fiber.n2**2 * k**2)
    ha, qa = h * a, q * a
    s = (1 / qa**2 + 1 / ha**2) / (jvp(1, ha) / (ha * jv(1, ha))
                                   + kvp(1, qa) / (qa * kv(1, qa)))
    norm_C = _normalization(fiber, beta, h, q, s)
    v_g = group_velocity(fiber, wavelength_nm)
    return GuidedModeSolution(omega=k * C_LIGHT, beta=beta, h=h, q_out=q, s=float(s),
                              norm_C=norm_C, v_g=v_g)


def guided_profile(mode: GuidedModeSolution, fiber: FiberSpec, f: int, l: int, r_nm) -> EVec:
    """Profile components of mode (f, l) at radius ``r_nm``.

    ``r == a`` is evaluated on the vacuum side.
    """
    if mode.norm_C is None:
        raise ModeSolverError("mode has no normalisation constant; use solve_fundamental")
    if f not in (1, -1) or l not in (1, -1):
        raise ValueError("f and l must be +1 or -1")
    r = np.asarray(r_nm, dtype=float)
    if np.any(r < 0):
        raise ValueError("radius must be non-negative")
    er, ep, ez = _amplitudes(fiber, mode.beta, mode.h, mode.q_out, mode.s,
                             np.atleast_1d(r) * 1e-9)
    C = mode.norm_C
    vec = EVec(e_r=1j * C * er, e_phi=-l * C * ep + 0j, e_z=f * C * ez + 0j)
    if r.ndim == 0:
        return EVec(vec.e_r[0], vec.e_phi[0], vec.e_z[0])
    return vec


def normalization_integral(mode: GuidedModeSolution, fiber: FiberSpec,
                           r_max_nm: float | None = None) -> float:
    """Integral of n^2 |e|^2 over the cross-section, 1 for a normalised mode."""
    r_max = _outer_cutoff(fiber, mode.q_out) if r_max_nm is None else r_max_nm * 1e-9

    def dens(r):
        return guided_profile(mode, fiber, 1, 1, r * 1e9).norm2()

    inner, outer = _radial_integral(fiber, dens, r_max)
    return fiber.n1**2 * inner + fiber.n2**2 * outer


def effective_area(mode: GuidedModeSolution, fiber: FiberSpec,
                   r_max_nm: float | None = None) -> tuple[float, float]:
    """Effective mode area (um^2) and equivalent radius (nm)."""
    r_max = _outer_cutoff(fiber, mode.q_out) if r_max_nm is None else r_max_nm * 1e-9
    if r_max <= fiber.a_m:
        raise ValueError("radial cutoff must lie outside the core")

    def dens(r):
        e2 = guided_profile(mode, fiber, 1, 1, r * 1e9).norm2()
        return np.vstack([e2, e2**2])

    inner, outer = _radial_integral(fiber, dens, r_max)
    I2_est, I4_est = inner + outer
    tail = dens(np.array([r_max]))[:, 0] * 2 * np.pi * r_max / (2 * mode.q_out)
    if tail[0] > 1e-4 * I2_est or tail[1] > 1e-4 * I4_est:
        raise quadrature.QuadratureError(
            f"evanescent tail not converged at r_max={r_max * 1e9:.1f} nm")
    I2 = inner[0] + outer[0]
    I4 = inner[1] + outer[1]
    area = float(I2**2 / I4)
    return area * 1e12, math.sqrt(area / math.pi) * 1e9
