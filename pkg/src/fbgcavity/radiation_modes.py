"""Radiation modes of a step-index fiber, normalised to unit N.

The outside field is a sum over both Hankel kinds whose individual terms
grow like Y_m(qa) Y_m(qr) for high orders near the band edge, while the
sum stays small.  With H^(1,2)* = H^(2,1) for real arguments every
auxiliary splits into a J-part and a Y-part,

    X_j = X_J - i (-1)^(j+1) X_Y,

and the Hankel sum collapses to ``2i kappa (P_Y J_m(qr) - P_J Y_m(qr))``.
Y is carried with a log-scale (see :func:`specfun.scaled_bessel_table`)
that cancels against the normalisation, so orders well beyond the
turning point are evaluated without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fiber_modes import CONSTANTS, EVec, FiberSpec
from .specfun import scaled_bessel_table, scaled_j_table

C = CONSTANTS.c
EPS0 = CONSTANTS.eps0
MU0 = CONSTANTS.mu0

MIN_QA = 1e-6


class RadiationModeError(ValueError):
    pass


class BandError(RadiationModeError):
    """beta outside the open radiation band (-k n2, k n2)."""


class DegenerateModeError(RadiationModeError):
    """q a too small for a stable Hankel evaluation."""


class NormalizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadModeCoeffs:
    """Coefficients of one radiation mode with A > 0 fixed by N = 1.

    ``V``, ``M``, ``L`` hold the j = 1, 2 boundary auxiliaries; for very
    high orders at tiny ``qa`` they may overflow to inf while the
    normalised ``C`` and ``D`` stay finite.
    """

    A: complex
    B: complex
    C1: complex
    C2: complex
    D1: complex
    D2: complex
    eta: float
    N: float
    V1: complex
    V2: complex
    M1: complex
    M2: complex
    L1c: complex
    L2c: complex
    omega: float
    beta: float
    m: int
    l: int


@dataclass
class _Parts:
    """Broadcast arrays for a batch of (m, beta) at fixed omega and l."""

    beta: np.ndarray
    h: np.ndarray
    q: np.ndarray
    m: np.ndarray
    sign: np.ndarray  # (-1)^m for negative m, from J_{-m} = (-1)^m J_m
    eta: np.ndarray
    # J- and Y-parts of P = A L + i mu0 c B V and Q = i eps0 c A V - B M with A = 1;
    # Y-parts carry exp(-E_a)
    PJ: np.ndarray
    PY: np.ndarray
    QJ: np.ndarray
    QY: np.ndarray
    kc: np.ndarray
    kd: np.ndarray
    N_scaled: np.ndarray  # N * exp(-2 E_a) for A = 1
    E_a: np.ndarray
    F_in: np.ndarray
    aux: dict  # scaled V, M, L J/Y parts


def _band_params(fiber: FiberSpec, k: float, beta):
    beta = np.asarray(beta, dtype=float)
    if np.any(np.abs(beta) >= k * fiber.n2):
        raise BandError("radiation modes need |beta| < k n2")
    h = np.sqrt(k**2 * fiber.n1**2 - beta**2)
    q = np.sqrt(k**2 * fiber.n2**2 - beta**2)
    if np.any(q * fiber.a_m <= MIN_QA):
        raise DegenerateModeError(f"q a <= {MIN_QA}: beta too close to the band edge")
    return beta, h, q


def _parts(fiber: FiberSpec, omega: float, beta, m, l: int) -> _Parts:
    """Boundary-matching quantities, broadcast over ``m[:, None]`` and ``beta``."""
    k = omega / C
    a, n1, n2 = fiber.a_m, fiber.n1, fiber.n2
    beta, h, q = _band_params(fiber, k, np.atleast_1d(beta))
    m = np.atleast_1d(np.asarray(m, dtype=int))[:, None]
    am = np.abs(m)
    sign = np.where((m < 0) & (am % 2 == 1), -1.0, 1.0)

    ha, qa = h * a, q * a
    tab = scaled_bessel_table(int(am.max()), qa)
    Ja, Jpa = tab.J[am[:, 0]], tab.Jp[am[:, 0]]
    Ya, Ypa = tab.Y[am[:, 0]], tab.Yp[am[:, 0]]
    E_a = tab.log_scale[am[:, 0]]
    # bring Y_m(qa) to order one so squared quantities cannot overflow
    s = np.log(np.maximum(np.abs(Ya), np.abs(Ypa)))
    Ya, Ypa, E_a = Ya * np.exp(-s), Ypa * np.exp(-s), E_a + s
    # core Bessel factors carry exp(F_in), which cancels on normalisation
    jt, jpt, F = scaled_j_table(int(am.max()), ha)
    J_in, Jp_in, F_in = jt[am[:, 0]], jpt[am[:, 0]], F[am[:, 0]]

    v = m * k * beta * (n2**2 - n1**2) * J_in / (a * h**2 * q**2)
    VJ, VY = v * Ja, v * Ya
    MJ = Jp_in / h * Ja - J_in / q * Jpa
    MY = Jp_in / h * Ya - J_in / q * Ypa
    LJ = n1**2 * Jp_in / h * Ja - n2**2 * J_in / q * Jpa
    LY = n1**2 * Jp_in / h * Ya - n2**2 * J_in / q * Ypa

    # magnitudes of the j = 1 auxiliaries at the common scale exp(E_a)
    shrink = np.exp(-E_a)
    V2s = (VJ * shrink) ** 2 + VY**2
    M2s = (MJ * shrink) ** 2 + MY**2
    L2s = (LJ * shrink) ** 2 + LY**2
    eta = EPS0 * C * np.sqrt((n2**2 * V2s + L2s) / (V2s + n2**2 * M2s))

    # A = 1, B = i l eta
    PJ = LJ - l * MU0 * C * eta * VJ
    PY = LY - l * MU0 * C * eta * VY
    QJ = 1j * (EPS0 * C * VJ - l * eta * MJ)
    QY = 1j * (EPS0 * C * VY - l * eta * MY)
    kc = 1j * np.pi * q**2 * a / (4 * n2**2)
    kd = 1j * np.pi * q**2 * a / 4
    # C_1 = -kc (P_J - i P_Y), D_1 = kd (Q_J - i Q_Y)
    C1s = -kc * (PJ * shrink - 1j * PY)
    D1s = kd * (QJ * shrink - 1j * QY)
    N_scaled = 8 * np.pi * omega / q**2 * (n2**2 * np.abs(C1s) ** 2
                                          + MU0 / EPS0 * np.abs(D1s) ** 2)
    aux = dict(VJ=VJ, VY=VY, MJ=MJ, MY=MY, LJ=LJ, LY=LY)
    return _Parts(beta=beta, h=h, q=q, m=m, sign=sign, eta=eta, PJ=PJ, PY=PY, QJ=QJ, QY=QY,
                  kc=kc, kd=kd, N_scaled=N_scaled, E_a=E_a, F_in=F_in, aux=aux)


def _fields(fiber: FiberSpec, omega: float, p: _Parts, l: int, r_m: float):
    """Normalised (N = 1) field components at a single radius ``r_m``."""
    a = fiber.a_m
    beta = p.beta
    m = p.m
    am = np.abs(m)
    inv_sqrt_N = 1.0 / np.sqrt(p.N_scaled)
    wmu = omega * MU0
    if r_m < a:
        x = p.h * r_m
        jt, jpt, F = scaled_j_table(int(am.max()), x)
        Jr, Jpr = jt[am[:, 0]], jpt[am[:, 0]]
        with np.errstate(over="ignore", invalid="ignore"):
            rel = np.where(Jr == 0, 0.0, np.exp(F[am[:, 0]] - p.F_in))
        Jr, Jpr = Jr * rel, Jpr * rel
        # J_m(x) / r; on the axis only |m| = 1 survives, where the limit is h / 2
        J_over_r = np.where(x > 0, Jr * p.h / np.where(x > 0, x, 1.0),
                            np.where(am == 1, p.h / 2, 0.0))
        A = np.exp(-p.E_a) * inv_sqrt_N
        B = 1j * l * p.eta * A
        e_z = A * Jr
        e_r = 1j / p.h**2 * (beta * p.h * A * Jpr + 1j * m * wmu * B * J_over_r)
        e_phi = 1j / p.h**2 * (1j * m * beta * A * J_over_r - p.h * wmu * B * Jpr)
    else:
        x = p.q * r_m
        tab = scaled_bessel_table(int(am.max()), x)
        Jr, Jpr = tab.J[am[:, 0]], tab.Jp[am[:, 0]]
        growth = np.exp(tab.log_scale[am[:, 0]] - p.E_a)
        Yr, Ypr = tab.Y[am[:, 0]] * growth, tab.Yp[am[:, 0]] * growth
        ZC = 2j * p.kc * (p.PY * Jr - p.PJ * Yr) * inv_sqrt_N
        ZCp = 2j * p.kc * (p.PY * Jpr - p.PJ * Ypr) * inv_sqrt_N
        ZD = -2j * p.kd * (p.QY * Jr - p.QJ * Yr) * inv_sqrt_N
        ZDp = -2j * p.kd * (p.QY * Jpr - p.QJ * Ypr) * inv_sqrt_N
        e_z = ZC
        e_r = 1j / p.q**2 * (beta * p.q * ZCp + 1j * m * wmu / r_m * ZD)
        e_phi = 1j / p.q**2 * (1j * m * beta / r_m * ZC - p.q * wmu * ZDp)
    return p.sign * e_r, p.sign * e_phi, p.sign * e_z


def rad_coeffs(fiber: FiberSpec, omega: float, beta: float, m: int, l: int) -> RadModeCoeffs:
    """Coefficients of radiation mode (omega, beta, m, l), normalised to N = 1."""
    if l not in (1, -1):
        raise ValueError("l must be +1 or -1")
    p = _parts(fiber, omega, beta, [m], l)
    shrink = np.exp(-p.E_a)
    norm = 1.0 / np.sqrt(p.N_scaled)  # multiplies quantities carrying exp(-E_a)
    with np.errstate(over="ignore"):
        A = float((shrink * norm * np.exp(-p.F_in))[0, 0])
    B = 1j * l * float(p.eta[0, 0]) * A
    PJ, PY = p.PJ * shrink * norm, p.PY * norm
    QJ, QY = p.QJ * shrink * norm, p.QY * norm
    C1 = -p.kc * (PJ - 1j * PY)
    C2 = p.kc * (PJ + 1j * PY)
    D1 = p.kd * (QJ - 1j * QY)
    D2 = -p.kd * (QJ + 1j * QY)
    q = p.q[0]
    N1 = 8 * np.pi * omega / q**2 * (fiber.n2**2 * abs(C1[0, 0]) ** 2
                                     + MU0 / EPS0 * abs(D1[0, 0]) ** 2)
    N2 = 8 * np.pi * omega / q**2 * (fiber.n2**2 * abs(C2[0, 0]) ** 2
                                     + MU0 / EPS0 * abs(D2[0, 0]) ** 2)
    if not math.isclose(N1, N2, rel_tol=1e-9):
        raise NormalizationError(f"j=1 and j=2 normalisations disagree: {N1} vs {N2}")
    grow = np.exp(p.E_a[0, 0])
    with np.errstate(over="ignore", under="ignore"):
        ax = {key: val[0, 0] * np.exp(p.F_in[0, 0]) for key, val in p.aux.items()}
        V1 = ax["VJ"] - 1j * ax["VY"] * grow
        M1 = ax["MJ"] - 1j * ax["MY"] * grow
        L1 = ax["LJ"] - 1j * ax["LY"] * grow
    return RadModeCoeffs(
        A=A, B=B, C1=complex(C1[0, 0]), C2=complex(C2[0, 0]),
        D1=complex(D1[0, 0]), D2=complex(D2[0, 0]), eta=float(p.eta[0, 0]),
        N=float(N1), V1=complex(V1), V2=complex(np.conj(V1)), M1=complex(M1),
        M2=complex(np.conj(M1)), L1c=complex(L1), L2c=complex(np.conj(L1)),
        omega=omega, beta=float(beta), m=int(m), l=int(l))


def radiation_profile(fiber: FiberSpec, coeffs: RadModeCoeffs, omega: float, beta: float,
                      m: int, r_nm: float) -> EVec:
    """Normalised profile of the radiation mode described by ``coeffs`` at ``r_nm``."""
    if (coeffs.m, coeffs.beta, coeffs.omega) != (m, beta, omega):
        raise ValueError("coefficients were built for a different (omega, beta, m)")
    if r_nm < 0:
        raise ValueError("radius must be non-negative")
    e_r, e_phi, e_z = mode_fields(fiber, omega, np.array([beta]), [m], coeffs.l, r_nm)
    return EVec(complex(e_r[0, 0]), complex(e_phi[0, 0]), complex(e_z[0, 0]))


def mode_fields(fiber: FiberSpec, omega: float, beta, m, l: int, r_nm: float):
    """Unit-normalised fields, shape ``(len(m), len(beta))``, at radius ``r_nm``.

    ``r == a`` is evaluated on the vacuum side.
    """
    p = _parts(fiber, omega, beta, m, l)
    return _fields(fiber, omega, p, l, r_nm * 1e-9)
