"""Time evolution of the excited-state amplitude inside the cavity.

The amplitude obeys a delay-differential equation in which every mirror
echo of the emitted guided field returns after a fixed delay.  Time is
measured in units of 1/gamma0 throughout; delays are supplied in seconds
and converted with ``gamma0``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import find_peaks

from .cavity_response import CavitySpec, phase_per_crossing
from .emission_rates import GAMMA0_CS_D2, AtomSpec, RateReport
from .fiber_modes import GuidedModeSolution

WEIGHT_CUTOFF = 1e-15
# delays closer than this (relative to h) to a grid point count as on it
_GRID_TOL = 1e-9
DEFAULT_ALPHA_PER_CM = 1e-5


class DecayError(RuntimeError):
    pass


class StepSizeError(DecayError):
    pass


class OffCenterError(ValueError):
    pass


class FitWindowError(ValueError):
    pass


@dataclass(frozen=True)
class DelayParams:
    """Inputs of the delay equation.

    Rates are in units of gamma0, delays in seconds.  ``Phi0`` and
    ``beta0_z`` become complex when fiber absorption is included.
    """

    gamma_gyd: float
    gamma_rad: float
    tau_L: float
    tau_plus: float
    tau_minus: float
    Phi0: complex
    beta0_z: complex
    R_mag: float
    gamma0: float = GAMMA0_CS_D2

    def __post_init__(self):
        if not 0.0 <= self.R_mag < 1.0:
            raise ValueError(f"mirror |R| must lie in [0, 1), got {self.R_mag}")
        if self.gamma_gyd < 0 or self.gamma_rad < 0:
            raise ValueError("decay rates must be non-negative")
        if not self.tau_L > 0:
            raise ValueError("crossing time tau_L must be positive")
        if self.tau_plus < 0 or self.tau_minus < 0:
            raise ValueError("atom must sit inside the cavity (|z| <= L/2)")
        if abs(self.tau_plus + self.tau_minus - 2 * self.tau_L) > 1e-12 * self.tau_L:
            raise ValueError("tau_plus + tau_minus must equal 2 tau_L")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")

    @property
    def gamma(self) -> float:
        return self.gamma_gyd + self.gamma_rad

    def scaled(self) -> tuple[float, float, float]:
        """(tau_L, tau_plus, tau_minus) in units of 1/gamma0."""
        g = self.gamma0
        return self.tau_L * g, self.tau_plus * g, self.tau_minus * g


@dataclass(frozen=True)
class DecayTrace:
    times: np.ndarray
    amplitude: np.ndarray
    population: np.ndarray


@dataclass(frozen=True)
class OscillationReport:
    count: int
    first_min_time: float | None
    period: float | None


def delay_params(mode: GuidedModeSolution, free: RateReport, atom: AtomSpec,
                 cavity: CavitySpec) -> DelayParams:
    """Assemble delay-equation inputs from a solved mode and cavity-free rates."""
    z = atom.z * 1e-9
    if abs(z) > cavity.L / 2:
        raise ValueError(f"atom at z={atom.z} nm lies outside the cavity")
    v = mode.v_g
    Phi0 = phase_per_crossing(mode, cavity, atom.q)
    # only Phi0 mod 2 pi matters; reducing it keeps exp(i n Phi0) accurate
    Phi0 = complex(math.fmod(Phi0.real, 2 * math.pi), complex(Phi0).imag)
    bz = complex(mode.beta * z, 0.5 * cavity.alpha_per_m * z)
    if Phi0.imag == 0 and bz.imag == 0:
        Phi0, bz = Phi0.real, bz.real
    tau_L = cavity.L / v
    return DelayParams(gamma_gyd=free.gamma_gyd, gamma_rad=free.gamma_rad, tau_L=tau_L,
                       tau_plus=(cavity.L + 2 * z) / v, tau_minus=2 * tau_L - (cavity.L + 2 * z) / v,
                       Phi0=Phi0, beta0_z=bz, R_mag=cavity.R_mag, gamma0=atom.gamma0_phys)


def _delay_terms(p: DelayParams, t_max: float):
    """Sorted delays (1/gamma0 units) and their complex weights.

    Zero delays are folded into an instantaneous coefficient.
    """
    tL, tp, tm = p.scaled()
    R, gg = p.R_mag, p.gamma_gyd
    e_plus = cmath.exp(2j * p.beta0_z)
    e_minus = cmath.exp(-2j * p.beta0_z)
    delays, weights = [], []
    local = -0.5 * p.gamma
    n = 0
    while R > 0:
        base = 2 * n * tL
        if base > t_max:
            break
        if n >= 1 and R ** (2 * n) >= WEIGHT_CUTOFF:
            delays.append(base)
            weights.append(-gg * R ** (2 * n) * cmath.exp(2j * n * p.Phi0))
        w_odd = -0.5 * gg * R ** (2 * n + 1) * cmath.exp(1j * (2 * n + 1) * p.Phi0)
        if R ** (2 * n + 1) < WEIGHT_CUTOFF:
            break
        for tau, ph in ((tp, e_plus), (tm, e_minus)):
            d = base + tau
            if d <= t_max:
                if d == 0.0:
                    local += w_odd * ph
                else:
                    delays.append(d)
                    weights.append(w_odd * ph)
        n += 1
    order = np.argsort(delays, kind="stable")
    return (np.asarray(delays, dtype=float)[order],
            np.asarray(weights, dtype=complex)[order], local)


def _exponential_trace(gamma: float, times: np.ndarray) -> DecayTrace:
    amp = np.exp(-0.5 * gamma * times).astype(complex)
    return DecayTrace(times=times, amplitude=amp, population=np.abs(amp) ** 2)


def default_step(p: DelayParams) -> float:
    tL, tp, tm = p.scaled()
    positive = [t for t in (tL, tp, tm) if t > 0]
    R = p.R_mag
    Gamma_est = p.gamma + p.gamma_gyd * (1 + R) / (1 - R)
    h = min(min(positive) / 8, 0.002 / max(p.gamma, Gamma_est))
    # align the grid with multiples of tau_L
    return tL / math.ceil(tL / h)


def simulate_decay(params: DelayParams, t_max: float, h: float | None = None) -> DecayTrace:
    """Integrate the delay equation from C_a(0) = 1 up to ``t_max`` (1/gamma0 units).

    Classical RK4 on a fixed grid; delayed values between grid points come
    from cubic Hermite interpolation of the stored solution and its one-sided
    derivatives, so kinks at echo arrival times stay on grid nodes when the
    delays are commensurate with ``h``.
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    p = params
    tL, tp, tm = p.scaled()
    tau_min = min(t for t in (tL, tp, tm) if t > 0)
    if h is None:
        h = default_step(p)
    elif not h > 0:
        raise ValueError("step h must be positive")

    if p.R_mag == 0 or t_max < tau_min and min(tp, tm) > 0:
        n = max(int(math.ceil(t_max / h)), 1)
        return _exponential_trace(p.gamma, np.linspace(0.0, n * h, n + 1))

    if h > tau_min / 4:
        raise StepSizeError(f"step {h:.3g} exceeds a quarter of the shortest delay {tau_min:.3g}")

    D, W, local = _delay_terms(p, t_max + h)
    n_steps = int(math.ceil(t_max / h - 1e-9))
    y = np.zeros(n_steps + 1, dtype=complex)
    d_right = np.zeros_like(y)
    d_left = np.zeros_like(y)
    y[0] = 1.0
    tol = _GRID_TOL * h

    def history(s):
        # s sorted-independent array of past times, all <= current grid time
        x = s / h
        k = np.floor(x).astype(int)
        theta = x - k
        k1 = np.minimum(k + 1, n_steps)
        t2, t3 = theta * theta, theta * theta * theta
        return ((2 * t3 - 3 * t2 + 1) * y[k] + (t3 - 2 * t2 + theta) * h * d_right[k]
                + (-2 * t3 + 3 * t2) * y[k1] + (t3 - t2) * h * d_left[k1])

    def rhs(t, c, n_active):
        if n_active == 0:
            return local * c
        s = np.maximum(t - D[:n_active], 0.0)
        return local * c + W[:n_active] @ history(s)

    def active(t_n, t_stage):
        # Theta(0) = 1: an echo arriving exactly at t_n is live for the whole step
        return max(int(np.searchsorted(D, t_n + tol, side="right")),
                   int(np.searchsorted(D, t_stage - tol, side="left")))

    k1 = rhs(0.0, 1.0, active(0.0, 0.0))
    for n in range(n_steps):
        t = n * h
        d_right[n] = k1
        c = y[n]
        n_mid = active(t, t + 0.5 * h)
        n_end = active(t, t + h)
        k2 = rhs(t + 0.5 * h, c + 0.5 * h * k1, n_mid)
        k3 = rhs(t + 0.5 * h, c + 0.5 * h * k2, n_mid)
        k4 = rhs(t + h, c + h * k3, n_end)
        y[n + 1] = c + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t_next = (n + 1) * h
        n_left = int(np.searchsorted(D, t_next - tol, side="left"))
        n_right = active(t_next, t_next)
        if n_left == n_right:
            k1 = rhs(t_next, y[n + 1], n_right)
            d_left[n + 1] = k1
        else:
            d_left[n + 1] = rhs(t_next, y[n + 1], n_left)
            k1 = rhs(t_next, y[n + 1], n_right)
    d_right[n_steps] = k1
    times = np.arange(n_steps + 1) * h
    return DecayTrace(times=times, amplitude=y, population=np.abs(y) ** 2)


def _partitions(n: int, largest: int):
    """Yield partitions of ``n`` into parts <= ``largest`` as part lists."""
    if n == 0:
        yield []
        return
    for part in range(min(n, largest), 0, -1):
        for rest in _partitions(n - part, part):
            yield [part] + rest


@lru_cache(maxsize=None)
def partition_weights(n: int) -> tuple[float, ...]:
    """c[p] = sum over partitions of ``n`` with p parts of 1/prod(k_i!).

    k_i is the multiplicity of part i.  Index 0 is the empty partition.
    """
    c = [0.0] * (n + 1)
    for parts in _partitions(n, n):
        denom = 1
        for i in set(parts):
            denom *= math.factorial(parts.count(i))
        c[len(parts)] += 1.0 / denom
    return tuple(c)


def analytic_center_solution(params: DelayParams, t) -> np.ndarray | complex:
    """Closed-form amplitude for an atom at the cavity centre.

    Sum over echo orders n <= t/tau_L with an integer-partition inner sum.
    """
    p = params
    tL, tp, tm = p.scaled()
    if abs(tp - tm) > 1e-12 * tL:
        raise OffCenterError("closed form requires the atom at the cavity centre")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0):
        raise ValueError("time must be non-negative")
    g, gg, R = p.gamma, p.gamma_gyd, p.R_mag
    out = np.zeros(t_arr.shape, dtype=complex)
    n_max = int(np.floor(t_arr.max() / tL + 1e-12)) if R > 0 else 0
    for n in range(n_max + 1):
        s = t_arr - n * tL
        live = s >= -1e-12 * tL
        if not np.any(live):
            break
        s = np.where(live, np.maximum(s, 0.0), 0.0)
        c = partition_weights(n)
        x = -gg * s
        inner = np.zeros_like(s)
        for pw in range(len(c) - 1, -1, -1):
            inner = inner * x + c[pw]
        term = R**n * np.exp(1j * n * p.Phi0) * np.exp(-0.5 * g * s) * inner
        out += np.where(live, term, 0.0)
        bound = R**n * np.exp(-0.5 * g * s.min()) * np.max(np.abs(inner))
        if n > 0 and bound < 1e-14 and R**n < 1e-14:
            break
    return out[0] if np.ndim(t) == 0 else out


def fit_decay_rate(trace: DecayTrace, window: tuple[float, float]) -> float:
    """Negated least-squares slope of ln P over ``window`` (gamma0 units)."""
    t1, t2 = window
    times = trace.times
    if not (t1 < t2 and t1 >= times[0] - 1e-12 and t2 <= times[-1] + 1e-12):
        raise FitWindowError(f"window [{t1}, {t2}] outside trace span "
                             f"[{times[0]}, {times[-1]}]")
    sel = (times >= t1) & (times <= t2)
    if sel.sum() < 2:
        raise FitWindowError("fit window contains fewer than two samples")
    P = trace.population[sel]
    if np.any(P <= 0):
        raise FitWindowError("population must be positive on the fit window")
    slope = np.polyfit(times[sel], np.log(P), 1)[0]
    return float(-slope)


def detect_oscillations(trace: DecayTrace, floor: float = 0.01,
                        expected_period: float | None = None,
                        depth: float = 2.0) -> OscillationReport:
    """Count Rabi minima of the population.

    A minimum must lie a factor ``depth`` below the population on both
    sides, which discards the shallow kinks left by individual mirror
    echoes.  Vacuum Rabi minima dip almost to zero, so ``floor`` is applied
    to the revival that follows: a minimum counts only while the
    oscillation is still visible above it.  ``expected_period`` (1/gamma0
    units) feeds the resolution check.
    """
    t, P = trace.times, trace.population
    if expected_period is not None and len(t) > 1:
        if expected_period / (t[1] - t[0]) < 16:
            warnings.warn("trace resolution below 16 samples per expected period",
                          RuntimeWarning, stacklevel=2)
    logP = np.log(np.maximum(P, np.finfo(float).tiny))
    minima, _ = find_peaks(-logP, prominence=math.log(depth))
    bounds = np.append(minima[1:], len(P))
    revival = np.array([P[i:j].max() for i, j in zip(minima, bounds)])
    mins = t[minima[revival > floor]] if minima.size else t[:0]
    first = float(mins[0]) if mins.size else None
    period = float(np.mean(np.diff(mins))) if mins.size > 1 else None
    return OscillationReport(count=int(mins.size), first_min_time=first, period=period)
