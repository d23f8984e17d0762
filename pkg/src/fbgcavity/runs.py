"""Build model objects from a :class:`RunConfig` and evaluate them into tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cavity_response import CavitySpec, overdamped_report, tune_length
from .config import RunConfig
from .decay_engine import (DecayTrace, delay_params, detect_oscillations, fit_decay_rate,
                           simulate_decay)
from .emission_rates import AtomSpec, RateReport, gamma_guided, gamma_rad
from .fiber_modes import (FiberSpec, GuidedModeSolution, effective_area, guided_profile,
                          solve_fundamental)
from .output import Table
from .single_mode import single_mode_params

RATE_COLUMNS = [("gamma_gyd", "gamma0"), ("gamma_cavgyd", "gamma0"), ("gamma_rad", "gamma0"),
                ("Gamma", "gamma0"), ("eta", "1"), ("G0", "1")]


@dataclass(frozen=True)
class Setup:
    fiber: FiberSpec
    mode: GuidedModeSolution
    atom: AtomSpec
    cavity: CavitySpec


def make_fiber(cfg: RunConfig) -> FiberSpec:
    return FiberSpec(a=cfg.fiber.radius_nm, n1=cfg.fiber.n1, n2=cfg.fiber.n2)


def make_cavity(cfg: RunConfig, mode: GuidedModeSolution, tune_q: int | None = None) -> CavitySpec:
    c = cfg.cavity
    cav = CavitySpec(L=c.L_m, R_mag=math.sqrt(c.R2), phi_R=c.phi_R, alpha=c.alpha_per_cm)
    if c.tune != "none":
        q = cfg.atom.q if tune_q is None else tune_q
        cav = replace(cav, L=tune_length(cav, mode, q, c.tune))
    return cav


def setup(cfg: RunConfig, tune_q: int | None = None) -> Setup:
    fiber = make_fiber(cfg)
    mode = solve_fundamental(fiber, cfg.atom.lambda0_nm)
    atom = AtomSpec(r=cfg.r_nm, z=cfg.atom.z_nm, q=cfg.atom.q, lambda0=cfg.atom.lambda0_nm,
                    gamma0_phys=cfg.gamma0)
    return Setup(fiber, mode, atom, make_cavity(cfg, mode, tune_q))


def base_params(cfg: RunConfig, s: Setup | None = None) -> dict:
    p = {k: v for k, v in cfg.flat().items() if not k.startswith(("output.", "modes."))}
    if s is not None:
        p["cavity.L_m (tuned)"] = s.cavity.L
        p["atom.r_nm (resolved)"] = s.atom.r
    return p


def modes_table(cfg: RunConfig) -> Table:
    fiber = make_fiber(cfg)
    mode = solve_fundamental(fiber, cfg.atom.lambda0_nm)
    area, r_eff = effective_area(mode, fiber)
    summary = {"n_eff (beta/k)": mode.n_eff, "v_g [m/s]": mode.v_g,
               "A_eff [um^2]": area, "r_eff [nm]": r_eff}
    params = {**{k: v for k, v in cfg.flat().items() if k.startswith(("fiber.", "atom.lambda0"))},
              **summary}
    n = cfg.modes.profile_points
    if n == 0:
        t = Table([("n_eff", "1"), ("v_g", "m/s"), ("A_eff", "um^2"), ("r_eff", "nm")],
                  params=params, title="HE11 mode summary")
        t.add(mode.n_eff, mode.v_g, area, r_eff)
        return t
    t = Table([("r", "nm"), ("abs_e_r", "1/m"), ("abs_e_phi", "1/m"), ("abs_e_z", "1/m")],
              params=params, title="HE11 radial profile, (f, l) = (+1, +1)")
    r = np.linspace(0.0, cfg.modes.profile_rmax_nm, n)
    e = guided_profile(mode, fiber, 1, 1, r)
    for i in range(n):
        t.add(float(r[i]), float(abs(e.e_r[i])), float(abs(e.e_phi[i])), float(abs(e.e_z[i])))
    return t


class RateCache:
    """Memoises the radiation rate, which only depends on fiber, r and q."""

    def __init__(self):
        self._rad = {}

    def rates(self, fiber: FiberSpec, mode: GuidedModeSolution, atom: AtomSpec) -> RateReport:
        key = (fiber, atom.r, atom.q, atom.lambda0)
        if key not in self._rad:
            self._rad[key] = gamma_rad(fiber, atom)
        return RateReport(gamma_gyd=gamma_guided(fiber, mode, atom), gamma_rad=self._rad[key])


def rate_row(s: Setup, cache: RateCache) -> list[float]:
    free = cache.rates(s.fiber, s.mode, s.atom)
    rep = overdamped_report(s.fiber, s.mode, s.atom, s.cavity, free)
    return [free.gamma_gyd, rep.gamma_cavgyd, rep.gamma_rad, rep.Gamma_total, rep.eta, rep.G0]


_SWEEP_UNITS = {"a": "nm", "r": "nm", "z": "nm", "R2": "1"}


def sweep_values(cfg: RunConfig, mode: GuidedModeSolution) -> np.ndarray:
    w = cfg.sweep
    a = cfg.fiber.radius_nm
    defaults = {"a": (100.0, 400.0), "r": (a, a + 1000.0),
                "z": (-math.pi / mode.beta * 1e9, math.pi / mode.beta * 1e9), "R2": (0.0, 0.99)}
    lo, hi = defaults[w.param]
    lo = lo if w.start is None else w.start
    hi = hi if w.stop is None else w.stop
    return np.linspace(lo, hi, w.points)


def sweep_setups(cfg: RunConfig, param: str, values, tune_q: int | None = None):
    """Yield ``(value, Setup)`` for each sweep point, re-solving the mode when needed."""
    base = setup(cfg, tune_q)
    for v in values:
        v = float(v)
        if param == "a":
            c = _with(cfg, "fiber", radius_nm=v)
            if cfg.atom.r_nm != "surface" and cfg.atom.r_nm < v:
                raise ValueError(f"atom.r_nm={cfg.atom.r_nm} lies inside a fiber of radius {v}")
            yield v, setup(c, tune_q)
        elif param == "r":
            yield v, replace(base, atom=replace(base.atom, r=v))
        elif param == "z":
            if abs(v) * 1e-9 > base.cavity.L / 2:
                raise ValueError(f"z={v} nm lies outside the cavity")
            yield v, replace(base, atom=replace(base.atom, z=v))
        elif param == "R2":
            yield v, replace(base, cavity=replace(base.cavity, R_mag=math.sqrt(v)))
        else:
            raise ValueError(f"unknown sweep parameter {param!r}")


def _with(cfg: RunConfig, section: str, **kw) -> RunConfig:
    return replace(cfg, **{section: replace(getattr(cfg, section), **kw)})


def rates_table(cfg: RunConfig, tune_q: int | None = None, title: str = "") -> Table:
    cache = RateCache()
    param = cfg.sweep.param
    if param is None:
        s = setup(cfg, tune_q)
        t = Table(list(RATE_COLUMNS), params=base_params(cfg, s),
                  title=title or "cavity-modified emission rates")
        t.add(*rate_row(s, cache))
        return t
    mode = solve_fundamental(make_fiber(cfg), cfg.atom.lambda0_nm)
    values = sweep_values(cfg, mode)
    params = base_params(cfg)
    if param == "a" and cfg.atom.r_nm == "surface":
        params["note"] = "atom radius tracks the fiber radius (r = a)"
    t = Table([(param, _SWEEP_UNITS[param])] + list(RATE_COLUMNS), params=params,
              title=title or f"emission rates vs {param}")
    for v, s in sweep_setups(cfg, param, values, tune_q):
        t.add(v, *rate_row(s, cache))
    return t


def _step(cfg: RunConfig):
    if not cfg.sim.h_auto and cfg.sim.h_override is not None:
        return cfg.sim.h_override
    return None


def run_decay(cfg: RunConfig, s: Setup | None = None, t_max: float | None = None):
    s = setup(cfg) if s is None else s
    free = RateCache().rates(s.fiber, s.mode, s.atom)
    p = delay_params(s.mode, free, s.atom, s.cavity)
    T = cfg.sim.t_max_gamma0 if t_max is None else t_max
    return s, free, p, simulate_decay(p, T, _step(cfg))


def thin(trace: DecayTrace, max_rows: int) -> np.ndarray:
    n = len(trace.times)
    stride = max(1, math.ceil((n - 1) / (max_rows - 1)))
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    return idx


def decay_table(cfg: RunConfig, title: str = "", s: Setup | None = None,
                t_max: float | None = None) -> Table:
    s, free, p, trace = run_decay(cfg, s, t_max)
    osc = detect_oscillations(trace, cfg.sim.oscillation_floor)
    params = base_params(cfg, s)
    params.update({"gamma_gyd [gamma0]": free.gamma_gyd, "gamma_rad [gamma0]": free.gamma_rad,
                   "tau_L [1/gamma0]": p.scaled()[0], "step [1/gamma0]": float(trace.times[1])})
    t = Table([("t", "1/gamma0"), ("t_s", "s"), ("Re_C_a", "1"), ("Im_C_a", "1"), ("P_a", "1"),
               ("P_free", "1")], params=params, title=title or "upper-state population")
    notes = {"oscillation_count": osc.count, "first_minimum [1/gamma0]": osc.first_min_time,
             "oscillation_period [1/gamma0]": osc.period}
    P = trace.population
    tail = trace.times >= 0.25 * trace.times[-1]
    if osc.count == 0 and np.all(P[tail] > 0):
        notes["Gamma_fit [gamma0]"] = fit_decay_rate(trace, (0.25 * trace.times[-1],
                                                             float(trace.times[-1])))
    t.notes = notes
    gamma = free.gamma_total_free
    for i in thin(trace, cfg.sim.max_rows):
        ti = float(trace.times[i])
        c = complex(trace.amplitude[i])
        t.add(ti, ti / cfg.gamma0, c.real, c.imag, float(P[i]), math.exp(-gamma * ti))
    return t


def singlemode_table(cfg: RunConfig) -> Table:
    s = setup(cfg)
    free = RateCache().rates(s.fiber, s.mode, s.atom)
    rep = single_mode_params(s.mode, s.atom, s.cavity, free)
    mhz = rep.gamma0 / (2 * math.pi * 1e6)
    t = Table([("quantity", ""), ("value", ""), ("unit", "")], params=base_params(cfg, s),
              title="single-mode cavity parameters")
    rows = [("m_index", rep.m_index, "1"), ("Delta", rep.Delta, "rad/s"),
            ("kappa", rep.kappa, "gamma0"), ("Omega", rep.Omega, "gamma0"),
            ("gamma", rep.gamma, "gamma0"),
            ("Lambda_re", rep.Lambda.real, "gamma0"), ("Lambda_im", rep.Lambda.imag, "gamma0"),
            ("finesse", rep.finesse, "1"),
            ("L1", rep.L1, "m"), ("L2", rep.L2, "m"), ("L3", rep.L3, "m"),
            ("kappa_MHz", rep.kappa * mhz, "MHz"), ("Omega_MHz", rep.Omega * mhz, "MHz"),
            ("regime", rep.regime, "")]
    rows += [(f"ratio {k}", v, "1") for k, v in rep.ratios.items()]
    for row in rows:
        t.add(*row)
    if math.isinf(rep.L1):
        t.notes["L1"] = "atom at a node: coupling vanishes, strong coupling impossible"
    for k, v in rep.ratios.items():
        if math.isinf(v):
            t.notes[f"ratio {k}"] = "denominator is zero"
    return t
