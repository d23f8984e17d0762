"""Hard-wired parameter sets that regenerate each published figure's data.

Every binding starts from the reference configuration (a = 200 nm,
n1 = 1.45, n2 = 1, lambda0 = 852 nm, r = a, z = 0, |R|^2 = 0.9, even
resonance) and changes only what the figure varies.
"""

from __future__ import annotations

import math
from dataclasses import replace

from .config import RunConfig, SweepCfg
from .decay_engine import DEFAULT_ALPHA_PER_CM
from .output import Table
from . import runs


class UnknownFigureError(KeyError):
    pass


def _ref(base: RunConfig) -> RunConfig:
    """Reference figure configuration; keeps only output settings of ``base``."""
    cfg = RunConfig()
    cfg.output = base.output
    return cfg


def _with(cfg: RunConfig, section: str, **kw) -> RunConfig:
    return replace(cfg, **{section: replace(getattr(cfg, section), **kw)})


def _rate_sweep(cfg, param, lo, hi, points, q=1, title="", eta_only=False, r_offset=False):
    cfg = _with(cfg, "atom", q=q)
    cfg = replace(cfg, sweep=SweepCfg(param=param, start=lo, stop=hi, points=points))
    # q = 0 figures share the cavity tuned for the transverse dipole
    t = runs.rates_table(cfg, tune_q=1, title=title)
    if r_offset:
        t.columns[0] = ("r_minus_a", "nm")
        a = cfg.fiber.radius_nm
        for row in t.rows:
            row[0] -= a
    if eta_only:
        keep = [0, 5]
        t.columns = [t.columns[i] for i in keep]
        t.rows = [[row[i] for i in keep] for row in t.rows]
    return t


def _z_range(cfg: RunConfig):
    fiber = runs.make_fiber(cfg)
    mode = runs.solve_fundamental(fiber, cfg.atom.lambda0_nm)
    period = math.pi / mode.beta * 1e9
    return -period, period


def fig2a(cfg, eta=False):
    return _rate_sweep(cfg, "R2", 0.0, 0.99, 100, eta_only=eta,
                       title=("channeling efficiency" if eta else "rates") + " vs |R|^2")


def fig2b(cfg, eta=False):
    return _rate_sweep(cfg, "a", 100.0, 400.0, 151, eta_only=eta,
                       title=("channeling efficiency" if eta else "rates") + " vs fiber radius, r = a")


def fig4a(cfg, eta=False, q=1):
    lo, hi = _z_range(cfg)
    return _rate_sweep(cfg, "z", lo, hi, 201, q=q, eta_only=eta,
                       title=("channeling efficiency" if eta else "rates") + f" vs z, q = {q}")


def fig4b(cfg, eta=False, q=1):
    a = cfg.fiber.radius_nm
    if q == 0:
        # transverse-dipole antinode is a node for q = 0; move a quarter wavelength
        fiber = runs.make_fiber(cfg)
        mode = runs.solve_fundamental(fiber, cfg.atom.lambda0_nm)
        cfg = _with(cfg, "atom", z_nm=math.pi / 2 / mode.beta * 1e9)
    return _rate_sweep(cfg, "r", a, a + 1000.0, 101, q=q, eta_only=eta, r_offset=True,
                       title=("channeling efficiency" if eta else "rates") + f" vs r - a, q = {q}")


def _decay(cfg, L, parity="even", t_max=4.0, alpha=0.0, title=""):
    cfg = _with(cfg, "cavity", L_m=L, tune=parity, alpha_per_cm=alpha)
    cfg = _with(cfg, "sim", t_max_gamma0=t_max)
    return runs.decay_table(cfg, title=title or f"P_a(t), L = {L} m, {parity} resonance")


def fig11(cfg):
    base = _with(_with(cfg, "cavity", L_m=0.1), "sim", t_max_gamma0=4.0)
    a = base.fiber.radius_nm
    traces = []
    for d in (0.0, 50.0, 100.0):
        traces.append(runs.decay_table(_with(base, "atom", r_nm=a + d)))
    t = Table([("t", "1/gamma0"), ("P_a_r-a=0nm", "1"), ("P_a_r-a=50nm", "1"),
               ("P_a_r-a=100nm", "1")], params=runs.base_params(base),
              title="P_a(t) at r - a = 0, 50, 100 nm, L = 0.1 m")
    t.params["atom.r_nm"] = "a + {0, 50, 100}"
    for k, tr in zip((0, 50, 100), traces):
        t.notes[f"oscillation_count r-a={k}nm"] = tr.notes["oscillation_count"]
    for rows in zip(*(tr.rows for tr in traces)):
        t.add(rows[0][0], *(r[4] for r in rows))
    return t


_A = DEFAULT_ALPHA_PER_CM

FIGURES = {
    "2a": lambda c: fig2a(c),
    "2b": lambda c: fig2b(c),
    "3a": lambda c: fig2a(c, eta=True),
    "3b": lambda c: fig2b(c, eta=True),
    "4a": lambda c: fig4a(c),
    "4b": lambda c: fig4b(c),
    "5a": lambda c: fig4a(c, eta=True),
    "5b": lambda c: fig4b(c, eta=True),
    "6a": lambda c: fig4a(c, q=0),
    "6b": lambda c: fig4b(c, q=0),
    "7a": lambda c: fig4a(c, eta=True, q=0),
    "7b": lambda c: fig4b(c, eta=True, q=0),
    "8a": lambda c: _decay(c, 0.2, "even", 4.0),
    "8b": lambda c: _decay(c, 0.2, "odd", 4.0),
    "9a": lambda c: _decay(c, 0.002, "even", 1.0),
    "9b": lambda c: _decay(c, 0.002, "odd", 3.0),
    "10a": lambda c: _decay(c, 100.0, "even", 5.0, _A),
    "10b": lambda c: _decay(c, 10.0, "even", 5.0, _A),
    "10c": lambda c: _decay(c, 1.0, "even", 8.0, _A),
    "10d": lambda c: _decay(c, 0.1, "even", 4.0),
    "10e": lambda c: _decay(c, 0.01, "even", 2.0),
    "10f": lambda c: _decay(c, 0.001, "even", 0.5),
    "11": fig11,
}


def figure_table(fig_id: str, base: RunConfig | None = None) -> Table:
    if fig_id not in FIGURES:
        raise UnknownFigureError(fig_id)
    t = FIGURES[fig_id](_ref(base or RunConfig()))
    t.title = f"figure {fig_id}: {t.title}"
    return t
