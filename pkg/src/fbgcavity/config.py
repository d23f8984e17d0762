"""Flat ``section.key = value`` run configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _as_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text: str):
    t = text.strip().lower()
    return None if t in ("", "none", "auto") else float(text)


def _r_nm(text: str):
    t = text.strip().lower()
    return "surface" if t in ("surface", "a") else float(text)


@dataclass
class FiberCfg:
    radius_nm: float = 200.0
    n1: float = 1.45
    n2: float = 1.0


@dataclass
class AtomCfg:
    r_nm: float | str = "surface"
    z_nm: float = 0.0
    q: int = 1
    lambda0_nm: float = 852.0
    gamma0_MHz: float = 5.2


@dataclass
class CavityCfg:
    L_m: float = 0.2
    R2: float = 0.9
    phi_R: float = 0.0
    alpha_per_cm: float = 0.0
    tune: str = "even"


@dataclass
class SimCfg:
    t_max_gamma0: float = 4.0
    h_auto: bool = True
    h_override: float | None = None
    oscillation_floor: float = 0.01
    max_rows: int = 2000


@dataclass
class OutputCfg:
    format: str = "csv"
    path: str | None = None
    precision: int = 9


@dataclass
class SweepCfg:
    param: str | None = None
    start: float | None = None
    stop: float | None = None
    points: int = 11


@dataclass
class ModesCfg:
    profile_points: int = 0
    profile_rmax_nm: float = 1000.0


@dataclass
class RunConfig:
    fiber: FiberCfg = field(default_factory=FiberCfg)
    atom: AtomCfg = field(default_factory=AtomCfg)
    cavity: CavityCfg = field(default_factory=CavityCfg)
    sim: SimCfg = field(default_factory=SimCfg)
    output: OutputCfg = field(default_factory=OutputCfg)
    sweep: SweepCfg = field(default_factory=SweepCfg)
    modes: ModesCfg = field(default_factory=ModesCfg)

    @property
    def r_nm(self) -> float:
        r = self.atom.r_nm
        return self.fiber.radius_nm if r == "surface" else float(r)

    @property
    def gamma0(self) -> float:
        return 2 * math.pi * self.atom.gamma0_MHz * 1e6

    def flat(self) -> dict:
        out = {}
        for sec in fields(self):
            obj = getattr(self, sec.name)
            for f in fields(obj):
                out[f"{sec.name}.{f.name}"] = getattr(obj, f.name)
        return out


_PARSERS = {
    "atom.r_nm": _r_nm,
    "atom.q": int,
    "sim.h_auto": _as_bool,
    "sim.h_override": _opt_float,
    "sim.max_rows": int,
    "output.format": str,
    "output.path": lambda s: None if s.strip() in ("", "-") else s.strip(),
    "output.precision": int,
    "cavity.tune": lambda s: s.strip().lower(),
    "sweep.param": lambda s: None if s.strip().lower() in ("", "none") else s.strip(),
    "sweep.start": _opt_float,
    "sweep.stop": _opt_float,
    "sweep.points": int,
    "modes.profile_points": int,
}


def parse_text(text: str) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def apply(cfg: RunConfig, values: dict[str, str]) -> RunConfig:
    known = cfg.flat()
    for key, text in values.items():
        if key not in known:
            raise ConfigError(f"{key}: unknown configuration key")
        parse = _PARSERS.get(key, float)
        try:
            value = parse(text)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse {text!r} ({exc})") from None
        sec, name = key.split(".", 1)
        setattr(getattr(cfg, sec), name, value)
    validate(cfg)
    return cfg


def _require(cond: bool, key: str, msg: str):
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def validate(cfg: RunConfig) -> None:
    f, a, c, s, o, w = cfg.fiber, cfg.atom, cfg.cavity, cfg.sim, cfg.output, cfg.sweep
    _require(f.radius_nm > 0, "fiber.radius_nm", "must be positive")
    _require(f.n2 >= 1.0, "fiber.n2", "must be >= 1")
    _require(f.n1 > f.n2, "fiber.n1", f"must exceed fiber.n2 ({f.n2})")
    _require(a.q in (-1, 0, 1), "atom.q", "must be -1, 0 or 1")
    _require(a.r_nm == "surface" or a.r_nm >= f.radius_nm, "atom.r_nm",
             "atom must sit on or outside the fiber (r >= radius)")
    _require(a.lambda0_nm > 0, "atom.lambda0_nm", "must be positive")
    _require(a.gamma0_MHz > 0, "atom.gamma0_MHz", "must be positive")
    _require(c.L_m > 0, "cavity.L_m", "must be positive")
    _require(0 <= c.R2 < 1, "cavity.R2", "must lie in [0, 1)")
    _require(c.alpha_per_cm >= 0, "cavity.alpha_per_cm", "must be >= 0")
    _require(c.tune in ("none", "even", "odd"), "cavity.tune", "must be none, even or odd")
    _require(abs(a.z_nm) * 1e-9 <= c.L_m / 2, "atom.z_nm", "atom must lie inside the cavity")
    _require(s.t_max_gamma0 > 0, "sim.t_max_gamma0", "must be positive")
    _require(s.h_override is None or s.h_override > 0, "sim.h_override", "must be positive")
    _require(s.oscillation_floor >= 0, "sim.oscillation_floor", "must be >= 0")
    _require(s.max_rows >= 2, "sim.max_rows", "must be >= 2")
    _require(o.format in ("csv", "json"), "output.format", "must be csv or json")
    _require(1 <= o.precision <= 17, "output.precision", "must lie in [1, 17]")
    _require(w.param in (None, "a", "r", "z", "R2"), "sweep.param", "must be one of a, r, z, R2")
    _require(w.points >= 2, "sweep.points", "must be >= 2")
    _require(cfg.modes.profile_points >= 0, "modes.profile_points", "must be >= 0")


def load(path: str | None = None, overrides: list[str] | tuple[str, ...] = ()) -> RunConfig:
    """Defaults, then the file at ``path``, then ``key=value`` overrides."""
    cfg = RunConfig()
    values: dict[str, str] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"--config: cannot read {path}: {exc.strerror}") from None
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set: expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = value
    return apply(cfg, values)
