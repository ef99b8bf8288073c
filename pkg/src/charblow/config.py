"""Run configuration: a small sectioned key=value format with dotted nesting.

Grammar::

    # comment (also after values)
    [section]
    key = value
    group.key = value        # dotted keys nest inside the section

Values are integers, floats, booleans (true/false), bare strings, or
comma-separated float lists. ``parse_config`` validates everything and raises
``ConfigError`` carrying *all* issues (line/column each), never just the first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields as dc_fields
from typing import Optional

from .errors import ConfigError

__all__ = ["RunConfig", "Issue", "parse_config", "render_config", "default_config"]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Issue:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"line {self.line}, col {self.col}: {self.message}"


@dataclass
class ModelConfig:
    type: str = "mhd"
    gamma: float = 2.0
    K: float = 1.0
    c_v: float = 1.0
    profile: str = "constant"
    profile_level: float = 1.0
    profile_base: float = 1.0
    profile_amp: float = 0.1
    profile_wavenumber: float = 1.0
    profile_phase: float = 0.0
    profile_slope: float = 0.1
    profile_center: float = 0.0
    profile_width: float = 1.0
    v_min: float = 1e-6
    v_max: float = 1e9
    x_margin: float = 1.0


@dataclass
class GridConfig:
    n: int = 400
    x_lo: float = 0.0
    x_hi: float = _TWO_PI
    boundary: str = "periodic"


@dataclass
class TimeConfig:
    cfl: float = 0.5
    t_max: float = 1.0


@dataclass
class InitialConfig:
    preset: str = "sine"
    p_star: float = 1.0
    amplitude: float = 0.1
    center: float = 0.0
    width: float = 1.0
    wavenumber: float = 1.0
    target_y0_min: Optional[float] = None


@dataclass
class RiccatiConfig:
    nu: float = 0.01
    h0: Optional[float] = None  # None = automatic reference h(v=1, x=0)


@dataclass
class BlowupConfig:
    cut: float = 1e4
    confirm_refine: bool = False


@dataclass
class KBoxConfig:
    h_lo: Optional[float] = None
    h_hi: Optional[float] = None


@dataclass
class OutputConfig:
    dir: str = "out"


@dataclass
class RunMeta:
    seed: int = 0
    history_stride: int = 1
    trace_x0: tuple = ()
    trace_family: str = "forward"


@dataclass
class CoordsConfig:
    cache_nodes: int = 257


@dataclass
class DuctConfig:
    gamma: float = 2.0
    K: float = 1.0
    c_v: float = 1.0
    area: str = "linear"
    area_base: float = 1.0
    area_slope: float = 0.1
    area_amp: float = 0.1
    area_center: float = 0.0
    area_width: float = 1.0
    xt0: float = 0.0


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    riccati: RiccatiConfig = field(default_factory=RiccatiConfig)
    blowup: BlowupConfig = field(default_factory=BlowupConfig)
    kbox: KBoxConfig = field(default_factory=KBoxConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    run: RunMeta = field(default_factory=RunMeta)
    coords: CoordsConfig = field(default_factory=CoordsConfig)
    duct: DuctConfig = field(default_factory=DuctConfig)


_SECTIONS = {
    "model": ModelConfig,
    "grid": GridConfig,
    "time": TimeConfig,
    "initial": InitialConfig,
    "riccati": RiccatiConfig,
    "blowup": BlowupConfig,
    "kbox": KBoxConfig,
    "output": OutputConfig,
    "run": RunMeta,
    "coords": CoordsConfig,
    "duct": DuctConfig,
}

_CHOICES = {
    ("model", "type"): {"isentropic", "psystem", "gamma", "mhd"},
    ("model", "profile"): {"constant", "linear", "sinusoidal", "tanh"},
    ("grid", "boundary"): {"periodic", "outflow"},
    ("initial", "preset"): {"stationary", "sine", "gaussian", "tanh"},
    ("run", "trace_family"): {"forward", "backward"},
    ("duct", "area"): {"constant", "linear", "tanh"},
}

# (low, high, low_open, high_open); None = unbounded
_RANGES = {
    ("model", "gamma"): (1.0, None, True, False),
    ("model", "K"): (0.0, None, True, False),
    ("model", "c_v"): (0.0, None, True, False),
    ("grid", "n"): (16, None, False, False),
    ("time", "cfl"): (0.0, 0.9, True, False),
    ("time", "t_max"): (0.0, None, False, False),
    ("initial", "p_star"): (0.0, None, True, False),
    ("initial", "width"): (0.0, None, True, False),
    ("riccati", "nu"): (0.0, 1.0, True, True),
    ("blowup", "cut"): (0.0, None, True, False),
    ("run", "history_stride"): (1, None, False, False),
    ("run", "seed"): (0, None, False, False),
    ("coords", "cache_nodes"): (33, None, False, False),
    ("duct", "gamma"): (1.0, None, True, False),
    ("duct", "K"): (0.0, None, True, False),
}

_OPTIONAL_FLOATS = {
    ("initial", "target_y0_min"),
    ("riccati", "h0"),
    ("kbox", "h_lo"),
    ("kbox", "h_hi"),
}


def _coerce(section, key, raw, line, col, issues, target_type):
    if target_type is bool:
        if raw.lower() in ("true", "yes", "on"):
            return True
        if raw.lower() in ("false", "no", "off"):
            return False
        issues.append(Issue(line, col, f"{section}.{key}: expected boolean, got {raw!r}"))
        return None
    if target_type is int:
        try:
            return int(raw)
        except ValueError:
            issues.append(Issue(line, col, f"{section}.{key}: expected integer, got {raw!r}"))
            return None
    if target_type is float:
        try:
            return float(raw)
        except ValueError:
            issues.append(Issue(line, col, f"{section}.{key}: expected number, got {raw!r}"))
            return None
    if target_type is tuple:
        try:
            return tuple(float(tok) for tok in raw.split(",") if tok.strip() != "")
        except ValueError:
            issues.append(Issue(line, col, f"{section}.{key}: expected comma-separated numbers"))
            return None
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate config text; raises ConfigError with all issues."""
    cfg = RunConfig()
    issues: list[Issue] = []
    section = None
    field_types = {
        name: {f.name: f for f in dc_fields(cls)} for name, cls in _SECTIONS.items()
    }

    for lineno, rawline in enumerate(text.splitlines(), start=1):
        stripped = rawline.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        col = len(rawline) - len(rawline.lstrip()) + 1
        body = stripped.strip()
        if body.startswith("["):
            if not body.endswith("]"):
                issues.append(Issue(lineno, col, f"malformed section header {body!r}"))
                continue
            name = body[1:-1].strip()
            if name not in _SECTIONS:
                issues.append(Issue(lineno, col, f"unknown section [{name}]"))
                section = None
            else:
                section = name
            continue
        if "=" not in body:
            issues.append(Issue(lineno, col, f"expected key = value, got {body!r}"))
            continue
        if section is None:
            issues.append(Issue(lineno, col, "key outside any known section"))
            continue
        key_raw, value_raw = body.split("=", 1)
        key = key_raw.strip().replace(".", "_")
        value_raw = value_raw.strip()
        val_col = rawline.index("=") + 2
        if key not in field_types[section]:
            issues.append(Issue(lineno, col, f"unknown key {section}.{key_raw.strip()}"))
            continue

        fobj = field_types[section][key]
        if (section, key) in _OPTIONAL_FLOATS:
            if value_raw.lower() in ("auto", "none"):
                value = None
            else:
                value = _coerce(section, key, value_raw, lineno, val_col, issues, float)
                if value is None and issues and issues[-1].line == lineno:
                    continue
        else:
            ftype = fobj.type if isinstance(fobj.type, type) else {
                "str": str, "int": int, "float": float, "bool": bool, "tuple": tuple,
            }.get(str(fobj.type).split("[")[0], str)
            value = _coerce(section, key, value_raw, lineno, val_col, issues, ftype)
            if value is None:
                continue

        choices = _CHOICES.get((section, key))
        if choices is not None and value not in choices:
            issues.append(Issue(lineno, val_col,
                                f"{section}.{key}: {value!r} not one of {sorted(choices)}"))
            continue
        rng = _RANGES.get((section, key))
        if rng is not None and value is not None:
            lo, hi, lo_open, hi_open = rng
            bad = False
            if lo is not None and (value <= lo if lo_open else value < lo):
                issues.append(Issue(lineno, val_col,
                                    f"{section}.{key}: {value} violates lower bound "
                                    f"{'>' if lo_open else '>='} {lo}"))
                bad = True
            if hi is not None and (value >= hi if hi_open else value > hi):
                issues.append(Issue(lineno, val_col,
                                    f"{section}.{key}: {value} violates upper bound "
                                    f"{'<' if hi_open else '<='} {hi}"))
                bad = True
            if bad:
                continue
        setattr(getattr(cfg, section), key, value)

    # cross-field checks
    if cfg.grid.x_hi <= cfg.grid.x_lo:
        issues.append(Issue(0, 0, "grid.x_hi must exceed grid.x_lo"))
    if cfg.initial.target_y0_min is not None and cfg.initial.target_y0_min >= 0.0:
        issues.append(Issue(0, 0, "initial.target_y0_min must be negative"))
    if (cfg.kbox.h_lo is None) != (cfg.kbox.h_hi is None):
        issues.append(Issue(0, 0, "kbox.h_lo and kbox.h_hi must be given together"))

    if issues:
        raise ConfigError(issues)
    return cfg


def _fmt(v) -> str:
    if v is None:
        return "auto"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, tuple):
        return ", ".join(format(t, ".17g") for t in v)
    return str(v)


def render_config(cfg: RunConfig) -> str:
    """Render a fully resolved config; re-parsing reproduces the same RunConfig."""
    lines = []
    for name in _SECTIONS:
        sub = getattr(cfg, name)
        lines.append(f"[{name}]")
        for f in dc_fields(sub):
            key = f.name
            nice = key.replace("profile_", "profile.").replace("area_", "area.")
            lines.append(f"{nice} = {_fmt(getattr(sub, key))}")
        lines.append("")
    return "\n".join(lines)


def default_config() -> RunConfig:
    return RunConfig()
