"""Scenario configuration: validation, flat key=value files and model construction.

Config files hold one ``key = value`` pair per line; ``#`` starts a comment.
Every key of :class:`ScenarioConfig` may appear, unknown keys are rejected.
``gamma`` and ``eta`` accept a comma-separated list, which expands into one
scenario per value (a sweep); at most one of them may be a list.

Units. Single-battery models use ``tau = 1`` for the charging window and
express gaps and rates in units of the effective coupling
``g~ = area / (sigma sqrt(pi/2))`` (two-level) or ``area / (sigma sqrt(pi))``
(three-level). The bipartite model uses ``tau = 2 pi / omega_qb = 1`` and
rates in units of the charger--battery coupling ``g``.
"""

import configparser
import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from ..errors import ConfigError
from ..models import (FRAMES, MODELS, BipartiteParams, DrivePulse, ThreeLevelParams,
                      TwoLevelParams, scenario)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one simulation in dimensionless ratios.

    Attributes
    ----------
    pulse_area : float
        ``theta_m`` (two-level) or ``Theta_m`` (three-level).
    sigma_ratio : float
        Pulse width over the charging window, ``sigma / tau``.
    gap_ratio, gap2_ratio : float
        ``Delta / g~`` and, for the ladder, ``Delta' / g~``.
    gamma, eta : float
        Relaxation and dephasing rates of the lowest transition (or of the
        charger, for ``eta`` in the bipartite model).
    gamma21, eta2 : float, optional
        Rates of the upper ladder transition; default to ``gamma`` and ``eta``.
    drive_ratio : float
        Bipartite charger drive ``F / g``.
    duration : float
        Run length in units of ``tau``.
    """

    name: str = "scenario"
    model: str = "two_level"
    frame: str = "rwa"
    pulse_area: float = math.pi / 2
    sigma_ratio: float = 0.125
    gap_ratio: float = 10.0
    gap2_ratio: float = 9.5
    gamma: float = 0.0
    eta: float = 0.0
    gamma21: Optional[float] = None
    eta2: Optional[float] = None
    a: float = 1.0
    c: float = 0.0
    phi: float = 0.0
    varphi: float = 0.0
    drive_ratio: float = 0.5
    coupling: float = 1.0
    duration: float = 1.0
    grid_points: int = 4000
    output: Optional[str] = None
    figure: Optional[str] = None

    def __post_init__(self):
        validate(self)

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    @property
    def upper_gamma(self):
        return self.gamma if self.gamma21 is None else self.gamma21

    @property
    def upper_eta(self):
        return self.eta if self.eta2 is None else self.eta2


FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_OPTIONAL_FLOATS = {"gamma21", "eta2"}
_STRINGS = {"name", "model", "frame", "output", "figure"}


def validate(cfg):
    if cfg.model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {cfg.model!r}")
    if cfg.frame not in FRAMES:
        raise ConfigError(f"frame must be one of {FRAMES}, got {cfg.frame!r}")
    for key in ("pulse_area", "sigma_ratio", "gap_ratio", "gap2_ratio", "coupling", "duration"):
        if not getattr(cfg, key) > 0:
            raise ConfigError(f"{key} must be positive, got {getattr(cfg, key)}")
    if cfg.drive_ratio < 0:
        raise ConfigError(f"drive_ratio must be non-negative, got {cfg.drive_ratio}")
    for key in ("gamma", "eta", "gamma21", "eta2"):
        val = getattr(cfg, key)
        if val is not None and not val >= 0:
            raise ConfigError(f"{key} must be non-negative, got {val}")
    if not 0 <= cfg.a <= 1 or not 0 <= cfg.c <= 1 or cfg.a + cfg.c > 1 + 1e-12:
        raise ConfigError(f"need 0 <= a, c and a + c <= 1, got a={cfg.a}, c={cfg.c}")
    if isinstance(cfg.grid_points, bool) or not isinstance(cfg.grid_points, int) or cfg.grid_points < 2:
        raise ConfigError(f"grid_points must be an integer >= 2, got {cfg.grid_points!r}")
    if cfg.sigma_ratio > 0.25 * cfg.duration and cfg.model != "bipartite":
        raise ConfigError("sigma_ratio above duration/4 leaves the Gaussian pulse truncated")


def _convert(key, text):
    text = text.strip()
    if key in _STRINGS:
        return None if text.lower() in ("", "none") and key in ("output", "figure") else text
    if key in _OPTIONAL_FLOATS and text.lower() in ("", "none"):
        return None
    try:
        if key == "grid_points":
            return int(text)
        return float(_eval_constant(text))
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r}") from exc


def _eval_constant(text):
    # allow "pi", "pi/2", "2*pi", "1/16" and plain numbers; nothing else is evaluated
    t = text.replace(" ", "").lower()
    num, _, den = t.partition("/")
    if "pi" in num:
        coef = num.replace("pi", "").rstrip("*") or "1"
        value = (-1.0 if coef == "-" else float(coef)) * math.pi
    else:
        value = float(num)
    return value / float(den) if den else value


def parse_config(text, source="<string>"):
    """Parse flat ``key = value`` text into a list of configs (several for a sweep)."""
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       comment_prefixes=("#",), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    raw = dict(parser["scenario"])
    unknown = sorted(set(raw) - set(FIELDS))
    if unknown:
        raise ConfigError(f"{source}: unknown keys {unknown}")
    sweep_keys = [k for k in ("gamma", "eta") if "," in raw.get(k, "")]
    if len(sweep_keys) > 1:
        raise ConfigError(f"{source}: only one of gamma/eta may be a list")
    values = {k: _convert(k, v) for k, v in raw.items() if k not in sweep_keys}
    if not sweep_keys:
        return [_build(values, source)]
    key = sweep_keys[0]
    items = [s for s in raw[key].split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{source}: empty sweep list for {key}")
    base = values.get("name", "scenario")
    out = []
    for k, item in enumerate(items):
        point = dict(values, **{key: _convert(key, item)})
        point["name"] = f"{base}-{k:02d}"
        out.append(_build(point, source))
    return out


def _build(values, source):
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def format_config(cfg):
    """Inverse of :func:`parse_config` for a single config; floats use ``repr``."""
    lines = []
    for name in FIELDS:
        val = getattr(cfg, name)
        lines.append(f"{name} = {'none' if val is None else repr(val) if isinstance(val, float) else val}")
    return "\n".join(lines) + "\n"


def config_items(cfg):
    """``(key, text)`` pairs used for table headers."""
    return [(name, format_config_value(getattr(cfg, name))) for name in FIELDS]


def format_config_value(val):
    if val is None:
        return "none"
    return repr(val) if isinstance(val, float) else str(val)


def effective_coupling(cfg):
    """``g~`` for single-battery models, ``g`` for the bipartite model."""
    if cfg.model == "two_level":
        return cfg.pulse_area / (cfg.sigma_ratio * math.sqrt(math.pi / 2))
    if cfg.model == "three_level":
        return cfg.pulse_area / (cfg.sigma_ratio * math.sqrt(math.pi))
    return cfg.coupling


def build_params(cfg):
    """Model parameters in absolute units (``tau = 1``)."""
    g = effective_coupling(cfg)
    if cfg.model == "two_level":
        gap = cfg.gap_ratio * g
        drive = DrivePulse.for_two_level(cfg.pulse_area, cfg.sigma_ratio, gap, duration=1.0)
        return TwoLevelParams(gap, drive, gamma=cfg.gamma * g, eta=cfg.eta * g, a=cfg.a, phi=cfg.phi)
    if cfg.model == "three_level":
        gap01, gap12 = cfg.gap_ratio * g, cfg.gap2_ratio * g
        d01 = DrivePulse.for_three_level(cfg.pulse_area, cfg.sigma_ratio, gap01, duration=1.0)
        d12 = DrivePulse.for_three_level(cfg.pulse_area, cfg.sigma_ratio, gap12, duration=1.0)
        return ThreeLevelParams(gap01, gap12, d01, d12,
                                gamma10=cfg.gamma * g, gamma21=cfg.upper_gamma * g,
                                eta1=cfg.eta * g, eta2=cfg.upper_eta * g,
                                a=cfg.a, c=cfg.c, phi=cfg.phi, varphi=cfg.varphi)
    omega = 2 * math.pi
    return BipartiteParams(omega, omega, omega, g, cfg.drive_ratio * g, eta_charger=cfg.eta * g)


def build_scenario(cfg, frame=None):
    frame = cfg.frame if frame is None else frame
    duration = cfg.duration
    return scenario(cfg.model, build_params(cfg), frame=frame, duration=duration)
