"""Scenario configuration: a flat ``key = value`` file plus overrides."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from .codec import DataRate
from .kernel import ConfigurationError
from .methods import MethodKind
from .stations import PowerProfile

ALL_METHODS = tuple(m.value for m in MethodKind)


@dataclass(frozen=True)
class ScenarioConfig:
    M: int = 10
    N: int = 10
    sigma_list: tuple[float, ...] = (0.001, 0.003, 0.01, 0.03, 0.1)
    methods: tuple[str, ...] = ALL_METHODS
    replications: int = 10
    frames: int = 100
    seed: int = 1
    horizon_s: float = 0.0  # 0: derived from the schedule

    data_duration_us: float = 1480
    wur_rate: str = "ldr"
    sifs_us: float = 16
    slot_us: float = 9
    aifsn: int = 3
    cw_min: int = 15
    cw_max: int = 1023
    ack_us: float = 44
    cts_us: float = 44
    tf_us: float = 100
    pspoll_us: float = 44

    p_pcr_tx: float = 280.0
    p_pcr_listen: float = 100.0
    p_pcr_doze: float = 0.05
    p_wur_on: float = 0.5
    p_wur_off: float = 0.0
    p_pcr_switching: float = -1.0  # negative: same as p_pcr_listen
    pcr_switch_on_us: float = 2000

    guard_factor: float = 4.0
    guard_access: str = "immediate"
    twt_period_s: float = 0.0  # 0: tightest feasible period
    schedule_slack_us: float = 100_000
    miss_timeout_us: float = 0.0  # 0: 2 * switch-on + exchange
    wur_beacon_period_s: float = 0.0  # 0: no WUR beacons
    sat_gating: bool = True
    sat_warmup_us: float = 10_000

    def __post_init__(self):
        validate(self)

    def power_profile(self) -> PowerProfile:
        return PowerProfile(self.p_pcr_tx, self.p_pcr_listen, self.p_pcr_doze, self.p_wur_on,
                            self.p_wur_off, self.pcr_switch_on_us,
                            None if self.p_pcr_switching < 0 else self.p_pcr_switching)

    @property
    def method_kinds(self) -> tuple[MethodKind, ...]:
        return tuple(MethodKind.parse(m) for m in self.methods)

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def items(self) -> list[tuple[str, str]]:
        """(key, text) pairs in declaration order, parseable by parse_pairs."""
        return [(f.name, format_value(getattr(self, f.name))) for f in dataclasses.fields(self)]


_POSITIVE = ("data_duration_us", "sifs_us", "slot_us", "ack_us", "cts_us", "tf_us", "pspoll_us",
             "guard_factor", "sat_warmup_us")
_NON_NEGATIVE = ("M", "N", "aifsn", "seed", "horizon_s", "p_pcr_tx", "p_pcr_listen", "p_pcr_doze",
                 "p_wur_on", "p_wur_off", "pcr_switch_on_us", "twt_period_s", "schedule_slack_us",
                 "miss_timeout_us", "wur_beacon_period_s")


def validate(cfg: ScenarioConfig) -> None:
    for k in _POSITIVE:
        if not getattr(cfg, k) > 0:
            raise ConfigurationError(f"{k}: must be positive")
    for k in _NON_NEGATIVE:
        v = getattr(cfg, k)
        if not (v >= 0 and math.isfinite(v)):
            raise ConfigurationError(f"{k}: must be non-negative")
    if cfg.seed >= 2**64:
        raise ConfigurationError("seed: must fit in 64 bits")
    if cfg.N < 1:
        raise ConfigurationError("N: at least one sensor is required")
    if cfg.replications < 1:
        raise ConfigurationError("replications: must be at least 1")
    if cfg.frames < 1:
        raise ConfigurationError("frames: must be at least 1")
    if not cfg.sigma_list:
        raise ConfigurationError("sigma_list: empty")
    for s in cfg.sigma_list:
        if not (s >= 0 and math.isfinite(s)):
            raise ConfigurationError(f"sigma_list: sigma must be non-negative, got {s}")
    if not cfg.methods:
        raise ConfigurationError("methods: empty")
    for m in cfg.methods:
        try:
            MethodKind.parse(m)
        except ConfigurationError as e:
            raise ConfigurationError(f"methods: {e}") from None
    try:
        DataRate(cfg.wur_rate)
    except ValueError:
        raise ConfigurationError(f"wur_rate: expected 'ldr' or 'hdr', got {cfg.wur_rate!r}") from None
    for name in ("cw_min", "cw_max"):
        v = getattr(cfg, name)
        if v < 0 or (v + 1) & v:
            raise ConfigurationError(f"{name}: cw + 1 must be a power of two")
    if cfg.cw_min > cfg.cw_max:
        raise ConfigurationError("cw_min: exceeds cw_max")
    if cfg.guard_access not in ("immediate", "edca"):
        raise ConfigurationError("guard_access: expected 'immediate' or 'edca'")


# -- text form ------------------------------------------------------------

def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ", ".join(format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _split_list(text: str) -> list[str]:
    t = text.strip()
    if t.startswith("[") and t.endswith("]"):
        t = t[1:-1]
    return [x.strip() for x in t.split(",") if x.strip()]


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_ALIASES = {"method": "methods", "sigma": "sigma_list", "sigmas": "sigma_list"}


def _convert(key: str, text: str) -> Any:
    f = _FIELDS[key]
    default = f.default
    try:
        if isinstance(default, bool):
            return _parse_bool(text)
        if isinstance(default, int):
            return int(text.strip(), 0)
        if isinstance(default, float):
            return float(text)
        if key == "sigma_list":
            return tuple(float(x) for x in _split_list(text))
        if key == "methods":
            return tuple(MethodKind.parse(x).value for x in _split_list(text))
        return text.strip()
    except (ValueError, ConfigurationError):
        raise ConfigurationError(f"{key}: cannot parse {text!r}") from None


def parse_pairs(pairs: Iterable[tuple[str, str]], base: ScenarioConfig | None = None) -> ScenarioConfig:
    changes: dict[str, Any] = {}
    for key, text in pairs:
        k = _ALIASES.get(key.strip(), key.strip())
        if k not in _FIELDS:
            raise ConfigurationError(f"{key}: unknown configuration key")
        changes[k] = _convert(k, text)
    return dataclasses.replace(base or ScenarioConfig(), **changes)


def read_pairs(text: str) -> list[tuple[str, str]]:
    """Parse ``key = value`` lines; '#' starts a comment.

    Lines of the form ``# key = value`` at the top of a CSV (the
    reproducibility header) are accepted too, so an output file can be fed
    back as a config.
    """
    pairs = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body and body.split("=", 1)[0].strip() in _FIELDS:
                line = body
            else:
                continue
        elif "#" in line:
            line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            if "," in line:
                break  # CSV body after the header
            raise ConfigurationError(f"line {n}: expected key = value")
        k, v = line.split("=", 1)
        pairs.append((k.strip(), v.strip()))
    return pairs


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> ScenarioConfig:
    """Defaults, then the file, then overrides (already typed or text)."""
    cfg = ScenarioConfig()
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigurationError(f"cannot read config {path}: {e.strerror}") from None
        cfg = parse_pairs(read_pairs(text), cfg)
    if overrides:
        typed = {}
        for k, v in overrides.items():
            k = _ALIASES.get(k, k)
            if k not in _FIELDS:
                raise ConfigurationError(f"{k}: unknown configuration key")
            typed[k] = _convert(k, v) if isinstance(v, str) else v
        cfg = dataclasses.replace(cfg, **typed)
    return cfg
