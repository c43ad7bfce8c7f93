"""Service configuration: threshold parameters, the arousal-to-emotion
quadrant map, notification timing, active hours, timezone defaults.

Loaded from a TOML file; every field has the documented default so an empty
config is a complete one. ``otterlink config show`` prints the effective
values.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .model import ArousalLevel, Mode, StateKind


@dataclass(frozen=True)
class ThresholdConfig:
    """Knobs for deriving arousal thresholds from a daily profile."""

    kappa: float = 0.5
    widen_epsilon: float = 1.0
    staleness_mins: float = 15.0


# Which emotion states each arousal band makes available.
DEFAULT_QUADRANT_MAP: dict[ArousalLevel, tuple[StateKind, ...]] = {
    ArousalLevel.LOW: (StateKind.CALM, StateKind.SAD, StateKind.BORED),
    ArousalLevel.NEUTRAL: (StateKind.NEUTRAL,),
    ArousalLevel.HIGH: (StateKind.EXCITED, StateKind.ANGRY, StateKind.SURPRISED),
    ArousalLevel.VERY_HIGH: (StateKind.EXCITED, StateKind.ANGRY, StateKind.SURPRISED),
}


@dataclass(frozen=True)
class NotifierConfig:
    min_gap_mins: float = 45.0
    jitter_mins: float = 45.0
    active_start_min: int = 8 * 60
    active_end_min: int = 22 * 60
    drop_probability: float = 0.0

    def __post_init__(self) -> None:
        if not 0 <= self.active_start_min < self.active_end_min <= 1440:
            raise ValueError("active hours must satisfy 0 <= start < end <= 1440")
        if not 0.0 <= self.drop_probability <= 1.0:
            raise ValueError("drop_probability must be in [0, 1]")


@dataclass(frozen=True)
class ServiceConfig:
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    quadrant_map: dict[ArousalLevel, tuple[StateKind, ...]] = field(
        default_factory=lambda: dict(DEFAULT_QUADRANT_MAP)
    )
    notifier: NotifierConfig = field(default_factory=NotifierConfig)
    default_mode: Mode = Mode.SENSING_OFF
    default_tz_offset_mins: int = 0
    offline_buffer_depth: int = 1000
    seed: int = 0


def parse_active_hours(text: str) -> tuple[int, int]:
    """Parse ``"08:00-22:00"`` into minutes of day."""
    m = re.fullmatch(r"(\d{1,2}):(\d{2})-(\d{1,2}):(\d{2})", text.strip())
    if not m:
        raise ValueError(f"bad active-hours spec: {text!r} (want HH:MM-HH:MM)")
    start = int(m.group(1)) * 60 + int(m.group(2))
    end = int(m.group(3)) * 60 + int(m.group(4))
    return start, end


def _parse_quadrants(raw: dict) -> dict[ArousalLevel, tuple[StateKind, ...]]:
    quadrants = dict(DEFAULT_QUADRANT_MAP)
    for key, names in raw.items():
        level = ArousalLevel.from_canonical(key)
        quadrants[level] = tuple(StateKind(n) for n in names)
    return quadrants


def load_config(path: str | Path | None) -> ServiceConfig:
    cfg = ServiceConfig()
    if path is None:
        return cfg
    data = tomllib.loads(Path(path).read_text(encoding="utf-8"))

    th = data.get("thresholds", {})
    thresholds = ThresholdConfig(
        kappa=float(th.get("kappa", cfg.thresholds.kappa)),
        widen_epsilon=float(th.get("widen_epsilon", cfg.thresholds.widen_epsilon)),
        staleness_mins=float(th.get("staleness_mins", cfg.thresholds.staleness_mins)),
    )

    no = data.get("notifications", {})
    start, end = cfg.notifier.active_start_min, cfg.notifier.active_end_min
    if "active_hours" in no:
        start, end = parse_active_hours(no["active_hours"])
    notifier = NotifierConfig(
        min_gap_mins=float(no.get("min_gap_mins", cfg.notifier.min_gap_mins)),
        jitter_mins=float(no.get("jitter_mins", cfg.notifier.jitter_mins)),
        active_start_min=start,
        active_end_min=end,
        drop_probability=float(no.get("drop_probability", cfg.notifier.drop_probability)),
    )

    sv = data.get("service", {})
    return replace(
        cfg,
        thresholds=thresholds,
        quadrant_map=_parse_quadrants(data.get("quadrants", {})),
        notifier=notifier,
        default_mode=Mode(sv.get("default_mode", cfg.default_mode.value)),
        default_tz_offset_mins=int(sv.get("tz_offset_mins", cfg.default_tz_offset_mins)),
        offline_buffer_depth=int(sv.get("offline_buffer_depth", cfg.offline_buffer_depth)),
        seed=int(sv.get("seed", cfg.seed)),
    )


def render_config(cfg: ServiceConfig) -> str:
    """Effective configuration as TOML text (what ``config show`` prints)."""
    lines = [
        "[thresholds]",
        f"kappa = {cfg.thresholds.kappa}",
        f"widen_epsilon = {cfg.thresholds.widen_epsilon}",
        f"staleness_mins = {cfg.thresholds.staleness_mins}",
        "",
        "[quadrants]",
    ]
    for level in ArousalLevel:
        names = ", ".join(f'"{s.value}"' for s in cfg.quadrant_map[level])
        lines.append(f"{level.canonical} = [{names}]")
    lines += [
        "",
        "[notifications]",
        f"min_gap_mins = {cfg.notifier.min_gap_mins}",
        f"jitter_mins = {cfg.notifier.jitter_mins}",
        'active_hours = "{:02d}:{:02d}-{:02d}:{:02d}"'.format(
            cfg.notifier.active_start_min // 60,
            cfg.notifier.active_start_min % 60,
            cfg.notifier.active_end_min // 60,
            cfg.notifier.active_end_min % 60,
        ),
        f"drop_probability = {cfg.notifier.drop_probability}",
        "",
        "[service]",
        f'default_mode = "{cfg.default_mode.value}"',
        f"tz_offset_mins = {cfg.default_tz_offset_mins}",
        f"offline_buffer_depth = {cfg.offline_buffer_depth}",
        f"seed = {cfg.seed}",
    ]
    return "\n".join(lines) + "\n"
