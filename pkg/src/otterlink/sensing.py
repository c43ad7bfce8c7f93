"""Arousal classification and per-window state recommendation.

Turns a user's recent sensor history into an arousal level and a recommended
list of 2-5 shareable states, frozen per 10-minute window. Works in both
modes: sensing on (predicate-driven) and sensing off (random draw).
"""

from __future__ import annotations

import logging
import math
import statistics
from dataclasses import dataclass
from typing import Sequence

from .config import DEFAULT_QUADRANT_MAP, ThresholdConfig
from .clock import local_minutes_of_day
from .model import (
    ACTIVITY_STATES,
    EMOTION_STATES,
    NON_SOCIAL_STATES,
    SOCIAL_STATES,
    ArousalLevel,
    DailyProfile,
    HeartRateSample,
    Mode,
    MotionLabel,
    StateKind,
    is_social,
)
from .seeds import derive_rng

logger = logging.getLogger(__name__)

WINDOW_SECONDS = 600

# Local times when the time-based activities are offered (minutes of day).
EATING_WINDOWS = ((11 * 60, 14 * 60), (17 * 60, 20 * 60))
SLEEPING_WINDOWS = ((22 * 60, 24 * 60), (0, 8 * 60))

EATING_AROUSAL = (ArousalLevel.NEUTRAL, ArousalLevel.HIGH)
SLEEPING_AROUSAL = (ArousalLevel.LOW, ArousalLevel.NEUTRAL)
EXERCISE_AROUSAL = (ArousalLevel.HIGH, ArousalLevel.VERY_HIGH)


class StaleSignal(Exception):
    """No heart-rate sample within the staleness horizon."""


@dataclass(frozen=True)
class ArousalThresholds:
    """Strictly increasing bpm boundaries between the four arousal bands."""

    low_upper: float
    neutral_upper: float
    high_upper: float

    def __post_init__(self) -> None:
        if not self.low_upper < self.neutral_upper < self.high_upper:
            raise ValueError(f"thresholds must strictly increase: {self}")


@dataclass(frozen=True)
class StateList:
    """Ordered recommendation of 2-5 states, valid for one window."""

    window_id: int
    mode: Mode
    states: tuple[StateKind, ...]
    social_slot: StateKind

    def __post_init__(self) -> None:
        if not 2 <= len(self.states) <= 5:
            raise ValueError(f"list size out of range: {self.states}")
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"duplicate states: {self.states}")
        socials = [s for s in self.states if is_social(s)]
        if socials != [self.social_slot]:
            raise ValueError(f"exactly one social state required: {self.states}")


@dataclass(frozen=True)
class SensorWindow:
    """Snapshot of one user's sensor inputs at a query instant."""

    samples: Sequence[HeartRateSample]
    motion: MotionLabel
    profile: DailyProfile | None
    now: float
    tz_offset_mins: int = 0

    def local_minute(self) -> int:
        return local_minutes_of_day(self.now, self.tz_offset_mins)


def window_id(now: float) -> int:
    """10-minute bucket index since the epoch."""
    return math.floor(now / WINDOW_SECONDS)


def build_thresholds(
    profile: DailyProfile, config: ThresholdConfig = ThresholdConfig()
) -> ArousalThresholds:
    """Derive band boundaries from the daily anchors.

    low_upper = resting, neutral_upper = walking, and high_upper sits kappa of
    the way from walking to max. Degenerate profiles (coinciding anchors) are
    repaired by widening each boundary epsilon above its neighbour, which may
    push high_upper past max_hr; that beats an unusable partition.
    """
    eps = config.widen_epsilon
    low = profile.resting_hr
    if low <= profile.min_hr:
        low = profile.min_hr + eps
    neutral = max(profile.walking_hr, low + eps)
    high = profile.walking_hr + config.kappa * (profile.max_hr - profile.walking_hr)
    high = max(high, neutral + eps)
    if (
        profile.resting_hr == profile.walking_hr
        or profile.walking_hr == profile.max_hr
    ):
        logger.warning(
            "degenerate profile %s: anchors coincide, widened to (%s, %s, %s)",
            profile,
            low,
            neutral,
            high,
        )
    return ArousalThresholds(low, neutral, high)


def effective_bpm(
    samples: Sequence[HeartRateSample],
    now: float,
    config: ThresholdConfig = ThresholdConfig(),
) -> float:
    """Median bpm over samples within the staleness horizon."""
    horizon = now - config.staleness_mins * 60
    recent = [s.bpm for s in samples if horizon <= s.t <= now]
    if not recent:
        raise StaleSignal(f"no heart-rate sample in the last {config.staleness_mins} min")
    return statistics.median(recent)


def classify_arousal(bpm: float, thresholds: ArousalThresholds) -> ArousalLevel:
    """Band membership with lower-inclusive boundaries."""
    if bpm < thresholds.low_upper:
        return ArousalLevel.LOW
    if bpm < thresholds.neutral_upper:
        return ArousalLevel.NEUTRAL
    if bpm < thresholds.high_upper:
        return ArousalLevel.HIGH
    return ArousalLevel.VERY_HIGH


def window_arousal(
    window: SensorWindow,
    config: ThresholdConfig = ThresholdConfig(),
) -> ArousalLevel:
    """Arousal for a sensor window, falling back to Neutral on a stale or
    profile-less signal rather than failing."""
    if window.profile is None:
        return ArousalLevel.NEUTRAL
    try:
        bpm = effective_bpm(window.samples, window.now, config)
    except StaleSignal:
        return ArousalLevel.NEUTRAL
    return classify_arousal(bpm, build_thresholds(window.profile, config))


def emotion_candidates(
    arousal: ArousalLevel,
    quadrant_map: dict[ArousalLevel, tuple[StateKind, ...]] | None = None,
) -> frozenset[StateKind]:
    quadrants = quadrant_map if quadrant_map is not None else DEFAULT_QUADRANT_MAP
    return frozenset(quadrants[arousal])


def _in_windows(minute: int, windows: tuple[tuple[int, int], ...]) -> bool:
    return any(lo <= minute < hi for lo, hi in windows)


def activity_candidates(
    window: SensorWindow, arousal: ArousalLevel
) -> frozenset[StateKind]:
    """Activity states whose sensing predicate holds for this window."""
    minute = window.local_minute()
    out = set()
    if _in_windows(minute, EATING_WINDOWS) and arousal in EATING_AROUSAL:
        out.add(StateKind.EATING)
    if _in_windows(minute, SLEEPING_WINDOWS) and arousal in SLEEPING_AROUSAL:
        out.add(StateKind.SLEEPING)
    if window.motion is MotionLabel.WALKING:
        out.add(StateKind.WALKING)
    if window.motion is MotionLabel.RUNNING:
        out.add(StateKind.RUNNING)
    if arousal in EXERCISE_AROUSAL:
        out.add(StateKind.EXERCISE)
    return frozenset(out)


def rotate_social(wid: int, user_seed: int) -> StateKind:
    """Deterministic uniform rotation over the greeting/affection states."""
    return derive_rng(user_seed, wid, "social").choice(SOCIAL_STATES)


MAX_NON_SOCIAL = 4


def sensed_list(
    window: SensorWindow,
    wid: int,
    user_seed: int,
    config: ThresholdConfig = ThresholdConfig(),
    quadrant_map: dict[ArousalLevel, tuple[StateKind, ...]] | None = None,
) -> StateList:
    """Recommended states under sensing: the predicate-satisfying activities,
    then emotions, capped at four, plus the rotating social state.

    Activities outrank emotions when truncating; order within a family is the
    catalog listing order. Never fails: a stale signal degrades to Neutral.
    """
    arousal = window_arousal(window, config)
    acts = activity_candidates(window, arousal)
    emos = emotion_candidates(arousal, quadrant_map)
    ordered = [s for s in ACTIVITY_STATES if s in acts]
    ordered += [s for s in EMOTION_STATES if s in emos]
    if not ordered:
        ordered = [StateKind.NEUTRAL]
    states = tuple(ordered[:MAX_NON_SOCIAL]) + (rotate_social(wid, user_seed),)
    return StateList(wid, Mode.SENSING_ON, states, states[-1])


def random_list(wid: int, user_seed: int) -> StateList:
    """Random recommendation: 2-5 states, one uniformly drawn social state,
    the rest drawn without replacement from the 12 non-social states."""
    rng = derive_rng(user_seed, wid, "random_list")
    size = rng.randint(2, 5)
    social = SOCIAL_STATES[rng.randrange(len(SOCIAL_STATES))]
    states = rng.sample(NON_SOCIAL_STATES, size - 1) + [social]
    rng.shuffle(states)
    return StateList(wid, Mode.SENSING_OFF, tuple(states), social)
