"""Synthetic sensor traces: a day plan of activity segments becomes a stream
of heart-rate samples (one per minute, Gaussian noise around per-segment
anchors), motion labels at segment starts, and a daily profile event.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .model import BPM_CEIL, BPM_FLOOR, DailyProfile
from .seeds import derive_rng

MINUTES_PER_DAY = 1440

# Where each activity's heart rate sits between the profile anchors.
SEGMENT_ACTIVITIES = ("sleep", "sedentary", "walk", "run", "workout", "meal")

SEGMENT_MOTION = {
    "sleep": "stationary",
    "sedentary": "stationary",
    "walk": "walking",
    "run": "running",
    "workout": "stationary",
    "meal": "stationary",
}


class PlanGap(Exception):
    """Day-plan segments must tile the full 24 hours."""


@dataclass(frozen=True)
class Segment:
    start_min: int
    end_min: int
    activity: str

    def __post_init__(self) -> None:
        if self.activity not in SEGMENT_ACTIVITIES:
            raise ValueError(f"unknown activity {self.activity!r}")
        if not 0 <= self.start_min < self.end_min <= MINUTES_PER_DAY:
            raise ValueError(f"bad segment bounds: {self.start_min}..{self.end_min}")


@dataclass(frozen=True)
class DayPlan:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        cursor = 0
        for seg in self.segments:
            if seg.start_min != cursor:
                raise PlanGap(f"plan leaves minutes {cursor}..{seg.start_min} uncovered")
            cursor = seg.end_min
        if cursor != MINUTES_PER_DAY:
            raise PlanGap(f"plan leaves minutes {cursor}..{MINUTES_PER_DAY} uncovered")

    def activity_at(self, minute_of_day: int) -> str:
        for seg in self.segments:
            if seg.start_min <= minute_of_day < seg.end_min:
                return seg.activity
        raise PlanGap(f"no segment covers minute {minute_of_day}")


def segment_anchor(activity: str, profile: DailyProfile) -> float:
    """Anchor bpm for a segment, placed so the intended arousal band holds
    under the default thresholds (walk sits on walking_hr, run in the high
    band, workout in the very-high band)."""
    span = profile.max_hr - profile.walking_hr
    anchors = {
        "sleep": profile.min_hr,
        "sedentary": profile.resting_hr,
        "walk": profile.walking_hr,
        "run": profile.walking_hr + 0.25 * span,
        "workout": profile.walking_hr + 0.75 * span,
        "meal": (profile.resting_hr + profile.walking_hr) / 2,
    }
    return anchors[activity]


def _parse_hhmm(text: str) -> int:
    hh, mm = text.split(":")
    return int(hh) * 60 + int(mm)


def load_plan(path: str | Path) -> tuple[DayPlan, DailyProfile, float]:
    """Read a plan file: profile anchors, segments, and noise sigma."""
    import datetime as dt

    data = tomllib.loads(Path(path).read_text(encoding="utf-8"))
    prof = data["profile"]
    profile = DailyProfile(
        date=dt.date.fromisoformat(prof.get("date", "1970-01-01")),
        min_hr=float(prof["min_hr"]),
        resting_hr=float(prof["resting_hr"]),
        walking_hr=float(prof["walking_hr"]),
        max_hr=float(prof["max_hr"]),
    )
    segments = tuple(
        Segment(
            start_min=_parse_hhmm(seg["start"]),
            end_min=_parse_hhmm(seg["end"]) if seg["end"] != "24:00" else MINUTES_PER_DAY,
            activity=seg["activity"],
        )
        for seg in data["segment"]
    )
    sigma = float(data.get("generator", {}).get("noise_sigma", 2.0))
    return DayPlan(segments), profile, sigma


DEFAULT_PLAN = DayPlan(
    (
        Segment(0, 7 * 60, "sleep"),
        Segment(7 * 60, 8 * 60, "sedentary"),
        Segment(8 * 60, 8 * 60 + 30, "walk"),
        Segment(8 * 60 + 30, 12 * 60, "sedentary"),
        Segment(12 * 60, 12 * 60 + 45, "meal"),
        Segment(12 * 60 + 45, 17 * 60 + 30, "sedentary"),
        Segment(17 * 60 + 30, 18 * 60 + 15, "run"),
        Segment(18 * 60 + 15, 19 * 60, "meal"),
        Segment(19 * 60, 20 * 60, "workout"),
        Segment(20 * 60, 23 * 60, "sedentary"),
        Segment(23 * 60, MINUTES_PER_DAY, "sleep"),
    )
)

DEFAULT_PROFILE = {
    "min_hr": 50.0,
    "resting_hr": 65.0,
    "walking_hr": 95.0,
    "max_hr": 180.0,
}


def generate_trace(
    plan: DayPlan,
    profile: DailyProfile,
    seed: int,
    days: int = 1,
    start: float = 0.0,
    noise_sigma: float = 2.0,
    tz_offset_mins: int = 0,
) -> list[dict]:
    """Deterministic trace events covering ``days`` whole local days.

    ``start`` must be a local midnight expressed in UTC seconds. Events per
    day: one profile record, a motion label per segment, one heart-rate
    sample per minute.
    """
    import datetime as dt

    rng = derive_rng(seed, "trace")
    events: list[dict] = []
    for day in range(days):
        day_start = start + day * 86400.0
        date = dt.datetime.fromtimestamp(
            day_start + tz_offset_mins * 60, tz=dt.timezone.utc
        ).date()
        events.append(
            {
                "t": day_start,
                "kind": "profile",
                "payload": {
                    "date": date.isoformat(),
                    "min_hr": profile.min_hr,
                    "resting_hr": profile.resting_hr,
                    "walking_hr": profile.walking_hr,
                    "max_hr": profile.max_hr,
                },
            }
        )
        for seg in plan.segments:
            events.append(
                {
                    "t": day_start + seg.start_min * 60.0,
                    "kind": "motion",
                    "payload": {"label": SEGMENT_MOTION[seg.activity]},
                }
            )
            anchor = segment_anchor(seg.activity, profile)
            for minute in range(seg.start_min, seg.end_min):
                bpm = anchor + rng.gauss(0.0, noise_sigma)
                bpm = min(max(bpm, BPM_FLOOR + 1.0), BPM_CEIL - 1.0)
                events.append(
                    {
                        "t": day_start + minute * 60.0,
                        "kind": "hr",
                        "payload": {"bpm": round(bpm, 2)},
                    }
                )
    events.sort(key=lambda e: (e["t"], e["kind"]))
    return events


def write_trace(events: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


def read_trace(path: str | Path) -> list[dict]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                events.append(json.loads(line))
    return events
