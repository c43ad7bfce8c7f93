"""Independent log verifier.

Re-derives every expectation (thresholds, arousal bands, activity predicates,
windows, spacing, react legality) from the raw records alone, using its own
string-level implementations rather than the engine's code paths. A clean
system produces zero violations; each violation carries the offending record
index.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from statistics import median

# Independent copies of the domain constants, on purpose: the verifier must
# not inherit a bug from the engine's registries.
SOCIAL = ("waving", "hugging", "handholding")
ALL_STATES = (
    "excited",
    "calm",
    "angry",
    "sad",
    "surprised",
    "bored",
    "neutral",
    "eating",
    "sleeping",
    "walking",
    "running",
    "exercise",
) + SOCIAL
QUICK = ("love", "nodding", "handholding", "hugging")
ALL_REACTS = (
    "excited",
    "calm",
    "angry",
    "sad",
    "surprised",
    "bored",
    "thumbs_up",
    "nodding",
    "hugging",
    "handholding",
    "love",
    "pat_on_the_back",
    "question",
    "call_me",
)

EMOTION_STATES = ("excited", "calm", "angry", "sad", "surprised", "bored", "neutral")
EMOTIONS_BY_AROUSAL = {
    "low": ("calm", "sad", "bored"),
    "neutral": ("neutral",),
    "high": ("excited", "angry", "surprised"),
    "very_high": ("excited", "angry", "surprised"),
}
MEAL_MINUTES = ((660, 840), (1020, 1200))
SLEEP_MINUTES = ((1320, 1440), (0, 480))

MIN_GAP_SECONDS = 45 * 60
WINDOW_SECONDS = 600
STALENESS_SECONDS = 15 * 60
KAPPA = 0.5
EPSILON = 1.0


@dataclass
class Violation:
    check: str
    index: int
    detail: str


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)
    records: int = 0
    checked_lists: int = 0
    checked_shares: int = 0
    checked_reacts: int = 0
    checked_suggestions: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, check: str, index: int, detail: str) -> None:
        self.violations.append(Violation(check, index, detail))

    def render(self) -> str:
        lines = [
            f"records: {self.records}",
            f"lists checked: {self.checked_lists}",
            f"shares checked: {self.checked_shares}",
            f"reacts checked: {self.checked_reacts}",
            f"suggestions checked: {self.checked_suggestions}",
            f"violations: {len(self.violations)}",
        ]
        for v in self.violations:
            lines.append(f"  [{v.check}] record {v.index}: {v.detail}")
        return "\n".join(lines)


class _UserTrack:
    """Raw sensor history rebuilt straight from the log."""

    def __init__(self) -> None:
        self.hr_t: list[float] = []
        self.hr_v: list[float] = []
        self.motion_t: list[float] = []
        self.motion_v: list[str] = []
        self.profiles: list[tuple[str, tuple[float, float, float, float]]] = []
        self.tz_offset_mins = 0
        self.suggestion_times: list[float] = []
        self.last_suggestion: dict | None = None
        self.served: dict[int, dict] = {}

    def add_event(self, event: dict) -> None:
        t = float(event["t"])
        payload = event["payload"]
        if event["kind"] == "hr":
            self.hr_t.append(t)
            self.hr_v.append(float(payload["bpm"]))
        elif event["kind"] == "motion":
            self.motion_t.append(t)
            self.motion_v.append(payload["label"])
        else:
            self.profiles.append(
                (
                    payload["date"],
                    (
                        float(payload["min_hr"]),
                        float(payload["resting_hr"]),
                        float(payload["walking_hr"]),
                        float(payload["max_hr"]),
                    ),
                )
            )

    def motion_at(self, t: float) -> str:
        i = bisect_right(self.motion_t, t)
        return self.motion_v[i - 1] if i else "unknown"

    def median_bpm(self, t: float) -> float | None:
        lo = bisect_left(self.hr_t, t - STALENESS_SECONDS)
        hi = bisect_right(self.hr_t, t)
        values = self.hr_v[lo:hi]
        return median(values) if values else None

    def profile_at(self, t: float) -> tuple[float, float, float, float] | None:
        local_date = _local_date(t, self.tz_offset_mins)
        candidates = [p for d, p in self.profiles if d <= local_date]
        return candidates[-1] if candidates else None

    def arousal_at(self, t: float) -> str:
        profile = self.profile_at(t)
        bpm = self.median_bpm(t)
        if profile is None or bpm is None:
            return "neutral"
        min_hr, resting, walking, max_hr = profile
        low = resting if resting > min_hr else min_hr + EPSILON
        mid = max(walking, low + EPSILON)
        high = max(walking + KAPPA * (max_hr - walking), mid + EPSILON)
        if bpm < low:
            return "low"
        if bpm < mid:
            return "neutral"
        if bpm < high:
            return "high"
        return "very_high"


def _local_date(t: float, tz_offset_mins: int) -> str:
    import datetime as dt

    return (
        dt.datetime.fromtimestamp(t + tz_offset_mins * 60, tz=dt.timezone.utc)
        .date()
        .isoformat()
    )


def _local_minute(t: float, tz_offset_mins: int) -> int:
    return int((t + tz_offset_mins * 60) // 60) % 1440


def _in_any(minute: int, windows) -> bool:
    return any(lo <= minute < hi for lo, hi in windows)


def _predicate_holds(state: str, arousal: str, motion: str, minute: int) -> bool:
    if state in EMOTION_STATES:
        return state in EMOTIONS_BY_AROUSAL[arousal]
    if state == "eating":
        return _in_any(minute, MEAL_MINUTES) and arousal in ("neutral", "high")
    if state == "sleeping":
        return _in_any(minute, SLEEP_MINUTES) and arousal in ("low", "neutral")
    if state == "walking":
        return motion == "walking"
    if state == "running":
        return motion == "running"
    if state == "exercise":
        return arousal in ("high", "very_high")
    return False  # social states are not predicate states


def verify(records: list[dict]) -> Report:
    report = Report(records=len(records))
    users: dict[str, _UserTrack] = {}
    pair_mode: dict[str, str] = {}
    pair_users: dict[str, tuple[str, str]] = {}
    shares: dict[str, dict] = {}
    share_serve_at: dict[str, float] = {}
    reacted: dict[str, int] = {}
    pending_share_notif: dict[str, int] = {}
    pending_react_notif: dict[str, int] = {}

    for idx, record in enumerate(records):
        rtype = record["type"]
        body = record["body"]
        t = record["t"]

        if rtype == "register":
            track = _UserTrack()
            track.tz_offset_mins = body.get("tz_offset_mins", 0)
            users[body["user"]] = track

        elif rtype == "pair":
            pair_mode[body["pair"]] = body["mode"]
            pair_users[body["pair"]] = tuple(body["users"])

        elif rtype == "set_mode":
            pair_mode[body["pair"]] = body["mode"]

        elif rtype == "sensor_event":
            users[body["user"]].add_event(body["event"])

        elif rtype == "serve_list":
            report.checked_lists += 1
            track = users[body["user"]]
            states = body["states"]
            _check_list_shape(report, idx, states)
            if body["window_id"] != int(body["at"] // WINDOW_SECONDS):
                report.add(
                    "window_id",
                    idx,
                    f"window {body['window_id']} != floor({body['at']}/600)",
                )
            previous = track.served.get(body["window_id"])
            if previous is not None and previous["states"] != states:
                report.add(
                    "window_stability",
                    idx,
                    f"window {body['window_id']} re-served with different states",
                )
            track.served[body["window_id"]] = body
            if body["mode"] == "sensing_on":
                _check_sensed_soundness(report, idx, track, body)

        elif rtype == "own_suggestion":
            report.checked_suggestions += 1
            track = users[body["user"]]
            mode = _mode_of_user(body["user"], pair_users, pair_mode)
            if body["sensed_badge"] != (mode == "sensing_on"):
                report.add(
                    "badge",
                    idx,
                    f"badge {body['sensed_badge']} but mode {mode}",
                )
            served = track.served.get(body["window_id"])
            if served is None:
                report.add("suggestion_source", idx, "no served list for window")
            else:
                if body["state"] not in served["states"]:
                    report.add(
                        "suggestion_source",
                        idx,
                        f"{body['state']} not on the window list",
                    )
                if mode == "sensing_on" and body["state"] in SOCIAL:
                    report.add(
                        "suggestion_source",
                        idx,
                        f"sensed suggestion drew social state {body['state']}",
                    )
            if track.suggestion_times:
                gap = body["fired_at"] - track.suggestion_times[-1]
                if gap < MIN_GAP_SECONDS - 1e-6:
                    report.add(
                        "suggestion_gap",
                        idx,
                        f"gap {gap:.0f}s < {MIN_GAP_SECONDS}s",
                    )
            track.suggestion_times.append(body["fired_at"])
            track.last_suggestion = body

        elif rtype == "share_state":
            report.checked_shares += 1
            track = users[body["user"]]
            mode = _mode_of_user(body["user"], pair_users, pair_mode)
            state = body["state"]
            if state not in ALL_STATES:
                report.add("share_catalog", idx, f"unknown state {state}")
            wid = int(t // WINDOW_SECONDS)
            if body["provenance"] == "notification_share":
                last = track.last_suggestion
                if last is None or last["state"] != state:
                    report.add(
                        "share_membership",
                        idx,
                        f"notification share {state} does not match suggestion",
                    )
                else:
                    served = track.served.get(last["window_id"])
                    share_serve_at[body["id"]] = (
                        served["at"] if served is not None else t
                    )
            else:
                served = track.served.get(wid)
                if served is None or state not in served["states"]:
                    report.add(
                        "share_membership",
                        idx,
                        f"{state} not on the served list for window {wid}",
                    )
                else:
                    share_serve_at[body["id"]] = served["at"]
            if mode == "sensing_on" and state not in SOCIAL:
                at = share_serve_at.get(body["id"], t)
                minute = _local_minute(at, track.tz_offset_mins)
                arousal = track.arousal_at(at)
                motion = track.motion_at(at)
                if not _predicate_holds(state, arousal, motion, minute):
                    report.add(
                        "share_soundness",
                        idx,
                        f"shared {state} fails predicate (arousal={arousal},"
                        f" motion={motion}, minute={minute})",
                    )
            shares[body["id"]] = {"sender": body["user"], "pair": body["pair"]}
            pending_share_notif[body["id"]] = idx

        elif rtype == "send_react":
            report.checked_reacts += 1
            if body["react"] not in ALL_REACTS:
                report.add("react_catalog", idx, f"unknown react {body['react']}")
            if body["via"] == "quick" and body["react"] not in QUICK:
                report.add(
                    "quick_closure",
                    idx,
                    f"quick react {body['react']} outside the fixed set",
                )
            target = shares.get(body["ref"])
            if target is None:
                report.add(
                    "react_bipartite",
                    idx,
                    f"react references {body['ref']}, not a prior state share",
                )
            else:
                if target["sender"] == body["user"]:
                    report.add(
                        "react_bipartite", idx, "react answers the user's own share"
                    )
                if target["pair"] != body["pair"]:
                    report.add("react_bipartite", idx, "react crosses pairs")
                if body["ref"] in reacted:
                    report.add(
                        "double_react",
                        idx,
                        f"{body['ref']} already reacted at record {reacted[body['ref']]}",
                    )
                reacted[body["ref"]] = idx
            pending_react_notif[body["id"]] = idx

        elif rtype == "notification":
            n = body["notification"]
            if n["kind"] == "partner_state_visit":
                ref = n.get("ref")
                if pending_share_notif.pop(ref, None) is None:
                    report.add(
                        "delivery", idx, f"visit notification without share {ref}"
                    )
                if tuple(n.get("quick_reacts", ())) != QUICK:
                    report.add(
                        "quick_closure",
                        idx,
                        f"visit notification quick set {n.get('quick_reacts')}",
                    )
            elif n["kind"] == "partner_react":
                ref = n.get("ref")
                if pending_react_notif.pop(ref, None) is None:
                    report.add(
                        "delivery", idx, f"react notification without react {ref}"
                    )

    for ref, idx in pending_share_notif.items():
        report.add("delivery", idx, f"share {ref} produced no notification")
    for ref, idx in pending_react_notif.items():
        report.add("delivery", idx, f"react {ref} produced no notification")
    return report


def _check_list_shape(report: Report, idx: int, states: list[str]) -> None:
    if not 2 <= len(states) <= 5:
        report.add("list_legality", idx, f"size {len(states)} outside [2, 5]")
    if len(set(states)) != len(states):
        report.add("list_legality", idx, f"duplicates in {states}")
    socials = [s for s in states if s in SOCIAL]
    if len(socials) != 1:
        report.add("list_legality", idx, f"{len(socials)} social states in {states}")
    unknown = [s for s in states if s not in ALL_STATES]
    if unknown:
        report.add("list_legality", idx, f"unknown states {unknown}")


def _check_sensed_soundness(
    report: Report, idx: int, track: _UserTrack, body: dict
) -> None:
    at = body["at"]
    minute = _local_minute(at, track.tz_offset_mins)
    arousal = track.arousal_at(at)
    motion = track.motion_at(at)
    for state in body["states"]:
        if state in SOCIAL:
            continue
        if not _predicate_holds(state, arousal, motion, minute):
            report.add(
                "list_soundness",
                idx,
                f"{state} fails its predicate (arousal={arousal},"
                f" motion={motion}, minute={minute})",
            )


def _mode_of_user(
    uid: str, pair_users: dict[str, tuple[str, str]], pair_mode: dict[str, str]
) -> str:
    for pid, members in pair_users.items():
        if uid in members:
            return pair_mode[pid]
    return "sensing_off"
