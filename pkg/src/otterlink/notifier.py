"""The three notification kinds and their timing rules.

Partner-state and partner-react notifications are triggered by messages;
own-state suggestions are time-based, at least 45 minutes apart, jittered,
and confined to active hours.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .config import NotifierConfig
from .model import (
    QUICK_REACTS,
    MessageId,
    MessageKind,
    Mode,
    OtterMessage,
    ReactKind,
    StateKind,
    UserId,
    is_social,
)
from .seeds import derive_rng
from .sensing import StateList


class NotificationKind(str, Enum):
    PARTNER_STATE_VISIT = "partner_state_visit"
    PARTNER_REACT = "partner_react"
    OWN_STATE_SUGGESTION = "own_state_suggestion"

    def __str__(self) -> str:
        return self.value


class EmptyChoiceSet(Exception):
    """A sensed list with no non-social state; impossible by construction."""


@dataclass(frozen=True)
class Notification:
    kind: NotificationKind
    recipient: UserId
    created_at: float
    state: StateKind | None = None
    react: ReactKind | None = None
    ref: MessageId | None = None
    quick_reacts: tuple[ReactKind, ...] | None = None
    sensed_badge: bool | None = None
    actions: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind is NotificationKind.PARTNER_STATE_VISIT:
            if self.quick_reacts != QUICK_REACTS:
                raise ValueError("partner-state visit must carry the 4 quick reacts")
        if self.kind is NotificationKind.OWN_STATE_SUGGESTION:
            if self.sensed_badge is None:
                raise ValueError("own-state suggestion must carry the badge flag")


def on_state_share(msg: OtterMessage, recipient: UserId) -> Notification:
    """Partner-state visit: state icon plus the four quick reacts."""
    if msg.kind is not MessageKind.STATE_SHARE:
        raise ValueError(f"not a state share: {msg.kind}")
    return Notification(
        kind=NotificationKind.PARTNER_STATE_VISIT,
        recipient=recipient,
        created_at=msg.sent_at,
        state=msg.state,
        ref=msg.id,
        quick_reacts=QUICK_REACTS,
    )


def on_react_share(
    msg: OtterMessage, referenced_state: StateKind, recipient: UserId
) -> Notification:
    """Partner-react notification, addressed to the original state sender;
    carries the referenced state for the open flow."""
    if msg.kind is not MessageKind.REACT_SHARE:
        raise ValueError(f"not a react share: {msg.kind}")
    return Notification(
        kind=NotificationKind.PARTNER_REACT,
        recipient=recipient,
        created_at=msg.sent_at,
        react=msg.react,
        state=referenced_state,
        ref=msg.id,
    )


def _clip_to_active_hours(t: float, tz_offset_mins: int, config: NotifierConfig) -> float:
    """Move an instant forward to the nearest point inside active hours."""
    shift = tz_offset_mins * 60
    local = t + shift
    second_of_day = local % 86400
    start = config.active_start_min * 60
    end = config.active_end_min * 60
    if start <= second_of_day < end:
        return t
    day = local // 86400
    if second_of_day < start:
        return day * 86400 + start - shift
    return (day + 1) * 86400 + start - shift


def next_suggestion_time(
    last: float | None,
    now: float,
    seed: int,
    tz_offset_mins: int,
    config: NotifierConfig = NotifierConfig(),
) -> float:
    """Next own-state suggestion instant: the 45-minute floor after the last
    one, plus uniform jitter, deferred into active hours. Deterministic in
    (seed, last, now)."""
    floor = now if last is None else max(last + config.min_gap_mins * 60, now)
    jitter = derive_rng(seed, "jitter", last, now).uniform(0, config.jitter_mins * 60)
    return _clip_to_active_hours(floor + jitter, tz_offset_mins, config)


def own_state_suggestion(
    mode: Mode,
    current: StateList,
    seed: int,
    wid: int,
    recipient: UserId,
    now: float,
) -> Notification:
    """Pick the suggested state from the user's current-window list.

    Sensing on draws from the non-social states and badges the notification;
    sensing off draws from the whole random list, no badge.
    """
    if mode is Mode.SENSING_ON:
        choices = [s for s in current.states if not is_social(s)]
        if not choices:
            raise EmptyChoiceSet(f"sensed list {current.states} has no non-social state")
    else:
        choices = list(current.states)
    pick = derive_rng(seed, wid, "suggest").choice(choices)
    return Notification(
        kind=NotificationKind.OWN_STATE_SUGGESTION,
        recipient=recipient,
        created_at=now,
        state=pick,
        sensed_badge=mode is Mode.SENSING_ON,
        actions=("share", "dismiss"),
    )
