"""Shared domain vocabulary: states, reacts, arousal levels, sensor samples,
identities, and messages.

Every enumeration member has a canonical lower_snake_case string name (its
``.value``) used verbatim in the wire protocol, trace files, and persistence.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum, IntEnum

UserId = str
PairId = str
MessageId = str

BPM_FLOOR = 20.0
BPM_CEIL = 250.0


class StateFamily(str, Enum):
    EMOTIONS = "emotions"
    ACTIVITIES = "activities"
    GREETINGS = "greetings"
    AFFECTION = "affection"

    def __str__(self) -> str:
        return self.value


class StateKind(str, Enum):
    # Emotions
    EXCITED = "excited"
    CALM = "calm"
    ANGRY = "angry"
    SAD = "sad"
    SURPRISED = "surprised"
    BORED = "bored"
    NEUTRAL = "neutral"
    # Activities
    EATING = "eating"
    SLEEPING = "sleeping"
    WALKING = "walking"
    RUNNING = "running"
    EXERCISE = "exercise"
    # Greetings
    WAVING = "waving"
    # Affection
    HUGGING = "hugging"
    HANDHOLDING = "handholding"

    def __str__(self) -> str:
        return self.value


_STATE_FAMILY: dict[StateKind, StateFamily] = {
    StateKind.EXCITED: StateFamily.EMOTIONS,
    StateKind.CALM: StateFamily.EMOTIONS,
    StateKind.ANGRY: StateFamily.EMOTIONS,
    StateKind.SAD: StateFamily.EMOTIONS,
    StateKind.SURPRISED: StateFamily.EMOTIONS,
    StateKind.BORED: StateFamily.EMOTIONS,
    StateKind.NEUTRAL: StateFamily.EMOTIONS,
    StateKind.EATING: StateFamily.ACTIVITIES,
    StateKind.SLEEPING: StateFamily.ACTIVITIES,
    StateKind.WALKING: StateFamily.ACTIVITIES,
    StateKind.RUNNING: StateFamily.ACTIVITIES,
    StateKind.EXERCISE: StateFamily.ACTIVITIES,
    StateKind.WAVING: StateFamily.GREETINGS,
    StateKind.HUGGING: StateFamily.AFFECTION,
    StateKind.HANDHOLDING: StateFamily.AFFECTION,
}

# Catalog listing order doubles as presentation order everywhere.
EMOTION_STATES: tuple[StateKind, ...] = tuple(
    s for s in StateKind if _STATE_FAMILY[s] is StateFamily.EMOTIONS
)
ACTIVITY_STATES: tuple[StateKind, ...] = tuple(
    s for s in StateKind if _STATE_FAMILY[s] is StateFamily.ACTIVITIES
)
SOCIAL_STATES: tuple[StateKind, ...] = (
    StateKind.WAVING,
    StateKind.HUGGING,
    StateKind.HANDHOLDING,
)
NON_SOCIAL_STATES: tuple[StateKind, ...] = ACTIVITY_STATES + EMOTION_STATES


def family_of(state: StateKind) -> StateFamily:
    """Family of a state; total over the 15-state catalog."""
    return _STATE_FAMILY[state]


def is_social(state: StateKind) -> bool:
    """True iff the state is a greeting or affection animation."""
    return _STATE_FAMILY[state] in (StateFamily.GREETINGS, StateFamily.AFFECTION)


class ReactFamily(str, Enum):
    EMOTIONS = "emotions"
    ACKNOWLEDGEMENT = "acknowledgement"
    CARING = "caring"
    FOLLOW_UP = "follow_up"

    def __str__(self) -> str:
        return self.value


class ReactKind(str, Enum):
    # Emotions
    EXCITED = "excited"
    CALM = "calm"
    ANGRY = "angry"
    SAD = "sad"
    SURPRISED = "surprised"
    BORED = "bored"
    # Acknowledgement
    THUMBS_UP = "thumbs_up"
    NODDING = "nodding"
    # Caring
    HUGGING = "hugging"
    HANDHOLDING = "handholding"
    LOVE = "love"
    PAT_ON_THE_BACK = "pat_on_the_back"
    # Follow-up
    QUESTION = "question"
    CALL_ME = "call_me"

    def __str__(self) -> str:
        return self.value


_REACT_FAMILY: dict[ReactKind, ReactFamily] = {
    ReactKind.EXCITED: ReactFamily.EMOTIONS,
    ReactKind.CALM: ReactFamily.EMOTIONS,
    ReactKind.ANGRY: ReactFamily.EMOTIONS,
    ReactKind.SAD: ReactFamily.EMOTIONS,
    ReactKind.SURPRISED: ReactFamily.EMOTIONS,
    ReactKind.BORED: ReactFamily.EMOTIONS,
    ReactKind.THUMBS_UP: ReactFamily.ACKNOWLEDGEMENT,
    ReactKind.NODDING: ReactFamily.ACKNOWLEDGEMENT,
    ReactKind.HUGGING: ReactFamily.CARING,
    ReactKind.HANDHOLDING: ReactFamily.CARING,
    ReactKind.LOVE: ReactFamily.CARING,
    ReactKind.PAT_ON_THE_BACK: ReactFamily.CARING,
    ReactKind.QUESTION: ReactFamily.FOLLOW_UP,
    ReactKind.CALL_ME: ReactFamily.FOLLOW_UP,
}

REACT_CATALOG: tuple[ReactKind, ...] = tuple(ReactKind)

# The fixed quick-react set, sendable straight from a notification.
QUICK_REACTS: tuple[ReactKind, ...] = (
    ReactKind.LOVE,
    ReactKind.NODDING,
    ReactKind.HANDHOLDING,
    ReactKind.HUGGING,
)


def react_family_of(react: ReactKind) -> ReactFamily:
    return _REACT_FAMILY[react]


class ArousalLevel(IntEnum):
    """Intensity bands derived from heart rate, totally ordered."""

    LOW = 0
    NEUTRAL = 1
    HIGH = 2
    VERY_HIGH = 3

    @property
    def canonical(self) -> str:
        return self.name.lower()

    @classmethod
    def from_canonical(cls, name: str) -> "ArousalLevel":
        return cls[name.upper()]


class MotionLabel(str, Enum):
    STATIONARY = "stationary"
    WALKING = "walking"
    RUNNING = "running"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


class Mode(str, Enum):
    SENSING_OFF = "sensing_off"
    SENSING_ON = "sensing_on"

    def __str__(self) -> str:
        return self.value


class MessageKind(str, Enum):
    STATE_SHARE = "state_share"
    REACT_SHARE = "react_share"

    def __str__(self) -> str:
        return self.value


class Provenance(str, Enum):
    SENSED_LIST = "sensed_list"
    RANDOM_LIST = "random_list"
    NOTIFICATION_SHARE = "notification_share"
    QUICK_REACT = "quick_react"
    IN_APP_REACT = "in_app_react"

    def __str__(self) -> str:
        return self.value


SHARE_PROVENANCES = (
    Provenance.SENSED_LIST,
    Provenance.RANDOM_LIST,
    Provenance.NOTIFICATION_SHARE,
)
REACT_PROVENANCES = (Provenance.QUICK_REACT, Provenance.IN_APP_REACT)


@dataclass(frozen=True)
class HeartRateSample:
    """One heart-rate reading; timestamps are UTC unix seconds."""

    t: float
    bpm: float

    def __post_init__(self) -> None:
        if not BPM_FLOOR < self.bpm < BPM_CEIL:
            raise ValueError(f"bpm out of range ({BPM_FLOOR}, {BPM_CEIL}): {self.bpm}")


@dataclass(frozen=True)
class DailyProfile:
    """Per-day heart-rate anchors from which arousal thresholds derive."""

    date: dt.date
    min_hr: float
    resting_hr: float
    walking_hr: float
    max_hr: float

    def __post_init__(self) -> None:
        chain = (self.min_hr, self.resting_hr, self.walking_hr, self.max_hr)
        if not (BPM_FLOOR < chain[0] and chain[3] < BPM_CEIL):
            raise ValueError(f"profile anchors out of range: {chain}")
        if not (chain[0] <= chain[1] <= chain[2] <= chain[3]):
            raise ValueError(f"profile anchors not ordered: {chain}")


@dataclass(frozen=True)
class OtterMessage:
    """A timestamped state-share or react-share between paired users.

    A react always references the state share it answers; a react can never
    reference another react.
    """

    id: MessageId
    pair: PairId
    sender: UserId
    kind: MessageKind
    sent_at: float
    provenance: Provenance
    state: StateKind | None = None
    react: ReactKind | None = None
    ref: MessageId | None = field(default=None)

    def __post_init__(self) -> None:
        if self.kind is MessageKind.STATE_SHARE:
            if self.state is None or self.react is not None or self.ref is not None:
                raise ValueError("state share must carry a state and nothing else")
            if self.provenance not in SHARE_PROVENANCES:
                raise ValueError(f"bad share provenance: {self.provenance}")
        else:
            if self.react is None or self.ref is None or self.state is not None:
                raise ValueError("react share must carry a react and a reference")
            if self.provenance not in REACT_PROVENANCES:
                raise ValueError(f"bad react provenance: {self.provenance}")
