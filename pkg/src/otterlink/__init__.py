"""Otterlink: heart-rate-driven state sharing between two partners.

A state-recommendation engine over daily heart-rate anchors, a two-party
share/react protocol, a spacing-aware notification scheduler, a durable
record-log service, and a deterministic trace-replay simulator.
"""

from .model import (
    ArousalLevel,
    DailyProfile,
    HeartRateSample,
    Mode,
    MotionLabel,
    OtterMessage,
    Provenance,
    QUICK_REACTS,
    ReactKind,
    StateFamily,
    StateKind,
    family_of,
    is_social,
)

__all__ = [
    "ArousalLevel",
    "DailyProfile",
    "HeartRateSample",
    "Mode",
    "MotionLabel",
    "OtterMessage",
    "Provenance",
    "QUICK_REACTS",
    "ReactKind",
    "StateFamily",
    "StateKind",
    "family_of",
    "is_social",
]
