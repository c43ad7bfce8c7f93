from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from otterlink.config import NotifierConfig
from otterlink.model import (
    QUICK_REACTS,
    MessageKind,
    Mode,
    OtterMessage,
    Provenance,
    ReactKind,
    StateKind,
    is_social,
)
from otterlink.notifier import (
    NotificationKind,
    next_suggestion_time,
    on_react_share,
    on_state_share,
    own_state_suggestion,
)
from otterlink.sensing import StateList


def _share(state=StateKind.SAD, sender="a"):
    return OtterMessage(
        id="p1-m1",
        pair="p1",
        sender=sender,
        kind=MessageKind.STATE_SHARE,
        sent_at=100.0,
        provenance=Provenance.RANDOM_LIST,
        state=state,
    )


def _react(react=ReactKind.THUMBS_UP):
    return OtterMessage(
        id="p1-m2",
        pair="p1",
        sender="b",
        kind=MessageKind.REACT_SHARE,
        sent_at=200.0,
        provenance=Provenance.QUICK_REACT,
        react=react,
        ref="p1-m1",
    )


def test_on_state_share_sad():
    n = on_state_share(_share(StateKind.SAD), recipient="b")
    assert n.kind is NotificationKind.PARTNER_STATE_VISIT
    assert n.recipient == "b"
    assert n.state is StateKind.SAD
    assert n.quick_reacts == QUICK_REACTS


def test_on_state_share_quick_set_is_fixed():
    n = on_state_share(_share(StateKind.WAVING), recipient="b")
    assert n.quick_reacts == QUICK_REACTS


def test_on_state_share_rejects_react():
    with pytest.raises(ValueError):
        on_state_share(_react(), recipient="a")


def test_on_react_share_addressing_and_payload():
    n = on_react_share(_react(ReactKind.THUMBS_UP), StateKind.CALM, recipient="a")
    assert n.kind is NotificationKind.PARTNER_REACT
    assert n.recipient == "a"  # the original state sender
    assert n.react is ReactKind.THUMBS_UP
    assert n.state is StateKind.CALM  # referenced state for the open flow
    assert n.ref == "p1-m2"


def test_on_react_share_rejects_share():
    with pytest.raises(ValueError):
        on_react_share(_share(), StateKind.CALM, recipient="b")


# ----------------------------------------------------------------------
# scheduling


def _cfg(**kw):
    defaults = dict(min_gap_mins=45.0, jitter_mins=0.0)
    defaults.update(kw)
    return NotifierConfig(**defaults)


def test_minimum_gap_floor():
    # last 10:00, now 10:10, no jitter -> 10:45
    last, now = 10 * 3600.0, 10 * 3600.0 + 600
    t = next_suggestion_time(last, now, seed=1, tz_offset_mins=0, config=_cfg())
    assert t == last + 45 * 60


def test_no_last_fires_from_now():
    t = next_suggestion_time(None, 9 * 3600.0, seed=1, tz_offset_mins=0, config=_cfg())
    assert t == 9 * 3600.0


def test_active_hours_deferral():
    # 23:30 local is outside 08:00-22:00; defer to >= 08:00 next day.
    last, now = 22.75 * 3600, 23.5 * 3600
    t = next_suggestion_time(last, now, seed=1, tz_offset_mins=0, config=_cfg())
    assert t == 86_400 + 8 * 3600


def test_early_morning_clips_same_day():
    t = next_suggestion_time(None, 5 * 3600.0, seed=1, tz_offset_mins=0, config=_cfg())
    assert t == 8 * 3600.0


def test_active_hours_respect_timezone():
    # 23:30 local at UTC+60min = 22:30 UTC; deferral lands at 08:00 local.
    now = 22.5 * 3600
    t = next_suggestion_time(None, now, seed=1, tz_offset_mins=60, config=_cfg())
    assert (t + 3600) % 86_400 == 8 * 3600


def test_deterministic_in_inputs():
    cfg = NotifierConfig()
    args = dict(last=100.0, now=500.0, seed=9, tz_offset_mins=0, config=cfg)
    assert next_suggestion_time(**args) == next_suggestion_time(**args)


def test_simulated_day_gaps():
    cfg = NotifierConfig()
    seed, tz = 4, 0
    last = None
    fires = []
    now = 8 * 3600.0
    for _ in range(40):
        due = next_suggestion_time(last, now, seed, tz, cfg)
        fires.append(due)
        last = due
        now = due
    gaps = [b - a for a, b in zip(fires, fires[1:])]
    assert all(g >= 45 * 60 - 1e-6 for g in gaps)


def test_jitter_within_bounds():
    cfg = _cfg(jitter_mins=45.0)
    last, now = 9 * 3600.0, 9 * 3600.0
    for seed in range(50):
        t = next_suggestion_time(last, now, seed, 0, cfg)
        assert last + 45 * 60 <= t <= last + 90 * 60


@given(
    last=st.one_of(st.none(), st.floats(0, 14 * 86_400)),
    ahead=st.floats(0, 86_400),
    seed=st.integers(0, 2**31),
    tz=st.integers(-12 * 60, 14 * 60),
)
def test_schedule_properties(last, ahead, seed, tz):
    cfg = NotifierConfig()
    now = (last or 0.0) + ahead
    t = next_suggestion_time(last, now, seed, tz, cfg)
    assert t >= now
    if last is not None:
        assert t - last >= cfg.min_gap_mins * 60 - 1e-6
    minute = int((t + tz * 60) // 60) % 1440
    assert cfg.active_start_min <= minute < cfg.active_end_min


# ----------------------------------------------------------------------
# own-state suggestions


SENSED = StateList(
    window_id=5,
    mode=Mode.SENSING_ON,
    states=(StateKind.EATING, StateKind.NEUTRAL, StateKind.WAVING),
    social_slot=StateKind.WAVING,
)
RANDOM = StateList(
    window_id=5,
    mode=Mode.SENSING_OFF,
    states=(StateKind.BORED, StateKind.HUGGING),
    social_slot=StateKind.HUGGING,
)


def test_sensed_suggestion_excludes_social_and_badges():
    for seed in range(30):
        n = own_state_suggestion(Mode.SENSING_ON, SENSED, seed, 5, "a", now=100.0)
        assert n.state in (StateKind.EATING, StateKind.NEUTRAL)
        assert not is_social(n.state)
        assert n.sensed_badge is True
        assert n.actions == ("share", "dismiss")


def test_random_suggestion_may_include_social_no_badge():
    picks = {
        own_state_suggestion(Mode.SENSING_OFF, RANDOM, seed, 5, "a", now=100.0).state
        for seed in range(60)
    }
    assert picks == {StateKind.BORED, StateKind.HUGGING}
    n = own_state_suggestion(Mode.SENSING_OFF, RANDOM, 1, 5, "a", now=100.0)
    assert n.sensed_badge is False


def test_suggestion_deterministic():
    a = own_state_suggestion(Mode.SENSING_ON, SENSED, 7, 5, "a", now=100.0)
    b = own_state_suggestion(Mode.SENSING_ON, SENSED, 7, 5, "a", now=100.0)
    assert a.state is b.state
