"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete. Budgeted criteria assert their own runtime.
"""

from __future__ import annotations

import datetime as dt
import random
import time
from collections import Counter

import pytest

from otterlink.clock import VirtualClock
from otterlink.config import ServiceConfig
from otterlink.interaction import ReactVia
from otterlink.model import (
    QUICK_REACTS,
    ArousalLevel,
    DailyProfile,
    HeartRateSample,
    Mode,
    MotionLabel,
    Provenance,
    ReactKind,
    StateKind,
    is_social,
)
from otterlink.seeds import derive_seed
from otterlink.sensing import (
    SensorWindow,
    build_thresholds,
    classify_arousal,
    random_list,
    sensed_list,
    window_id,
)
from otterlink.service import OtterEngine
from otterlink.simulate import AgentPolicy, log_bytes, run_couple
from otterlink.tracegen import DEFAULT_PLAN, DEFAULT_PROFILE, generate_trace
from otterlink.verify import verify

from test_interaction import run_fuzz_sequences

PROFILE = DailyProfile(dt.date(1970, 1, 1), **DEFAULT_PROFILE)


def _report(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def month_log():
    started = time.monotonic()
    days, seed = 28, 2026
    trace_a = generate_trace(
        DEFAULT_PLAN, PROFILE, seed=derive_seed(seed, "a"), days=days
    )
    trace_b = generate_trace(
        DEFAULT_PLAN, PROFILE, seed=derive_seed(seed, "b"), days=days
    )
    records = run_couple(
        trace_a,
        trace_b,
        AgentPolicy(),
        AgentPolicy(),
        Mode.SENSING_ON,
        days=days,
        seed=seed,
    )
    return records, time.monotonic() - started


def test_list_legality():
    """10,000 generated lists per mode: size in [2,5], exactly one social
    state, no duplicates; under 10 seconds."""
    started = time.monotonic()

    def _legal(states) -> bool:
        return (
            2 <= len(states) <= 5
            and len(set(states)) == len(states)
            and sum(1 for s in states if is_social(s)) == 1
        )

    off_ok = all(_legal(random_list(wid, 37).states) for wid in range(10_000))

    motions = (
        MotionLabel.STATIONARY,
        MotionLabel.WALKING,
        MotionLabel.RUNNING,
        MotionLabel.UNKNOWN,
    )
    on_ok = True
    for i in range(10_000):
        now = i * 600.0
        bpm = 45.0 + (i % 28) * 5.0  # sweeps every band
        window = SensorWindow(
            samples=[HeartRateSample(now, bpm)],
            motion=motions[i % 4],
            profile=PROFILE,
            now=now,
        )
        if not _legal(sensed_list(window, window_id(now), 37).states):
            on_ok = False
            break
    elapsed = time.monotonic() - started
    _report(
        "list legality (10,000 lists per mode)",
        off_ok and on_ok and elapsed < 10.0,
        f"{elapsed:.1f}s",
    )


def test_arousal_partition():
    """Exhaustive bpm sweep over 100 random valid profiles matches the
    interval-membership oracle exactly; classification is monotone; < 5s."""
    started = time.monotonic()
    rng = random.Random(90210)
    exact = True
    monotone = True
    for _ in range(100):
        anchors = sorted(rng.uniform(20.5, 249.5) for _ in range(4))
        thresholds = build_thresholds(DailyProfile(PROFILE.date, *anchors))
        intervals = (
            (float("-inf"), thresholds.low_upper, ArousalLevel.LOW),
            (thresholds.low_upper, thresholds.neutral_upper, ArousalLevel.NEUTRAL),
            (thresholds.neutral_upper, thresholds.high_upper, ArousalLevel.HIGH),
            (thresholds.high_upper, float("inf"), ArousalLevel.VERY_HIGH),
        )
        last = ArousalLevel.LOW
        bpm = 20.0
        while bpm <= 250.0:
            got = classify_arousal(bpm, thresholds)
            want = [lvl for lo, hi, lvl in intervals if lo <= bpm < hi]
            if len(want) != 1 or got is not want[0]:
                exact = False
            if got < last:
                monotone = False
            last = got
            bpm += 0.5
    elapsed = time.monotonic() - started
    _report(
        "arousal partition (sweep x 100 profiles, monotone)",
        exact and monotone and elapsed < 5.0,
        f"{elapsed:.1f}s",
    )


def test_predicate_soundness(month_log):
    """28-day sensing-on simulation: every shared non-social state passes its
    sensing predicate under the verifier oracle; < 60s."""
    records, sim_seconds = month_log
    started = time.monotonic()
    report = verify(records)
    soundness = [
        v for v in report.violations if v.check in ("share_soundness", "list_soundness")
    ]
    shares = [r for r in records if r["type"] == "share_state"]
    non_social_shared = [
        r for r in shares if r["body"]["state"] not in ("waving", "hugging", "handholding")
    ]
    elapsed = time.monotonic() - started + sim_seconds
    _report(
        "predicate soundness (28-day sensing-on simulation)",
        bool(non_social_shared) and not soundness and report.ok and elapsed < 60.0,
        f"{len(shares)} shares, {len(non_social_shared)} non-social, "
        f"{len(report.violations)} violations, {elapsed:.1f}s incl. simulation",
    )


def test_notification_spacing(month_log):
    """Per-user own-state suggestion gaps >= 45 minutes across the horizon."""
    records, _ = month_log
    fired: dict[str, list[float]] = {}
    for record in records:
        if record["type"] == "own_suggestion":
            fired.setdefault(record["body"]["user"], []).append(
                record["body"]["fired_at"]
            )
    violations = 0
    total = 0
    for times in fired.values():
        for a, b in zip(times, times[1:]):
            total += 1
            if b - a < 45 * 60 - 1e-6:
                violations += 1
    gap_checks = [v for v in verify(records).violations if v.check == "suggestion_gap"]
    _report(
        "notification spacing (gaps >= 45 min)",
        total > 100 and violations == 0 and not gap_checks,
        f"{total} gaps across {len(fired)} users",
    )


def test_react_protocol_fuzz():
    """100,000 random operation sequences: no react-to-react, no double
    react, no illegal quick react, phase machine stays in its DAG."""
    started = time.monotonic()
    stats = run_fuzz_sequences(100_000, seed=99)
    elapsed = time.monotonic() - started
    _report(
        "react protocol fuzz (1e5 sequences)",
        stats["ops"] > 500_000 and stats["rejected"] > 0,
        f"{stats['ops']} ops, {stats['rejected']} rejected, {elapsed:.1f}s",
    )


def test_mode_contrast():
    """Fixed sedentary/neutral input: sensing-off covers all 12 non-social
    states with uniform sizes; sensing-on yields only neutral + social."""
    from scipy.stats import chisquare

    seen = set()
    sizes = Counter()
    for wid in range(5000):
        states = random_list(wid, 4242).states
        sizes[len(states)] += 1
        seen.update(s for s in states if not is_social(s))
    pvalue = chisquare([sizes[k] for k in (2, 3, 4, 5)]).pvalue

    on_ok = True
    for day in range(5000):
        now = day * 86_400 + 9 * 3600.0
        window = SensorWindow(
            samples=[HeartRateSample(now, 80.0)],
            motion=MotionLabel.STATIONARY,
            profile=PROFILE,
            now=now,
        )
        states = sensed_list(window, window_id(now), 4242).states
        non_social = [s for s in states if not is_social(s)]
        if non_social != [StateKind.NEUTRAL]:
            on_ok = False
            break
    _report(
        "mode contrast (coverage + uniform sizes vs neutral-only)",
        len(seen) == 12 and pvalue > 0.01 and on_ok,
        f"chi2 p={pvalue:.3f}",
    )


def test_determinism_and_durability(tmp_path):
    """Identical seeds give byte-identical logs; restore after arbitrary
    prefixes equals live state on 1,000 fuzzed histories."""
    started = time.monotonic()
    days, seed = 2, 777
    trace_a = generate_trace(
        DEFAULT_PLAN, PROFILE, seed=derive_seed(seed, "a"), days=days
    )
    trace_b = generate_trace(
        DEFAULT_PLAN, PROFILE, seed=derive_seed(seed, "b"), days=days
    )

    def _sim():
        return run_couple(
            trace_a,
            trace_b,
            AgentPolicy(),
            AgentPolicy(),
            Mode.SENSING_ON,
            days=days,
            seed=seed,
        )

    deterministic = log_bytes(_sim()) == log_bytes(_sim())

    mismatches = 0
    for history in range(1000):
        if not _fuzzed_history_survives_restore(tmp_path / f"h{history}", history):
            mismatches += 1
    elapsed = time.monotonic() - started
    _report(
        "determinism & durability (byte-identical logs, 1000 restores)",
        deterministic and mismatches == 0,
        f"{mismatches} mismatches, {elapsed:.1f}s",
    )


def _fuzzed_history_survives_restore(data_dir, history_seed: int) -> bool:
    rng = random.Random(history_seed)
    clock = VirtualClock(8 * 3600.0)
    config = ServiceConfig(
        seed=history_seed,
        default_mode=Mode.SENSING_ON if history_seed % 2 else Mode.SENSING_OFF,
    )
    engine = OtterEngine(config=config, clock=clock, data_dir=data_dir)
    a = engine.register("alice")["user"]
    b = engine.register("bob")["user"]
    engine.pair(a, b)
    share_ids: list[str] = []
    for _ in range(rng.randint(6, 28)):
        clock.advance_to(clock.now() + rng.randint(0, 900))
        actor = a if rng.random() < 0.5 else b
        other = b if actor == a else a
        op = rng.randrange(7)
        try:
            if op == 0:
                engine.ingest_sensor(
                    actor,
                    {
                        "t": clock.now(),
                        "kind": "hr",
                        "payload": {"bpm": rng.uniform(45, 190)},
                    },
                )
            elif op == 1:
                engine.ingest_sensor(
                    actor,
                    {
                        "t": clock.now(),
                        "kind": "motion",
                        "payload": {
                            "label": rng.choice(("stationary", "walking", "running"))
                        },
                    },
                )
            elif op == 2:
                listing = engine.get_state_list(actor)
                provenance = (
                    Provenance.SENSED_LIST
                    if listing.mode is Mode.SENSING_ON
                    else Provenance.RANDOM_LIST
                )
                msg, _ = engine.share_state(
                    actor, rng.choice(listing.states), provenance
                )
                share_ids.append(msg.id)
            elif op == 3 and share_ids:
                engine.view_state(other, rng.choice(share_ids))
            elif op == 4 and share_ids:
                engine.send_react(
                    other,
                    rng.choice(share_ids),
                    rng.choice(list(ReactKind)),
                    rng.choice((ReactVia.QUICK, ReactVia.IN_APP)),
                )
            elif op == 5 and share_ids:
                engine.dont_react(other, rng.choice(share_ids))
            else:
                engine.tick()
        except Exception:
            pass  # rejected commands are part of the fuzz
        if rng.random() < 0.1:
            engine.snapshot()
    live = engine.state_dict()
    live_seq = engine.seq
    engine.close()
    restored, _ = OtterEngine.restore(data_dir, config=config)
    ok = restored.state_dict() == live and restored.seq == live_seq
    restored.close()
    return ok


def test_cardinalities():
    """15 states, 14 reacts, 4 quick reacts, straight from the registries."""
    _report(
        "cardinalities (15 states / 14 reacts / 4 quick)",
        len(list(StateKind)) == 15
        and len(list(ReactKind)) == 14
        and len(QUICK_REACTS) == 4
        and all(r in list(ReactKind) for r in QUICK_REACTS),
    )
