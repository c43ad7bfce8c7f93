"""Deterministic couple simulation: two scripted agents drive an in-process
engine on virtual time, producing a complete ordered record log.

The same (traces, policies, seeds, config) always produce a byte-identical
log; every behavioural draw comes from seed-derived generators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .clock import VirtualClock
from .config import NotifierConfig, ServiceConfig
from .model import QUICK_REACTS, Mode, Provenance, ReactKind, StateKind
from .interaction import ReactVia
from .seeds import derive_rng, derive_seed
from .service import OtterEngine

SECONDS_PER_DAY = 86400.0


def _uniform_react_distribution() -> tuple[tuple[ReactKind, float], ...]:
    weight = 1.0 / len(ReactKind)
    return tuple((react, weight) for react in ReactKind)


@dataclass(frozen=True)
class AgentPolicy:
    """Behavioural knobs for a simulated partner."""

    share_propensity: float = 0.7
    quick_react_probability: float = 0.35
    dismiss_probability: float = 0.2
    in_app_share_probability: float = 0.3
    react_distribution: tuple[tuple[ReactKind, float], ...] = field(
        default_factory=_uniform_react_distribution
    )

    def __post_init__(self) -> None:
        for name in (
            "share_propensity",
            "quick_react_probability",
            "dismiss_probability",
            "in_app_share_probability",
        ):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        total = sum(w for _, w in self.react_distribution)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"react distribution must sum to 1, got {total}")

    def draw_react(self, rng) -> ReactKind:
        roll = rng.random()
        acc = 0.0
        for react, weight in self.react_distribution:
            acc += weight
            if roll < acc:
                return react
        return self.react_distribution[-1][0]


class _Agent:
    """Reacts to delivered notifications according to its policy."""

    def __init__(self, uid: str, policy: AgentPolicy, engine: OtterEngine, seed: int):
        self.uid = uid
        self.policy = policy
        self.engine = engine
        self.rng = derive_rng(seed, "agent", uid)

    def on_notification(self, body: dict) -> list:
        kind = body.get("kind")
        if kind == "own_state_suggestion":
            return self._on_suggestion(body)
        if kind == "partner_state_visit":
            return self._on_visit(body)
        if kind == "partner_react":
            self.engine.view_react(self.uid, body["ref"])
            return []
        return []

    def _on_suggestion(self, body: dict) -> list:
        if self.rng.random() >= self.policy.share_propensity:
            self.engine.dismiss_suggestion(self.uid)
            return []
        mode = self.engine.pairs[self.engine.users[self.uid].pair].mode
        if self.rng.random() < self.policy.in_app_share_probability:
            current = self.engine.get_state_list(self.uid)
            state = current.states[self.rng.randrange(len(current.states))]
            provenance = (
                Provenance.SENSED_LIST
                if mode is Mode.SENSING_ON
                else Provenance.RANDOM_LIST
            )
            _, events = self.engine.share_state(self.uid, state, provenance)
            return events
        _, events = self.engine.share_state(
            self.uid, StateKind(body["state"]), Provenance.NOTIFICATION_SHARE
        )
        return events

    def _on_visit(self, body: dict) -> list:
        share_id = body["ref"]
        if self.rng.random() < self.policy.quick_react_probability:
            react = QUICK_REACTS[self.rng.randrange(len(QUICK_REACTS))]
            _, events = self.engine.send_react(
                self.uid, share_id, react, ReactVia.QUICK
            )
            return events
        if self.rng.random() < self.policy.dismiss_probability:
            self.engine.dont_react(self.uid, share_id)
            return []
        self.engine.view_state(self.uid, share_id)
        if self.rng.random() < self.policy.dismiss_probability:
            self.engine.dont_react(self.uid, share_id)
            return []
        react = self.policy.draw_react(self.rng)
        _, events = self.engine.send_react(self.uid, share_id, react, ReactVia.IN_APP)
        return events


def run_couple(
    trace_a: list[dict],
    trace_b: list[dict],
    policy_a: AgentPolicy,
    policy_b: AgentPolicy,
    mode: Mode,
    days: int,
    seed: int,
    config: ServiceConfig | None = None,
    data_dir: str | Path | None = None,
) -> list[dict]:
    """Simulate ``days`` of a couple using the app; returns the record log."""
    horizon = days * SECONDS_PER_DAY
    for label, trace in (("A", trace_a), ("B", trace_b)):
        if not trace or trace[-1]["t"] < horizon - 120:
            raise ValueError(f"trace {label} does not cover the {days}-day horizon")

    if config is None:
        config = ServiceConfig(
            seed=seed,
            default_mode=mode,
            notifier=NotifierConfig(),
        )
    clock = VirtualClock(0.0)
    engine = OtterEngine(config=config, clock=clock, data_dir=data_dir)
    a = engine.register("alice", seed=derive_seed(seed, "user", "a"))["user"]
    b = engine.register("bob", seed=derive_seed(seed, "user", "b"))["user"]
    engine.pair(a, b, mode=mode)

    agents = {
        a: _Agent(a, policy_a, engine, seed),
        b: _Agent(b, policy_b, engine, seed),
    }

    feed = sorted(
        [(e["t"], i, a, e) for i, e in enumerate(trace_a) if e["t"] < horizon]
        + [(e["t"], i, b, e) for i, e in enumerate(trace_b) if e["t"] < horizon],
        key=lambda item: (item[0], item[2], item[1]),
    )

    times = sorted({t for t, _, _, _ in feed})
    cursor = 0
    for now in times:
        clock.advance_to(now)
        while cursor < len(feed) and feed[cursor][0] <= now:
            _, _, uid, event = feed[cursor]
            engine.ingest_sensor(uid, event)
            cursor += 1
        pending = list(engine.tick(now))
        # Agents act immediately; their actions can notify the partner, so
        # drain to quiescence (share -> react -> view-react terminates).
        guard = 0
        while pending:
            uid, body = pending.pop(0)
            pending.extend(agents[uid].on_notification(body))
            guard += 1
            if guard > 1000:
                raise RuntimeError("notification cascade did not terminate")
    engine.close()
    return engine.records


def log_bytes(records: list[dict]) -> bytes:
    return "\n".join(json.dumps(r, sort_keys=True) for r in records).encode("utf-8")


def write_log(records: list[dict], path: str | Path) -> None:
    Path(path).write_bytes(log_bytes(records) + b"\n")


def read_log(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records
