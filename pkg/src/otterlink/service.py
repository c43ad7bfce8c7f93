"""The pair-hosting service engine: accounts, pairing, sensor ingestion,
list serving, the share/react flow, and the suggestion scheduler.

Every state change is a record: validated against current state, applied,
then appended to the journal (and to disk when a data directory is set)
before the caller is acknowledged. Restore loads the snapshot and replays the
log suffix through the same apply path, so restored state equals live state.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .clock import Clock, local_minutes_of_day
from .config import ServiceConfig
from .interaction import (
    InteractionSession,
    Phase,
    ReactPrompt,
    ReactVia,
    StateNotAvailable,
    NotPaired,
)
from .model import (
    DailyProfile,
    HeartRateSample,
    MessageId,
    MessageKind,
    Mode,
    MotionLabel,
    OtterMessage,
    PairId,
    Provenance,
    ReactKind,
    StateKind,
    UserId,
)
from .notifier import (
    Notification,
    NotificationKind,
    next_suggestion_time,
    on_react_share,
    on_state_share,
    own_state_suggestion,
)
from .persistence import CorruptLog, RecordLog, load_snapshot, save_snapshot
from .seeds import derive_rng, derive_seed
from .sensing import SensorWindow, StateList, sensed_list, random_list, window_id

logger = logging.getLogger(__name__)

# Sensor samples older than this never matter (staleness horizon is 15 min).
SAMPLE_KEEP_SECONDS = 3600.0


class ServiceError(Exception):
    code = "SERVICE_ERROR"


class UnknownUser(ServiceError):
    code = "UNKNOWN_USER"


class AlreadyPaired(ServiceError):
    code = "ALREADY_PAIRED"


class OutOfOrderEvent(ServiceError):
    code = "OUT_OF_ORDER_EVENT"


class BadRequest(ServiceError):
    code = "BAD_REQUEST"


@dataclass
class _User:
    id: UserId
    name: str
    token: str
    seed: int
    tz_offset_mins: int
    pair: PairId | None = None


@dataclass
class _Pair:
    id: PairId
    users: tuple[UserId, UserId]
    mode: Mode
    created_at: float


@dataclass
class _Sensors:
    samples: list[HeartRateSample] = field(default_factory=list)
    motion: MotionLabel = MotionLabel.UNKNOWN
    profiles: dict[str, DailyProfile] = field(default_factory=dict)
    last_t: float | None = None


@dataclass
class _Scheduler:
    last: float | None = None
    next_due: float = 0.0


@dataclass
class _Suggestion:
    state: StateKind
    window_id: int
    consumed: bool = False


def message_to_dict(msg: OtterMessage) -> dict:
    return {
        "id": msg.id,
        "pair": msg.pair,
        "sender": msg.sender,
        "kind": msg.kind.value,
        "sent_at": msg.sent_at,
        "provenance": msg.provenance.value,
        "state": msg.state.value if msg.state else None,
        "react": msg.react.value if msg.react else None,
        "ref": msg.ref,
    }


def message_from_dict(data: dict) -> OtterMessage:
    return OtterMessage(
        id=data["id"],
        pair=data["pair"],
        sender=data["sender"],
        kind=MessageKind(data["kind"]),
        sent_at=data["sent_at"],
        provenance=Provenance(data["provenance"]),
        state=StateKind(data["state"]) if data.get("state") else None,
        react=ReactKind(data["react"]) if data.get("react") else None,
        ref=data.get("ref"),
    )


def notification_to_body(n: Notification) -> dict:
    body = {
        "kind": n.kind.value,
        "recipient": n.recipient,
        "created_at": n.created_at,
    }
    if n.state is not None:
        body["state"] = n.state.value
    if n.react is not None:
        body["react"] = n.react.value
    if n.ref is not None:
        body["ref"] = n.ref
    if n.quick_reacts is not None:
        body["quick_reacts"] = [r.value for r in n.quick_reacts]
    if n.sensed_badge is not None:
        body["sensed_badge"] = n.sensed_badge
    if n.actions is not None:
        body["actions"] = list(n.actions)
    return body


# An event handed to the transport for fan-out: (recipient, wire body).
Event = tuple[UserId, dict]


class OtterEngine:
    """In-process service core. All public methods are thread-safe; command
    application is serialized by a single lock (the journal is global, so a
    total order exists anyway)."""

    def __init__(
        self,
        config: ServiceConfig | None = None,
        clock: Clock | None = None,
        data_dir: str | Path | None = None,
    ):
        from .clock import SystemClock

        self.config = config or ServiceConfig()
        self.clock = clock or SystemClock()
        self.lock = threading.RLock()
        self.records: list[dict] = []
        self.seq = 0
        self._disk = RecordLog(data_dir) if data_dir is not None else None
        self._data_dir = Path(data_dir) if data_dir is not None else None

        self.users: dict[UserId, _User] = {}
        self.pairs: dict[PairId, _Pair] = {}
        self.sensors: dict[UserId, _Sensors] = {}
        self.sessions: dict[PairId, InteractionSession] = {}
        self.served: dict[UserId, StateList] = {}
        self.served_at: dict[UserId, float] = {}
        self.scheduler: dict[UserId, _Scheduler] = {}
        self.suggestions: dict[UserId, _Suggestion] = {}
        self.next_user = 1
        self.next_pair = 1

    # ------------------------------------------------------------------
    # record plumbing

    def _commit(self, rtype: str, body: dict, t: float | None = None):
        """Validate + apply + persist one record; returns the apply result."""
        record = {
            "seq": self.seq + 1,
            "t": self.clock.now() if t is None else t,
            "type": rtype,
            "body": body,
        }
        result = self._apply(record)
        self.seq = record["seq"]
        self.records.append(record)
        if self._disk is not None:
            self._disk.append(record)
        return result

    def _apply(self, record: dict):
        handler = getattr(self, "_apply_" + record["type"])
        return handler(record["t"], record["body"])

    # ------------------------------------------------------------------
    # lookups

    def _user(self, uid: UserId) -> _User:
        user = self.users.get(uid)
        if user is None:
            raise UnknownUser(f"unknown user {uid}")
        return user

    def _pair_of(self, uid: UserId) -> _Pair:
        user = self._user(uid)
        if user.pair is None:
            raise NotPaired(f"{uid} is not paired")
        return self.pairs[user.pair]

    def user_by_token(self, token: str) -> UserId | None:
        for user in self.users.values():
            if user.token == token:
                return user.id
        return None

    # ------------------------------------------------------------------
    # registration and pairing

    def register(
        self, name: str, tz_offset_mins: int | None = None, seed: int | None = None
    ) -> dict:
        with self.lock:
            uid = f"u{self.next_user}"
            token = hashlib.blake2b(
                f"{self.config.seed}:{uid}:token".encode(), digest_size=16
            ).hexdigest()
            body = {
                "user": uid,
                "name": name,
                "token": token,
                "seed": seed if seed is not None else derive_seed(self.config.seed, uid),
                "tz_offset_mins": (
                    tz_offset_mins
                    if tz_offset_mins is not None
                    else self.config.default_tz_offset_mins
                ),
            }
            return self._commit("register", body)

    def _apply_register(self, t: float, body: dict) -> dict:
        uid = body["user"]
        self.users[uid] = _User(
            id=uid,
            name=body["name"],
            token=body["token"],
            seed=body["seed"],
            tz_offset_mins=body["tz_offset_mins"],
        )
        self.sensors[uid] = _Sensors()
        self.next_user = max(self.next_user, int(uid[1:]) + 1)
        return {"user": uid, "token": body["token"], "name": body["name"]}

    def pair(self, u1: UserId, u2: UserId, mode: Mode | None = None):
        with self.lock:
            if u1 == u2:
                raise BadRequest("pairing requires two distinct users")
            for uid in (u1, u2):
                if self._user(uid).pair is not None:
                    raise AlreadyPaired(f"{uid} is already paired")
            body = {
                "pair": f"p{self.next_pair}",
                "users": [u1, u2],
                "mode": (mode or self.config.default_mode).value,
            }
            return self._commit("pair", body)

    def _apply_pair(self, t: float, body: dict):
        pid = body["pair"]
        u1, u2 = body["users"]
        pair = _Pair(id=pid, users=(u1, u2), mode=Mode(body["mode"]), created_at=t)
        self.pairs[pid] = pair
        self.users[u1].pair = pid
        self.users[u2].pair = pid
        self.sessions[pid] = InteractionSession(pair=pid, users=(u1, u2))
        for uid in (u1, u2):
            user = self.users[uid]
            self.scheduler[uid] = _Scheduler(
                last=None,
                next_due=next_suggestion_time(
                    None, t, user.seed, user.tz_offset_mins, self.config.notifier
                ),
            )
        self.next_pair = max(self.next_pair, int(pid[1:]) + 1)
        events: list[Event] = [
            (uid, {"kind": "paired", "pair": pid, "mode": body["mode"], "users": [u1, u2]})
            for uid in (u1, u2)
        ]
        return pair, events

    def set_mode(self, pid: PairId, mode: Mode) -> None:
        """Admin switch between sensing off/on; takes effect from the next
        window (frozen lists for the current window are untouched)."""
        with self.lock:
            if pid not in self.pairs:
                raise BadRequest(f"unknown pair {pid}")
            self._commit("set_mode", {"pair": pid, "mode": mode.value})

    def _apply_set_mode(self, t: float, body: dict) -> None:
        self.pairs[body["pair"]].mode = Mode(body["mode"])

    # ------------------------------------------------------------------
    # sensor ingestion

    def ingest_sensor(self, uid: UserId, event: dict):
        with self.lock:
            sensors = self.sensors.get(uid)
            if sensors is None:
                raise UnknownUser(f"unknown user {uid}")
            try:
                t = float(event["t"])
                kind = event["kind"]
                payload = event["payload"]
            except (KeyError, TypeError, ValueError) as exc:
                raise BadRequest(f"malformed sensor event: {exc}")
            if sensors.last_t is not None and t < sensors.last_t:
                raise OutOfOrderEvent(
                    f"event at {t} precedes last event at {sensors.last_t}"
                )
            if kind == "hr":
                HeartRateSample(t, float(payload["bpm"]))  # validates range
            elif kind == "motion":
                MotionLabel(payload["label"])
            elif kind == "profile":
                self._profile_from_payload(payload)
            else:
                raise BadRequest(f"unknown sensor event kind {kind!r}")
            return self._commit(
                "sensor_event",
                {"user": uid, "event": {"t": t, "kind": kind, "payload": payload}},
            )

    @staticmethod
    def _profile_from_payload(payload: dict) -> DailyProfile:
        return DailyProfile(
            date=dt.date.fromisoformat(payload["date"]),
            min_hr=float(payload["min_hr"]),
            resting_hr=float(payload["resting_hr"]),
            walking_hr=float(payload["walking_hr"]),
            max_hr=float(payload["max_hr"]),
        )

    def _apply_sensor_event(self, t: float, body: dict) -> None:
        sensors = self.sensors[body["user"]]
        event = body["event"]
        et = float(event["t"])
        payload = event["payload"]
        if event["kind"] == "hr":
            sensors.samples.append(HeartRateSample(et, float(payload["bpm"])))
            cutoff = et - SAMPLE_KEEP_SECONDS
            if sensors.samples and sensors.samples[0].t < cutoff:
                sensors.samples = [s for s in sensors.samples if s.t >= cutoff]
        elif event["kind"] == "motion":
            sensors.motion = MotionLabel(payload["label"])
        else:
            profile = self._profile_from_payload(payload)
            sensors.profiles[profile.date.isoformat()] = profile
        sensors.last_t = et

    def _effective_profile(self, uid: UserId, now: float) -> DailyProfile | None:
        user = self.users[uid]
        sensors = self.sensors[uid]
        if not sensors.profiles:
            return None
        local_now = dt.datetime.fromtimestamp(
            now + user.tz_offset_mins * 60, tz=dt.timezone.utc
        ).date()
        dates = [d for d in sorted(sensors.profiles) if d <= local_now.isoformat()]
        if not dates:
            return None
        return sensors.profiles[dates[-1]]

    # ------------------------------------------------------------------
    # state lists

    def get_state_list(self, uid: UserId) -> StateList:
        """Serve the user's list for the current window, freezing it on first
        computation so share validation sees exactly what the client saw."""
        with self.lock:
            pair = self._pair_of(uid)
            return self._serve_current_list(uid, pair, self.clock.now())

    def _compute_list(
        self, uid: UserId, pair: _Pair, wid: int, now: float
    ) -> StateList:
        user = self.users[uid]
        if pair.mode is Mode.SENSING_OFF:
            return random_list(wid, user.seed)
        sensors = self.sensors[uid]
        window = SensorWindow(
            samples=sensors.samples,
            motion=sensors.motion,
            profile=self._effective_profile(uid, now),
            now=now,
            tz_offset_mins=user.tz_offset_mins,
        )
        return sensed_list(
            window, wid, user.seed, self.config.thresholds, self.config.quadrant_map
        )

    def _apply_serve_list(self, t: float, body: dict) -> StateList:
        state_list = StateList(
            window_id=body["window_id"],
            mode=Mode(body["mode"]),
            states=tuple(StateKind(s) for s in body["states"]),
            social_slot=StateKind(body["social"]),
        )
        self.served[body["user"]] = state_list
        self.served_at[body["user"]] = body["at"]
        return state_list

    # ------------------------------------------------------------------
    # sharing and reacting

    def share_state(
        self, uid: UserId, state: StateKind, provenance: Provenance
    ) -> tuple[OtterMessage, list[Event]]:
        with self.lock:
            pair = self._pair_of(uid)
            now = self.clock.now()
            expected = (
                Provenance.SENSED_LIST
                if pair.mode is Mode.SENSING_ON
                else Provenance.RANDOM_LIST
            )
            if provenance not in (expected, Provenance.NOTIFICATION_SHARE):
                raise BadRequest(
                    f"provenance {provenance} does not match pair mode {pair.mode}"
                )
            if provenance is Provenance.NOTIFICATION_SHARE:
                suggestion = self.suggestions.get(uid)
                if suggestion is None or suggestion.consumed:
                    raise StateNotAvailable("no pending suggestion to share")
                if suggestion.state is not state:
                    raise StateNotAvailable(
                        f"{state} is not the suggested state ({suggestion.state})"
                    )
            else:
                served = self.served.get(uid)
                if served is None or served.window_id != window_id(now):
                    raise StateNotAvailable("no list served for the current window")
                if state not in served.states:
                    raise StateNotAvailable(f"{state} is not on the served list")
            session = self.sessions[pair.id]
            msg_id = f"{pair.id}-m{session.next_msg}"
            msg = self._commit(
                "share_state",
                {
                    "user": uid,
                    "pair": pair.id,
                    "id": msg_id,
                    "state": state.value,
                    "provenance": provenance.value,
                },
                t=now,
            )
            events = self._emit_notification(on_state_share(msg, session.other(uid)))
            return msg, events

    def _apply_share_state(self, t: float, body: dict) -> OtterMessage:
        uid = body["user"]
        session = self.sessions[body["pair"]]
        provenance = Provenance(body["provenance"])
        suggestion = self.suggestions.get(uid)
        msg = session.share_state(
            sender=uid,
            state=StateKind(body["state"]),
            available=self.served.get(uid),
            provenance=provenance,
            now=t,
            notified_state=(
                suggestion.state
                if suggestion is not None and not suggestion.consumed
                else None
            ),
        )
        assert msg.id == body["id"]
        if provenance is Provenance.NOTIFICATION_SHARE and suggestion is not None:
            suggestion.consumed = True
        return msg

    def view_state(self, uid: UserId, share_id: MessageId) -> ReactPrompt:
        with self.lock:
            pair = self._pair_of(uid)
            return self._commit(
                "view_state", {"user": uid, "pair": pair.id, "id": share_id}
            )

    def _apply_view_state(self, t: float, body: dict) -> ReactPrompt:
        return self.sessions[body["pair"]].view_state(body["user"], body["id"])

    def send_react(
        self, uid: UserId, share_id: MessageId, react: ReactKind, via: ReactVia
    ) -> tuple[OtterMessage, list[Event]]:
        with self.lock:
            pair = self._pair_of(uid)
            session = self.sessions[pair.id]
            msg_id = f"{pair.id}-m{session.next_msg}"
            msg = self._commit(
                "send_react",
                {
                    "user": uid,
                    "pair": pair.id,
                    "id": msg_id,
                    "ref": share_id,
                    "react": react.value,
                    "via": via.value,
                },
            )
            referenced = session.by_id[share_id]
            assert referenced.state is not None
            events = self._emit_notification(
                on_react_share(msg, referenced.state, referenced.sender)
            )
            return msg, events

    def _apply_send_react(self, t: float, body: dict) -> OtterMessage:
        session = self.sessions[body["pair"]]
        msg = session.send_react(
            receiver=body["user"],
            share_id=body["ref"],
            react=ReactKind(body["react"]),
            via=ReactVia(body["via"]),
            now=t,
        )
        assert msg.id == body["id"]
        return msg

    def dont_react(self, uid: UserId, share_id: MessageId) -> None:
        with self.lock:
            pair = self._pair_of(uid)
            self._commit("dont_react", {"user": uid, "pair": pair.id, "id": share_id})

    def _apply_dont_react(self, t: float, body: dict) -> None:
        self.sessions[body["pair"]].dont_react(body["user"], body["id"])

    def view_react(self, uid: UserId, react_id: MessageId):
        """Pure lookup; no state change, nothing journaled."""
        with self.lock:
            pair = self._pair_of(uid)
            return self.sessions[pair.id].view_react(uid, react_id)

    def dismiss_suggestion(self, uid: UserId) -> None:
        with self.lock:
            self._pair_of(uid)
            suggestion = self.suggestions.get(uid)
            if suggestion is None or suggestion.consumed:
                raise BadRequest("no pending suggestion to dismiss")
            self._commit("dismiss_suggestion", {"user": uid})

    def _apply_dismiss_suggestion(self, t: float, body: dict) -> None:
        self.suggestions[body["user"]].consumed = True

    # ------------------------------------------------------------------
    # notifications

    def _delivery_roll(self) -> bool:
        """Drop-probability fault injector, keyed by the next record seq."""
        p = self.config.notifier.drop_probability
        if p <= 0:
            return True
        return derive_rng(self.config.seed, "drop", self.seq + 1).random() >= p

    def _emit_notification(self, n: Notification) -> list[Event]:
        """Journal a notification record; returns fan-out events unless the
        fault injector dropped delivery."""
        body = notification_to_body(n)
        delivered = self._delivery_roll()
        self._commit(
            "notification",
            {"notification": body, "delivered": delivered},
            t=n.created_at,
        )
        return [(n.recipient, body)] if delivered else []

    def _apply_notification(self, t: float, body: dict) -> None:
        pass  # delivery bookkeeping only; no engine state changes

    def _serve_current_list(self, uid: UserId, pair: _Pair, now: float) -> StateList:
        """Frozen list for the current window, computing and journaling it on
        first use."""
        wid = window_id(now)
        cached = self.served.get(uid)
        if cached is not None and cached.window_id == wid:
            return cached
        state_list = self._compute_list(uid, pair, wid, now)
        return self._commit(
            "serve_list",
            {
                "user": uid,
                "window_id": wid,
                "mode": state_list.mode.value,
                "states": [s.value for s in state_list.states],
                "social": state_list.social_slot.value,
                "at": now,
            },
            t=now,
        )

    def tick(self, now: float | None = None) -> list[Event]:
        """Fire due own-state suggestions. Drive this from a timer (live) or
        from the virtual-time loop (simulation)."""
        with self.lock:
            now = self.clock.now() if now is None else now
            events: list[Event] = []
            for uid in sorted(self.scheduler):
                user = self.users[uid]
                sched = self.scheduler[uid]
                if sched.next_due > now:
                    continue
                minute = local_minutes_of_day(now, user.tz_offset_mins)
                cfg = self.config.notifier
                if not cfg.active_start_min <= minute < cfg.active_end_min:
                    # Out of active hours: push the due time forward instead
                    # of firing late at a bad hour.
                    sched.next_due = next_suggestion_time(
                        sched.last, now, user.seed, user.tz_offset_mins, cfg
                    )
                    continue
                pair = self.pairs[user.pair]
                current = self._serve_current_list(uid, pair, now)
                wid = current.window_id
                suggestion = own_state_suggestion(
                    pair.mode, current, user.seed, wid, uid, now
                )
                assert suggestion.state is not None
                _, fired = self._commit(
                    "own_suggestion",
                    {
                        "user": uid,
                        "window_id": wid,
                        "state": suggestion.state.value,
                        "sensed_badge": suggestion.sensed_badge,
                        "fired_at": now,
                        "delivered": self._delivery_roll(),
                    },
                    t=now,
                )
                events.extend(fired)
            return events

    def _apply_own_suggestion(self, t: float, body: dict):
        uid = body["user"]
        user = self.users[uid]
        fired_at = body["fired_at"]
        sched = self.scheduler[uid]
        sched.last = fired_at
        sched.next_due = next_suggestion_time(
            fired_at, fired_at, user.seed, user.tz_offset_mins, self.config.notifier
        )
        self.suggestions[uid] = _Suggestion(
            state=StateKind(body["state"]), window_id=body["window_id"]
        )
        n = Notification(
            kind=NotificationKind.OWN_STATE_SUGGESTION,
            recipient=uid,
            created_at=fired_at,
            state=StateKind(body["state"]),
            sensed_badge=body["sensed_badge"],
            actions=("share", "dismiss"),
        )
        return n, ([(uid, notification_to_body(n))] if body["delivered"] else [])

    # ------------------------------------------------------------------
    # durability

    def state_dict(self) -> dict:
        """Full engine state as a JSON-able dict (snapshot payload; also the
        equality witness for durability checks)."""
        return {
            "users": {
                uid: {
                    "name": u.name,
                    "token": u.token,
                    "seed": u.seed,
                    "tz_offset_mins": u.tz_offset_mins,
                    "pair": u.pair,
                }
                for uid, u in self.users.items()
            },
            "pairs": {
                pid: {
                    "users": list(p.users),
                    "mode": p.mode.value,
                    "created_at": p.created_at,
                }
                for pid, p in self.pairs.items()
            },
            "sensors": {
                uid: {
                    "samples": [[s.t, s.bpm] for s in sn.samples],
                    "motion": sn.motion.value,
                    "profiles": {
                        d: [p.min_hr, p.resting_hr, p.walking_hr, p.max_hr]
                        for d, p in sn.profiles.items()
                    },
                    "last_t": sn.last_t,
                }
                for uid, sn in self.sensors.items()
            },
            "sessions": {
                pid: {
                    "log": [message_to_dict(m) for m in s.log],
                    "phases": {mid: e.phase.value for mid, e in s.pending.items()},
                    "react_of": {
                        mid: e.react_id
                        for mid, e in s.pending.items()
                        if e.react_id is not None
                    },
                    "next_msg": s.next_msg,
                }
                for pid, s in self.sessions.items()
            },
            "served": {
                uid: {
                    "window_id": sl.window_id,
                    "mode": sl.mode.value,
                    "states": [s.value for s in sl.states],
                    "social": sl.social_slot.value,
                    "at": self.served_at[uid],
                }
                for uid, sl in self.served.items()
            },
            "scheduler": {
                uid: {"last": s.last, "next_due": s.next_due}
                for uid, s in self.scheduler.items()
            },
            "suggestions": {
                uid: {
                    "state": s.state.value,
                    "window_id": s.window_id,
                    "consumed": s.consumed,
                }
                for uid, s in self.suggestions.items()
            },
            "next_user": self.next_user,
            "next_pair": self.next_pair,
        }

    def load_state(self, state: dict) -> None:
        self.users = {
            uid: _User(
                id=uid,
                name=u["name"],
                token=u["token"],
                seed=u["seed"],
                tz_offset_mins=u["tz_offset_mins"],
                pair=u["pair"],
            )
            for uid, u in state["users"].items()
        }
        self.pairs = {
            pid: _Pair(
                id=pid,
                users=tuple(p["users"]),
                mode=Mode(p["mode"]),
                created_at=p["created_at"],
            )
            for pid, p in state["pairs"].items()
        }
        self.sensors = {
            uid: _Sensors(
                samples=[HeartRateSample(t, bpm) for t, bpm in sn["samples"]],
                motion=MotionLabel(sn["motion"]),
                profiles={
                    d: DailyProfile(dt.date.fromisoformat(d), *anchors)
                    for d, anchors in sn["profiles"].items()
                },
                last_t=sn["last_t"],
            )
            for uid, sn in state["sensors"].items()
        }
        self.sessions = {}
        for pid, s in state["sessions"].items():
            session = InteractionSession(
                pair=pid,
                users=tuple(self.pairs[pid].users),
                next_msg=s["next_msg"],
            )
            for m in s["log"]:
                msg = message_from_dict(m)
                session.log.append(msg)
                session.by_id[msg.id] = msg
            from .interaction import _Pending

            for mid, phase in s["phases"].items():
                session.pending[mid] = _Pending(
                    message=session.by_id[mid],
                    phase=Phase(phase),
                    react_id=s["react_of"].get(mid),
                )
            self.sessions[pid] = session
        self.served = {
            uid: StateList(
                window_id=sl["window_id"],
                mode=Mode(sl["mode"]),
                states=tuple(StateKind(x) for x in sl["states"]),
                social_slot=StateKind(sl["social"]),
            )
            for uid, sl in state["served"].items()
        }
        self.served_at = {uid: sl["at"] for uid, sl in state["served"].items()}
        self.scheduler = {
            uid: _Scheduler(last=s["last"], next_due=s["next_due"])
            for uid, s in state["scheduler"].items()
        }
        self.suggestions = {
            uid: _Suggestion(
                state=StateKind(s["state"]),
                window_id=s["window_id"],
                consumed=s["consumed"],
            )
            for uid, s in state["suggestions"].items()
        }
        self.next_user = state["next_user"]
        self.next_pair = state["next_pair"]

    def snapshot(self) -> None:
        if self._data_dir is None:
            raise ServiceError("no data directory configured")
        with self.lock:
            save_snapshot(self._data_dir, self.seq, self.state_dict())

    @classmethod
    def restore(
        cls,
        data_dir: str | Path,
        config: ServiceConfig | None = None,
        clock: Clock | None = None,
    ) -> tuple["OtterEngine", CorruptLog | None]:
        """Rebuild an engine from snapshot + log suffix replay."""
        records, corruption = RecordLog.read_all(data_dir)
        engine = cls(config=config, clock=clock, data_dir=data_dir)
        snap = load_snapshot(data_dir)
        watermark = 0
        if snap is not None:
            watermark, state = snap
            engine.load_state(state)
            engine.seq = watermark
        for record in records:
            if record["seq"] <= watermark:
                continue
            engine._apply(record)
            engine.seq = record["seq"]
            engine.records.append(record)
        return engine, corruption

    def close(self) -> None:
        if self._disk is not None:
            self._disk.close()
