"""Pair-scoped messaging: sharing states, the per-share phase machine, and
the react flow with its legality rules.

Phases move only along Delivered -> Viewed -> (Reacted | Dismissed), with the
quick-react shortcut Delivered -> Reacted. A share takes at most one react,
and a react can never be reacted to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .model import (
    QUICK_REACTS,
    REACT_CATALOG,
    MessageId,
    MessageKind,
    OtterMessage,
    PairId,
    Provenance,
    ReactKind,
    StateKind,
    UserId,
)
from .sensing import StateList


class Phase(str, Enum):
    DELIVERED = "delivered"
    VIEWED = "viewed"
    REACTED = "reacted"
    DISMISSED = "dismissed"

    def __str__(self) -> str:
        return self.value


class ReactVia(str, Enum):
    IN_APP = "in_app"
    QUICK = "quick"

    def __str__(self) -> str:
        return self.value


class InteractionError(Exception):
    code = "INTERACTION_ERROR"


class NotPaired(InteractionError):
    code = "NOT_PAIRED"


class StateNotAvailable(InteractionError):
    code = "STATE_NOT_AVAILABLE"


class UnknownMessage(InteractionError):
    code = "UNKNOWN_MESSAGE"


class AlreadyResolved(InteractionError):
    code = "ALREADY_RESOLVED"


class NotViewed(InteractionError):
    code = "NOT_VIEWED"


class IllegalQuickReact(InteractionError):
    code = "ILLEGAL_QUICK_REACT"


class ReactToReact(InteractionError):
    code = "REACT_TO_REACT"


@dataclass(frozen=True)
class ReactPrompt:
    """What the receiver sees when reacting: the full 14-react catalog plus
    the fixed quick set."""

    share_id: MessageId
    catalog: tuple[ReactKind, ...] = REACT_CATALOG
    quick: tuple[ReactKind, ...] = QUICK_REACTS


@dataclass
class _Pending:
    message: OtterMessage
    phase: Phase
    react_id: MessageId | None = None


_VIA_PROVENANCE = {
    ReactVia.QUICK: Provenance.QUICK_REACT,
    ReactVia.IN_APP: Provenance.IN_APP_REACT,
}


@dataclass
class InteractionSession:
    """One pair's message log and per-share phase machine.

    Not thread-safe by itself; callers serialize mutations per pair.
    """

    pair: PairId
    users: tuple[UserId, UserId]
    log: list[OtterMessage] = field(default_factory=list)
    by_id: dict[MessageId, OtterMessage] = field(default_factory=dict)
    pending: dict[MessageId, _Pending] = field(default_factory=dict)
    next_msg: int = 1

    def other(self, user: UserId) -> UserId:
        if user == self.users[0]:
            return self.users[1]
        if user == self.users[1]:
            return self.users[0]
        raise NotPaired(f"{user} is not in pair {self.pair}")

    def _new_id(self) -> MessageId:
        msg_id = f"{self.pair}-m{self.next_msg}"
        self.next_msg += 1
        return msg_id

    def share_state(
        self,
        sender: UserId,
        state: StateKind,
        available: StateList | None,
        provenance: Provenance,
        now: float,
        notified_state: StateKind | None = None,
    ) -> OtterMessage:
        """Append a state share.

        For list provenances the state must be on the served list; for a
        notification share it must match the notified suggestion.
        """
        self.other(sender)  # membership check
        if provenance is Provenance.NOTIFICATION_SHARE:
            if notified_state is None or state is not notified_state:
                raise StateNotAvailable(
                    f"{state} is not the notified suggestion ({notified_state})"
                )
        else:
            if available is None or state not in available.states:
                raise StateNotAvailable(f"{state} is not on the current list")
        msg = OtterMessage(
            id=self._new_id(),
            pair=self.pair,
            sender=sender,
            kind=MessageKind.STATE_SHARE,
            sent_at=now,
            provenance=provenance,
            state=state,
        )
        self.log.append(msg)
        self.by_id[msg.id] = msg
        self.pending[msg.id] = _Pending(msg, Phase.DELIVERED)
        return msg

    def _pending_for(self, receiver: UserId, share_id: MessageId) -> _Pending:
        entry = self.pending.get(share_id)
        if entry is None:
            raise UnknownMessage(f"no pending state share {share_id}")
        if entry.message.sender == receiver:
            raise UnknownMessage(f"{share_id} was sent by {receiver}, not to them")
        self.other(receiver)
        return entry

    def view_state(self, receiver: UserId, share_id: MessageId) -> ReactPrompt:
        """Open a received share; enters react mode with the full catalog.

        Re-viewing an unresolved share is allowed (the app can be reopened).
        """
        entry = self._pending_for(receiver, share_id)
        if entry.phase in (Phase.REACTED, Phase.DISMISSED):
            raise AlreadyResolved(f"{share_id} is already {entry.phase}")
        entry.phase = Phase.VIEWED
        return ReactPrompt(share_id=share_id)

    def send_react(
        self,
        receiver: UserId,
        share_id: MessageId,
        react: ReactKind,
        via: ReactVia,
        now: float,
    ) -> OtterMessage:
        target = self.by_id.get(share_id)
        if target is not None and target.kind is MessageKind.REACT_SHARE:
            raise ReactToReact(f"{share_id} is itself a react")
        entry = self._pending_for(receiver, share_id)
        if entry.phase in (Phase.REACTED, Phase.DISMISSED):
            raise AlreadyResolved(f"{share_id} is already {entry.phase}")
        if via is ReactVia.QUICK and react not in QUICK_REACTS:
            raise IllegalQuickReact(f"{react} is not a quick react")
        if via is ReactVia.IN_APP and entry.phase is not Phase.VIEWED:
            raise NotViewed(f"{share_id} must be viewed before an in-app react")
        msg = OtterMessage(
            id=self._new_id(),
            pair=self.pair,
            sender=receiver,
            kind=MessageKind.REACT_SHARE,
            sent_at=now,
            provenance=_VIA_PROVENANCE[via],
            react=react,
            ref=share_id,
        )
        self.log.append(msg)
        self.by_id[msg.id] = msg
        entry.phase = Phase.REACTED
        entry.react_id = msg.id
        return msg

    def dont_react(self, receiver: UserId, share_id: MessageId) -> None:
        """Resolve a share without a react; emits nothing."""
        entry = self._pending_for(receiver, share_id)
        if entry.phase in (Phase.REACTED, Phase.DISMISSED):
            raise AlreadyResolved(f"{share_id} is already {entry.phase}")
        entry.phase = Phase.DISMISSED

    def view_react(
        self, user: UserId, react_id: MessageId
    ) -> tuple[ReactKind, StateKind]:
        """Look up a react addressed to this user, with the state it answers."""
        react = self.by_id.get(react_id)
        if react is None or react.kind is not MessageKind.REACT_SHARE:
            raise UnknownMessage(f"no react share {react_id}")
        if self.other(react.sender) != user:
            raise UnknownMessage(f"{react_id} is not addressed to {user}")
        referenced = self.pending[react.ref].message
        assert react.react is not None and referenced.state is not None
        return react.react, referenced.state

    def phase_of(self, share_id: MessageId) -> Phase:
        entry = self.pending.get(share_id)
        if entry is None:
            raise UnknownMessage(f"no pending state share {share_id}")
        return entry.phase
