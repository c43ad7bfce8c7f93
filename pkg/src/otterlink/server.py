"""Network front end: newline-delimited JSON envelopes over TCP, plus a
WebSocket bridge carrying the identical envelopes for browser clients.

Each envelope is one JSON object per line: version, type, seq (strictly
increasing per connection per direction), body. Requests are answered with an
envelope of the same type whose body carries ``re`` (the request seq); domain
errors come back as ``type: "error"`` and never kill the connection.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import socket
import struct
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .interaction import InteractionError, ReactVia
from .model import Provenance, ReactKind, StateKind, UserId
from .service import Event, OtterEngine, ServiceError, message_to_dict

logger = logging.getLogger(__name__)

WIRE_VERSION = 1
WS_MAGIC = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

REQUEST_TYPES = frozenset(
    {
        "register",
        "pair",
        "get_state_list",
        "share_state",
        "view_state",
        "send_react",
        "dont_react",
        "view_react",
        "sensor_event",
    }
)


@dataclass
class _Conn:
    send_line: Callable[[str], None]
    user: UserId | None = None
    last_in_seq: int = 0
    out_seq: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def send_envelope(self, etype: str, body: dict) -> None:
        with self.lock:
            self.out_seq += 1
            envelope = {
                "version": WIRE_VERSION,
                "type": etype,
                "seq": self.out_seq,
                "body": body,
            }
            self.send_line(json.dumps(envelope, sort_keys=True))


class OtterServer:
    """TCP acceptor, one thread per connection, with async-but-ordered event
    fan-out and per-user offline buffering."""

    def __init__(
        self,
        engine: OtterEngine,
        host: str = "127.0.0.1",
        port: int = 0,
        ws_port: int | None = None,
        tick_interval: float | None = None,
    ):
        self.engine = engine
        self.host = host
        self.port = port
        self.ws_port = ws_port
        self.tick_interval = tick_interval
        self._conns: dict[int, _Conn] = {}
        self._conns_lock = threading.Lock()
        self._offline: dict[UserId, deque] = {}
        self._next_conn = 1
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._sockets: list[socket.socket] = []

    # ------------------------------------------------------------------
    # lifecycle

    def start(self) -> None:
        self._listen(self.port, self._serve_tcp_conn, "tcp")
        if self.ws_port is not None:
            self._listen(self.ws_port, self._serve_ws_conn, "ws")
        if self.tick_interval:
            t = threading.Thread(target=self._tick_loop, daemon=True)
            t.start()
            self._threads.append(t)

    def _listen(self, port: int, handler, label: str) -> None:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((self.host, port))
        sock.listen(16)
        self._sockets.append(sock)
        actual = sock.getsockname()[1]
        if label == "tcp":
            self.port = actual
        else:
            self.ws_port = actual
        logger.info("listening (%s) on %s:%s", label, self.host, actual)
        t = threading.Thread(target=self._accept_loop, args=(sock, handler), daemon=True)
        t.start()
        self._threads.append(t)

    def stop(self) -> None:
        self._stop.set()
        for sock in self._sockets:
            try:
                sock.close()
            except OSError:
                pass

    def _accept_loop(self, server_sock: socket.socket, handler) -> None:
        while not self._stop.is_set():
            try:
                conn_sock, _ = server_sock.accept()
            except OSError:
                return
            t = threading.Thread(target=handler, args=(conn_sock,), daemon=True)
            t.start()

    def _tick_loop(self) -> None:
        while not self._stop.wait(self.tick_interval):
            try:
                self._fan_out(self.engine.tick())
            except Exception:
                logger.exception("tick failed")

    # ------------------------------------------------------------------
    # connection bookkeeping and fan-out

    def _track(self, conn: _Conn) -> int:
        with self._conns_lock:
            cid = self._next_conn
            self._next_conn += 1
            self._conns[cid] = conn
            return cid

    def _untrack(self, cid: int) -> None:
        with self._conns_lock:
            self._conns.pop(cid, None)

    def _bind_user(self, conn: _Conn, uid: UserId) -> None:
        if conn.user is not None:
            return
        conn.user = uid
        backlog = self._offline.get(uid)
        while backlog:
            conn.send_envelope("notification", backlog.popleft())

    def _fan_out(self, events: list[Event]) -> None:
        for uid, body in events:
            with self._conns_lock:
                targets = [c for c in self._conns.values() if c.user == uid]
            if not targets:
                buf = self._offline.setdefault(
                    uid, deque(maxlen=self.engine.config.offline_buffer_depth)
                )
                buf.append(body)
                continue
            for conn in targets:
                try:
                    conn.send_envelope("notification", body)
                except OSError:
                    pass

    # ------------------------------------------------------------------
    # envelope handling

    def handle_line(self, conn: _Conn, line: str) -> None:
        try:
            envelope = json.loads(line)
            if not isinstance(envelope, dict):
                raise ValueError("envelope must be an object")
        except ValueError as exc:
            conn.send_envelope("error", {"re": None, "code": "MALFORMED", "message": str(exc)})
            return
        seq = envelope.get("seq")
        etype = envelope.get("type")
        body = envelope.get("body") or {}
        if not isinstance(seq, int) or seq <= conn.last_in_seq:
            conn.send_envelope(
                "error",
                {
                    "re": seq if isinstance(seq, int) else None,
                    "code": "BAD_SEQ",
                    "message": f"seq must be an integer > {conn.last_in_seq}",
                },
            )
            return
        conn.last_in_seq = seq
        if etype not in REQUEST_TYPES:
            conn.send_envelope(
                "error",
                {"re": seq, "code": "UNKNOWN_TYPE", "message": f"unknown type {etype!r}"},
            )
            return
        try:
            result, events = self._dispatch(conn, etype, body)
        except (ServiceError, InteractionError) as exc:
            conn.send_envelope(
                "error", {"re": seq, "code": exc.code, "message": str(exc)}
            )
            return
        except (KeyError, TypeError, ValueError) as exc:
            conn.send_envelope(
                "error", {"re": seq, "code": "MALFORMED", "message": repr(exc)}
            )
            return
        result["re"] = seq
        conn.send_envelope(etype, result)
        self._fan_out(events)

    def _auth(self, conn: _Conn, body: dict) -> UserId:
        token = body.get("token")
        uid = self.engine.user_by_token(token) if token else None
        if uid is None:
            raise ServiceErrorBadToken("missing or invalid token")
        if conn.user is not None and conn.user != uid:
            raise ServiceErrorBadToken("connection is bound to another user")
        self._bind_user(conn, uid)
        return uid

    def _dispatch(self, conn: _Conn, etype: str, body: dict) -> tuple[dict, list[Event]]:
        engine = self.engine
        if etype == "register":
            result = engine.register(
                name=body["name"],
                tz_offset_mins=body.get("tz_offset_mins"),
                seed=body.get("seed"),
            )
            return dict(result), []
        if etype == "pair":
            uid = self._auth(conn, body)
            partner = body["partner"]
            pair, events = engine.pair(uid, partner)
            return (
                {"pair": pair.id, "users": list(pair.users), "mode": pair.mode.value},
                events,
            )
        uid = self._auth(conn, body)
        if etype == "get_state_list":
            sl = engine.get_state_list(uid)
            return (
                {
                    "window_id": sl.window_id,
                    "mode": sl.mode.value,
                    "states": [s.value for s in sl.states],
                    "social": sl.social_slot.value,
                    "sensed": sl.mode.value == "sensing_on",
                },
                [],
            )
        if etype == "share_state":
            msg, events = engine.share_state(
                uid, StateKind(body["state"]), Provenance(body["provenance"])
            )
            return {"message": message_to_dict(msg)}, events
        if etype == "view_state":
            prompt = engine.view_state(uid, body["id"])
            return (
                {
                    "id": prompt.share_id,
                    "catalog": [r.value for r in prompt.catalog],
                    "quick": [r.value for r in prompt.quick],
                },
                [],
            )
        if etype == "send_react":
            msg, events = engine.send_react(
                uid, body["id"], ReactKind(body["react"]), ReactVia(body["via"])
            )
            return {"message": message_to_dict(msg)}, events
        if etype == "dont_react":
            engine.dont_react(uid, body["id"])
            return {"ok": True}, []
        if etype == "view_react":
            react, state = engine.view_react(uid, body["id"])
            return {"react": react.value, "state": state.value, "id": body["id"]}, []
        if etype == "sensor_event":
            engine.ingest_sensor(uid, body["event"])
            return {"ok": True}, []
        raise ValueError(f"unroutable type {etype}")

    # ------------------------------------------------------------------
    # TCP transport

    def _serve_tcp_conn(self, sock: socket.socket) -> None:
        wfile = sock.makefile("wb")

        def send_line(text: str) -> None:
            wfile.write(text.encode("utf-8") + b"\n")
            wfile.flush()

        conn = _Conn(send_line=send_line)
        cid = self._track(conn)
        try:
            rfile = sock.makefile("rb")
            for raw in rfile:
                line = raw.decode("utf-8", errors="replace").strip()
                if line:
                    self.handle_line(conn, line)
        except OSError:
            pass
        finally:
            self._untrack(cid)
            try:
                sock.close()
            except OSError:
                pass

    # ------------------------------------------------------------------
    # WebSocket transport (text frames, one envelope per frame)

    def _serve_ws_conn(self, sock: socket.socket) -> None:
        try:
            if not _ws_handshake(sock):
                sock.close()
                return
        except OSError:
            return
        wlock = threading.Lock()

        def send_line(text: str) -> None:
            with wlock:
                sock.sendall(_ws_frame(text.encode("utf-8")))

        conn = _Conn(send_line=send_line)
        cid = self._track(conn)
        try:
            rfile = sock.makefile("rb")
            while True:
                message = _ws_read_message(rfile)
                if message is None:
                    break
                opcode, payload = message
                if opcode == 0x8:  # close
                    break
                if opcode == 0x9:  # ping -> pong
                    with wlock:
                        sock.sendall(_ws_frame(payload, opcode=0xA))
                    continue
                if opcode == 0x1 and payload.strip():
                    self.handle_line(conn, payload.decode("utf-8", errors="replace"))
        except OSError:
            pass
        finally:
            self._untrack(cid)
            try:
                sock.close()
            except OSError:
                pass


class ServiceErrorBadToken(ServiceError):
    code = "BAD_TOKEN"


def _ws_handshake(sock: socket.socket) -> bool:
    rfile = sock.makefile("rb")
    request = b""
    while b"\r\n\r\n" not in request:
        chunk = rfile.readline()
        if not chunk:
            return False
        request += chunk
    headers = {}
    for line in request.decode("latin-1").split("\r\n")[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    if not key or "websocket" not in headers.get("upgrade", "").lower():
        sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        return False
    accept = base64.b64encode(
        hashlib.sha1((key + WS_MAGIC).encode("latin-1")).digest()
    ).decode("latin-1")
    sock.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode("latin-1")
    )
    return True


def _ws_frame(payload: bytes, opcode: int = 0x1) -> bytes:
    header = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        header += bytes([n])
    elif n < 65536:
        header += bytes([126]) + struct.pack(">H", n)
    else:
        header += bytes([127]) + struct.pack(">Q", n)
    return header + payload


def _ws_read_frame(rfile) -> tuple[int, int, bytes] | None:
    """One frame: (fin, opcode, unmasked payload)."""
    head = rfile.read(2)
    if len(head) < 2:
        return None
    fin = head[0] >> 7
    opcode = head[0] & 0x0F
    masked = head[1] >> 7
    n = head[1] & 0x7F
    if n == 126:
        n = struct.unpack(">H", rfile.read(2))[0]
    elif n == 127:
        n = struct.unpack(">Q", rfile.read(8))[0]
    mask = rfile.read(4) if masked else b""
    payload = rfile.read(n) if n else b""
    if len(payload) < n:
        return None
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return fin, opcode, payload


def _ws_read_message(rfile) -> tuple[int, bytes] | None:
    """A whole message, reassembling continuation frames."""
    frame = _ws_read_frame(rfile)
    if frame is None:
        return None
    fin, opcode, payload = frame
    parts = [payload]
    while not fin:
        frame = _ws_read_frame(rfile)
        if frame is None:
            return None
        fin, _, payload = frame
        parts.append(payload)
    return opcode, b"".join(parts)
