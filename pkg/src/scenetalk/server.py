"""The network face of a session: snapshot/SSG fetch plus a live stream.

One driver connection may send user_input and nav messages; any number
of observers receive the same outbound traffic (reply, utterance,
scene_delta, error).  Every outbound message carries a per-connection
sequence number, and a scene_delta is always sent after the reply it
belongs to, so clients can apply deltas against a consistent transcript
order.  Read-only requests (snapshot, ssg_dump) are answered on any
connection.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .scenefile import scene_document
from .session import NavCommand, Session, _delta_payload
from .ssg import build_ssg, serialize_ssg

DRIVER_OCCUPIED = "session occupied"


class _Connection:
    def __init__(self, websocket: WebSocket, role: str):
        self.websocket = websocket
        self.role = role
        self.seq = 0

    async def send(self, type_: str, payload) -> None:
        self.seq += 1
        await self.websocket.send_text(
            json.dumps({"type": type_, "seq": self.seq, "payload": payload})
        )


class Hub:
    """Tracks live connections and fans outbound messages to all of them."""

    def __init__(self):
        self.connections: list[_Connection] = []

    @property
    def has_driver(self) -> bool:
        return any(c.role == "driver" for c in self.connections)

    def register(self, connection: _Connection) -> None:
        self.connections.append(connection)

    def unregister(self, connection: _Connection) -> None:
        if connection in self.connections:
            self.connections.remove(connection)

    async def broadcast(self, type_: str, payload) -> None:
        for connection in list(self.connections):
            try:
                await connection.send(type_, payload)
            except Exception:
                self.unregister(connection)


def _snapshot_payload(session: Session) -> dict:
    snapshot = session.host.snapshot()
    return {"version": snapshot.version, "scene": scene_document(snapshot)}


def _ssg_payload(session: Session) -> str:
    return serialize_ssg(build_ssg(session.host.snapshot()))


def _player_delta_payload(session: Session) -> dict:
    """Nav changes the player but applies no modification delta; observers
    still need the new pose.  Sent as a no-op-version scene_delta."""
    snapshot = session.host.snapshot()
    version = snapshot.version
    pose = snapshot.player
    return {
        "base_version": version,
        "result_version": version,
        "entries": [
            ["player", "position", None, pose.position.to_list()],
            ["player", "yaw", None, pose.yaw],
        ],
        "created_ids": [],
    }


def create_app(session: Session) -> FastAPI:
    app = FastAPI(title="scenetalk")
    hub = Hub()
    app.state.session = session
    app.state.hub = hub

    @app.get("/snapshot")
    def snapshot() -> JSONResponse:
        return JSONResponse(_snapshot_payload(session))

    @app.get("/ssg")
    def ssg() -> PlainTextResponse:
        return PlainTextResponse(_ssg_payload(session))

    @app.websocket("/stream")
    async def stream(websocket: WebSocket, role: str = "driver"):
        await websocket.accept()
        if role not in ("driver", "observer"):
            await websocket.send_text(json.dumps(
                {"type": "error", "seq": 1, "payload": {"reason": f"unknown role {role!r}"}}
            ))
            await websocket.close(code=1008)
            return
        if role == "driver" and hub.has_driver:
            await websocket.send_text(json.dumps(
                {"type": "error", "seq": 1, "payload": {"reason": DRIVER_OCCUPIED}}
            ))
            await websocket.close(code=1008)
            return

        connection = _Connection(websocket, role)
        hub.register(connection)
        await connection.send("snapshot", _snapshot_payload(session))
        try:
            while connection in hub.connections:
                raw = await websocket.receive_text()
                await _dispatch(connection, raw)
        except WebSocketDisconnect:
            pass
        finally:
            hub.unregister(connection)

    async def _dispatch(connection: _Connection, raw: str) -> None:
        try:
            message = json.loads(raw)
            if not isinstance(message, dict):
                raise ValueError("message must be a JSON object")
            type_ = message["type"]
        except (ValueError, KeyError) as e:
            await _violation(connection, f"malformed message: {e}")
            return

        if type_ == "snapshot":
            await connection.send("snapshot", _snapshot_payload(session))
        elif type_ == "ssg_dump":
            await connection.send("ssg_dump", {"text": _ssg_payload(session)})
        elif type_ == "user_input":
            if connection.role != "driver":
                await _violation(connection, "observers cannot send user_input")
                return
            text = message.get("text")
            if not isinstance(text, str) or not text.strip():
                await _violation(connection, "user_input needs non-empty text")
                return
            event = session.handle_user_input(text)
            entry = session.transcript[-1]
            for extra in entry.utterances:
                if extra != event:
                    await hub.broadcast(
                        "utterance", {"kind": extra.kind, "text": extra.text}
                    )
            if event.kind == "error_notice":
                await hub.broadcast("error", {"reason": event.text})
                return
            await hub.broadcast("reply", {"text": event.text})
            if entry.delta is not None:
                await hub.broadcast("scene_delta", _delta_payload(entry.delta))
        elif type_ == "nav":
            if connection.role != "driver":
                await _violation(connection, "observers cannot send nav")
                return
            try:
                cmd = NavCommand(
                    kind=message.get("kind", ""),
                    magnitude=float(message.get("magnitude", 0.0)),
                )
            except (TypeError, ValueError) as e:
                await _violation(connection, f"bad nav command: {e}")
                return
            session.navigate(cmd)
            await hub.broadcast("scene_delta", _player_delta_payload(session))
        else:
            await _violation(connection, f"unknown message type {type_!r}")

    async def _violation(connection: _Connection, reason: str) -> None:
        """Protocol violations close the offending connection only."""
        try:
            await connection.send("error", {"reason": reason})
            await connection.websocket.close(code=1008)
        finally:
            hub.unregister(connection)

    return app
