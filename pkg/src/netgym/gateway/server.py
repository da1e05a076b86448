"""The gateway service external agents attach to.

One server carries one scenario; every session/open instantiates a
fresh, isolated environment for that scenario. Transport is either a
local TCP socket or the process's own stdin/stdout; both speak the same
newline-delimited frames. Malformed frames are answered with an error
frame and the connection stays up.
"""

from __future__ import annotations

import socketserver
import threading
from typing import IO

from netgym.errors import NetGymError, ProtocolError
from netgym.evaluator import score
from netgym.gateway.session import Session
from netgym.gateway.tools import build_registry
from netgym.gateway.wire import (
    METHOD_SESSION_CLOSE,
    METHOD_SESSION_OPEN,
    METHOD_TOOLS_CALL,
    METHOD_TOOLS_LIST,
    canonical_json,
    decode_frame,
    error_frame,
    result_frame,
)
from netgym.harness.trajectory import OUTCOME_AGENT_ERROR, OUTCOME_SUBMITTED
from netgym.netsim.topology import serialize_topology
from netgym.scenario import ScenarioSpec, instantiate


class GatewayCore:
    """Transport-independent frame handling and session bookkeeping."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.registry = build_registry()
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._counter = 0
        self._lock = threading.Lock()

    def handle_line(self, line: str) -> dict:
        try:
            frame = decode_frame(line)
        except ValueError as exc:
            return error_frame(None, "protocol_error", f"bad frame: {exc}")
        if not isinstance(frame, dict) or "method" not in frame:
            return error_frame(None, "protocol_error", "frame needs 'id' and 'method'")
        frame_id = frame.get("id")
        method = frame["method"]
        params = frame.get("params", {})
        if not isinstance(params, dict):
            return error_frame(frame_id, "protocol_error", "params must be a mapping")
        try:
            if method == METHOD_SESSION_OPEN:
                return result_frame(frame_id, self._open(params))
            if method == METHOD_TOOLS_LIST:
                return result_frame(frame_id, self._list(params))
            if method == METHOD_TOOLS_CALL:
                return result_frame(frame_id, self._call(params))
            if method == METHOD_SESSION_CLOSE:
                return result_frame(frame_id, self._close(params))
            return error_frame(frame_id, "protocol_error", f"unknown method {method!r}")
        except NetGymError as exc:
            return error_frame(frame_id, exc.code, exc.message)
        except KeyError as exc:
            return error_frame(frame_id, "protocol_error", f"missing parameter {exc}")

    def _open(self, params: dict) -> dict:
        requested = params.get("scenario")
        if requested is not None and requested != self.spec.id:
            raise ProtocolError(f"this gateway serves {self.spec.id!r}, not {requested!r}")
        env = instantiate(self.spec)
        with self._lock:
            self._counter += 1
            session_id = f"s-{self._counter}"
            session = Session(env, self.registry, session_id)
            self._sessions[session_id] = session
            self._locks[session_id] = threading.Lock()
        return {
            "session": session_id,
            "scenario": self.spec.id,
            "step_budget": self.spec.step_budget,
            "task_intent": self.spec.task_intent,
            "topology": serialize_topology(env.topology),
        }

    def _session(self, params: dict) -> Session:
        session_id = params["session"]
        session = self._sessions.get(session_id)
        if session is None:
            raise ProtocolError(f"no open session {session_id!r}")
        return session

    def _list(self, params: dict) -> dict:
        if "session" in params:
            session = self._session(params)
            tools = session.list_tools()
        else:
            tools = self.registry.list()
        return {"tools": [d.to_dict() for d in tools]}

    def _call(self, params: dict) -> dict:
        session = self._session(params)
        name = params["name"]
        arguments = params.get("arguments", {})
        thought = params.get("thought")
        with self._locks[session.id]:
            result = session.dispatch(name, arguments, thought=thought)
        payload = result.to_dict()
        payload["step"] = session.steps_used
        return payload

    def _close(self, params: dict) -> dict:
        session = self._session(params)
        with self._lock:
            self._sessions.pop(session.id, None)
            self._locks.pop(session.id, None)
        from netgym.harness.runner import _trajectory_from_session

        trajectory = _trajectory_from_session(session, self.spec)
        outcome = OUTCOME_SUBMITTED if session.sealed else OUTCOME_AGENT_ERROR
        trajectory.seal(outcome, session.findings)
        report = score(trajectory, session.findings, self.spec.ground_truth)
        return {"closed": True, "outcome": outcome, "report": report.to_dict()}

    def seal_open_sessions(self) -> int:
        """Drop all open sessions (used on shutdown); returns how many."""
        with self._lock:
            count = len(self._sessions)
            self._sessions.clear()
            self._locks.clear()
        return count


class _FrameHandler(socketserver.StreamRequestHandler):
    def handle(self):
        core: GatewayCore = self.server.core  # type: ignore[attr-defined]
        for raw in self.rfile:
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            response = core.handle_line(line)
            self.wfile.write(canonical_json(response).encode("utf-8") + b"\n")
            self.wfile.flush()


class GatewayServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, spec: ScenarioSpec, host: str = "127.0.0.1", port: int = 0):
        self.core = GatewayCore(spec)
        super().__init__((host, port), _FrameHandler)

    @property
    def endpoint(self) -> tuple[str, int]:
        return self.server_address[0], self.server_address[1]

    def serve_background(self) -> threading.Thread:
        thread = threading.Thread(target=self.serve_forever, daemon=True)
        thread.start()
        return thread


def serve_stdio(spec: ScenarioSpec, stdin: IO[str], stdout: IO[str]) -> None:
    """Frame loop over text streams; returns at end of input."""
    core = GatewayCore(spec)
    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        stdout.write(canonical_json(core.handle_line(line)) + "\n")
        stdout.flush()
    core.seal_open_sessions()
