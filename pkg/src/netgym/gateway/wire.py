"""Wire framing: one canonical-JSON object per line.

Requests carry ``id``, ``method`` and ``params``; responses repeat the
id with either ``result`` or ``error``. Frames are minified JSON with
lexicographically sorted keys and UTF-8 text, so any client library
that follows the same two rules produces byte-identical frames.
"""

from __future__ import annotations

import json
from typing import Any

METHOD_SESSION_OPEN = "session/open"
METHOD_SESSION_CLOSE = "session/close"
METHOD_TOOLS_LIST = "tools/list"
METHOD_TOOLS_CALL = "tools/call"

METHODS = (METHOD_SESSION_OPEN, METHOD_SESSION_CLOSE, METHOD_TOOLS_LIST, METHOD_TOOLS_CALL)


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def encode_frame(frame: dict) -> bytes:
    return canonical_json(frame).encode("utf-8") + b"\n"


def decode_frame(line: bytes | str):
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    return json.loads(line)


def request_frame(frame_id: int, method: str, params: dict | None = None) -> dict:
    return {"id": frame_id, "method": method, "params": params or {}}


def result_frame(frame_id, result: dict) -> dict:
    return {"id": frame_id, "result": result}


def error_frame(frame_id, code: str, message: str) -> dict:
    return {"id": frame_id, "error": {"code": code, "message": message}}
