from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
GOLDENS = REPO / "goldens"

sys.path.insert(0, str(REPO / "scripts"))

from gen_goldens import GOLDEN_SEQUENCE, golden_session_frames, render_files  # noqa: E402


def test_wire_goldens_are_current():
    expected = (GOLDENS / "wire" / "poc_session.ndjson").read_text(encoding="utf-8")
    assert "\n".join(golden_session_frames()) + "\n" == expected


def test_render_goldens_are_current():
    for name, content in render_files().items():
        golden = (GOLDENS / "render" / name).read_text(encoding="utf-8")
        assert content + "\n" == golden, name


def test_golden_frames_are_canonical_json():
    for line in (GOLDENS / "wire" / "poc_session.ndjson").read_text().splitlines():
        parsed = json.loads(line)
        canonical = json.dumps(parsed, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        assert canonical == line


def test_golden_sequence_covers_every_tool():
    from netgym.gateway.tools import BUILTIN_TOOL_NAMES

    called = {p["name"] for m, p in GOLDEN_SEQUENCE if m == "tools/call"}
    assert called == set(BUILTIN_TOOL_NAMES)


@pytest.mark.parametrize("line_index,needle", [
    (9, "h1 ping h3: 10 packets transmitted, 0 received, 100% packet loss"),
    (13, "(980 bytes, 10 packets)"),
])
def test_golden_response_pins(line_index, needle):
    lines = (GOLDENS / "wire" / "poc_session.ndjson").read_text().splitlines()
    assert needle in lines[line_index]
