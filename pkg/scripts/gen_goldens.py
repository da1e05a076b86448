#!/usr/bin/env python3
"""Regenerate the golden wire frames and content renderings.

The goldens pin the byte-level contract: request/response frames for a
fixed tool-call sequence against a fresh lossy-link-s1-s3 gateway, and
the content renderings agents parse. Clients in any language must
reproduce the request bytes exactly and receive the response bytes
exactly. Regenerate only on a deliberate, versioned contract change.
"""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from netgym.gateway.server import GatewayCore
from netgym.gateway.wire import canonical_json, request_frame
from netgym.scenario import bundled_suite_dir, load_scenario, parse_scenario, scenario_to_document

GOLDEN_SEQUENCE = [
    ("session/open", {}),
    ("tools/list", {}),
    ("tools/list", {"session": "s-1"}),
    ("tools/call", {"session": "s-1", "name": "get_topology", "arguments": {}}),
    ("tools/call", {"session": "s-1", "name": "test_reachability", "arguments": {}}),
    ("tools/call", {"session": "s-1", "name": "bmv2_get_counters", "arguments": {"switch": "s1"}}),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "bmv2_counter_read",
            "arguments": {"switch": "s1", "counter": "MyEgress.egress_port_counter", "index": 3},
        },
    ),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "bmv2_counter_read",
            "arguments": {"switch": "s1", "counter": "MyIngress.ingress_port_counter", "index": 3},
        },
    ),
    ("tools/call", {"session": "s-1", "name": "get_switch_logs", "arguments": {"switch": "s1", "tail": 5}}),
    ("tools/call", {"session": "s-1", "name": "get_switch_info", "arguments": {"switch": "s1"}}),
    ("tools/call", {"session": "s-1", "name": "bmv2_dump_ports", "arguments": {"switch": "s1"}}),
    ("tools/call", {"session": "s-1", "name": "ovs_dump_ports", "arguments": {"switch": "s1"}}),
    ("tools/call", {"session": "s-1", "name": "config_frr_ospf", "arguments": {"router": "r1"}}),
    ("tools/call", {"session": "s-1", "name": "config_frr_bgp", "arguments": {"router": "s2"}}),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "bmv2_table_add",
            "arguments": {"switch": "s1", "dst": "h2", "action": "forward", "port": 2, "priority": 50},
        },
    ),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "bmv2_table_modify",
            "arguments": {"switch": "s1", "dst": "h2", "action": "drop", "priority": 50},
        },
    ),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "ovs_table_add",
            "arguments": {"switch": "s1", "dst": "h2", "action": "drop"},
        },
    ),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "ovs_table_modify",
            "arguments": {"switch": "s1", "dst": "h2", "action": "drop"},
        },
    ),
    (
        "tools/call",
        {
            "session": "s-1",
            "name": "submit_findings",
            "arguments": {
                "detected": True,
                "suspects": ["link:s1-s3"],
                "explanation": "s1 egress toward s3 counts traffic; nothing returns",
            },
        },
    ),
    ("tools/call", {"session": "s-1", "name": "get_topology", "arguments": {}}),
    (
        "tools/call",
        {"session": "s-1", "name": "submit_findings", "arguments": {"detected": False}},
    ),
    ("session/close", {"session": "s-1"}),
]

# Renderings that have no upstream reference output; invented for this
# artifact and pinned here.
INVENTED_RENDERINGS = ("get_switch_info", "bmv2_dump_ports", "ovs_dump_ports", "get_switch_logs")


def golden_session_frames() -> list[str]:
    core = GatewayCore(load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml"))
    lines = []
    for i, (method, params) in enumerate(GOLDEN_SEQUENCE, start=1):
        request = request_frame(i, method, params)
        request_line = canonical_json(request)
        response_line = canonical_json(core.handle_line(request_line))
        lines.append(request_line)
        lines.append(response_line)
    return lines


def render_files() -> dict[str, str]:
    spec = load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml")
    from netgym.gateway.session import Session
    from netgym.gateway.tools import build_registry
    from netgym.scenario import instantiate

    session = Session(instantiate(spec), build_registry())
    files: dict[str, str] = {}
    files["get_topology.txt"] = session.dispatch("get_topology").content
    files["test_reachability.txt"] = session.dispatch("test_reachability").content
    files["bmv2_get_counters.txt"] = session.dispatch("bmv2_get_counters", {"switch": "s1"}).content
    files["bmv2_counter_read.txt"] = session.dispatch(
        "bmv2_counter_read", {"switch": "s1", "counter": "MyEgress.egress_port_counter", "index": 3}
    ).content
    files["get_switch_logs.txt"] = session.dispatch("get_switch_logs", {"switch": "s1", "tail": 5}).content
    files["get_switch_info.txt"] = session.dispatch("get_switch_info", {"switch": "s1"}).content
    files["bmv2_dump_ports.txt"] = session.dispatch("bmv2_dump_ports", {"switch": "s1"}).content

    # The bundled cases have no OVS switch; pin its rendering on a variant
    # diamond whose s3 is an OVS device.
    doc = scenario_to_document(spec)
    doc = copy.deepcopy(doc)
    doc["id"] = "golden-ovs-variant"
    doc["topology"]["nodes"]["s3"]["kind"] = "ovs_switch"
    variant = Session(instantiate(parse_scenario(doc)), build_registry())
    variant.dispatch("test_reachability")
    files["ovs_dump_ports.txt"] = variant.dispatch("ovs_dump_ports", {"switch": "s3"}).content
    return files


GOLDENS_README = """# Golden contract files

These files pin the wire and rendering contract of the tool gateway.

- `wire/poc_session.ndjson`: alternating request/response frames for a
  fixed call sequence against a freshly served `lossy-link-s1-s3`
  scenario (session ids and frame ids restart on a fresh server, so the
  exchange is reproducible byte for byte). Frames are minified JSON with
  lexicographically sorted keys, UTF-8, one per line. Any client must
  produce byte-identical request lines and will receive byte-identical
  response lines.
- `render/*.txt`: the exact observation text each tool returns at a
  defined point in that scenario (after one `test_reachability` sweep).

Renderings for {invented} have no upstream reference output; they are
invented by this project and pinned here.

Regenerate with `python3 scripts/gen_goldens.py` only as a deliberate,
versioned contract change.
"""


def main() -> None:
    goldens = REPO / "goldens"
    (goldens / "wire").mkdir(parents=True, exist_ok=True)
    (goldens / "render").mkdir(parents=True, exist_ok=True)

    frames = golden_session_frames()
    (goldens / "wire" / "poc_session.ndjson").write_text("\n".join(frames) + "\n", encoding="utf-8")

    for name, content in render_files().items():
        (goldens / "render" / name).write_text(content + "\n", encoding="utf-8")

    (goldens / "README.md").write_text(
        GOLDENS_README.format(invented=", ".join(f"`{n}`" for n in INVENTED_RENDERINGS)),
        encoding="utf-8",
    )
    print(f"wrote {len(frames)} frames and {len(render_files())} renderings under {goldens}")


if __name__ == "__main__":
    main()
