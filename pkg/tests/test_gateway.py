from __future__ import annotations

import copy

import pytest

from netgym.errors import ArgsInvalid
from netgym.gateway.session import Session
from netgym.gateway.tools import ACTION, BUILTIN_TOOL_NAMES, DATA_ADAPTER, ToolDescriptor, build_registry
from netgym.netsim import state_hash
from netgym.scenario import bundled_suite_dir, load_scenario, instantiate, parse_scenario
from tests.test_scenario import minimal_doc

FIG_TOOLS = (
    "get_switch_logs",
    "get_switch_info",
    "ovs_dump_ports",
    "bmv2_dump_ports",
    "bmv2_get_counters",
    "bmv2_counter_read",
    "get_topology",
    "config_frr_bgp",
    "config_frr_ospf",
    "ovs_table_add",
    "ovs_table_modify",
    "bmv2_table_add",
    "bmv2_table_modify",
    "test_reachability",
    "submit_findings",
)

DATA_ADAPTERS = (
    "get_switch_logs",
    "get_switch_info",
    "ovs_dump_ports",
    "bmv2_dump_ports",
    "bmv2_get_counters",
    "bmv2_counter_read",
    "get_topology",
)


@pytest.fixture
def poc_session() -> Session:
    spec = load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml")
    return Session(instantiate(spec), build_registry())


def test_registry_has_exactly_the_fifteen_tools():
    registry = build_registry()
    assert tuple(registry.descriptors) == FIG_TOOLS
    assert BUILTIN_TOOL_NAMES == FIG_TOOLS
    assert len(FIG_TOOLS) == 15


def test_descriptions_pinned():
    registry = build_registry()
    assert registry.descriptor("test_reachability").description == "Check reachability between all hosts"
    assert registry.descriptor("bmv2_counter_read").description == "Read counter values in a BMv2 P4 switch"
    assert registry.descriptor("bmv2_get_counters").description == "Get counters in a BMv2 P4 switch"
    assert registry.descriptor("get_topology").description == "Obtain structured topology information"
    assert registry.descriptor("get_switch_logs").description == "Get device running logs/information"
    assert registry.descriptor("config_frr_ospf").description == "Configure BGP/OSPF in FRRouting"


def test_categories():
    registry = build_registry()
    for name in DATA_ADAPTERS:
        assert registry.descriptor(name).category == DATA_ADAPTER, name
    for name in set(FIG_TOOLS) - set(DATA_ADAPTERS):
        assert registry.descriptor(name).category == ACTION, name


def test_duplicate_registration_rejected():
    registry = build_registry()
    with pytest.raises(ArgsInvalid):
        registry.register(
            ToolDescriptor("test_reachability", "x", {"type": "object", "properties": {}}, ACTION),
            None,
        )


def test_reachability_content_pins_exact_lines(poc_session):
    result = poc_session.dispatch("test_reachability")
    assert result.ok
    lines = result.content.splitlines()
    assert "h1 ping h2: 10 packets transmitted, 10 received, 0% packet loss" in lines
    assert "h1 ping h3: 10 packets transmitted, 0 received, 100% packet loss" in lines
    assert "h2 ping h3: 10 packets transmitted, 10 received, 0% packet loss" in lines
    assert len(lines) == 3


def test_counter_listing_and_read_renderings(poc_session):
    poc_session.dispatch("test_reachability")
    listing = poc_session.dispatch("bmv2_get_counters", {"switch": "s1"})
    assert listing.content == "'MyIngress.ingress_port_counter', 'MyEgress.egress_port_counter'"
    read = poc_session.dispatch(
        "bmv2_counter_read",
        {"switch": "s1", "counter": "MyEgress.egress_port_counter", "index": 3},
    )
    assert read.content == "MyEgress.egress_port_counter[3]= (980 bytes, 10 packets)"
    assert read.data == {"bytes": 980, "packets": 10}


def test_get_topology_matches_prompt_form(poc_session):
    result = poc_session.dispatch("get_topology")
    assert "s1: [{'name': 'eth0', 'port': 1, 'connected_to': 'h1', 'connected_port': 1}" in result.content


def test_data_adapters_leave_state_untouched(poc_session):
    poc_session.dispatch("test_reachability")
    args_by_tool = {
        "get_switch_logs": {"switch": "s1"},
        "get_switch_info": {"switch": "s1"},
        "ovs_dump_ports": {"switch": "s1"},  # errors (kind), still must not mutate
        "bmv2_dump_ports": {"switch": "s1"},
        "bmv2_get_counters": {"switch": "s1"},
        "bmv2_counter_read": {"switch": "s1", "counter": "MyEgress.egress_port_counter", "index": 3},
        "get_topology": {},
    }
    for name in DATA_ADAPTERS:
        before = state_hash(poc_session.env.state)
        poc_session.dispatch(name, args_by_tool[name])
        assert state_hash(poc_session.env.state) == before, name


def test_bad_args_are_error_results_not_crashes(poc_session):
    result = poc_session.dispatch(
        "bmv2_counter_read", {"switch": "s1", "counter": "MyEgress.egress_port_counter", "index": 99}
    )
    assert not result.ok and result.error["code"] == "index_out_of_range"
    result = poc_session.dispatch("bmv2_counter_read", {"switch": "s1"})
    assert not result.ok and result.error["code"] == "args_invalid"
    result = poc_session.dispatch("bmv2_get_counters", {"switch": "s1", "bogus": 1})
    assert not result.ok and result.error["code"] == "args_invalid"
    result = poc_session.dispatch("warp_drive", {})
    assert not result.ok and result.error["code"] == "unknown_tool"
    result = poc_session.dispatch("ovs_dump_ports", {"switch": "s1"})
    assert not result.ok and result.error["code"] == "unknown_switch"
    result = poc_session.dispatch("config_frr_bgp", {"router": "s1"})
    assert not result.ok and result.error["code"] == "unknown_target"


def test_every_call_recorded_once_in_order(poc_session):
    poc_session.dispatch("test_reachability")
    poc_session.dispatch("warp_drive", {})
    poc_session.dispatch("bmv2_get_counters", {"switch": "s1"})
    names = [r.call.name for r in poc_session.records]
    assert names == ["test_reachability", "warp_drive", "bmv2_get_counters"]
    assert [r.call.step for r in poc_session.records] == [1, 2, 3]


def test_allowlist_filters_listing_and_dispatch():
    doc = minimal_doc(tool_allowlist=["test_reachability", "submit_findings"])
    session = Session(instantiate(parse_scenario(doc)), build_registry())
    assert [d.name for d in session.list_tools()] == ["test_reachability", "submit_findings"]
    result = session.dispatch("bmv2_get_counters", {"switch": "s1"})
    assert not result.ok and result.error["code"] == "not_allowlisted"
    assert session.dispatch("test_reachability").ok


def test_budget_exhaustion_not_recorded():
    doc = minimal_doc(step_budget=2)
    session = Session(instantiate(parse_scenario(doc)), build_registry())
    assert session.dispatch("test_reachability").ok
    assert session.dispatch("get_topology").ok
    refused = session.dispatch("get_topology")
    assert not refused.ok and refused.error["code"] == "budget_exhausted"
    assert session.steps_used == 2


def test_submit_seals_session(poc_session):
    result = poc_session.dispatch(
        "submit_findings",
        {"detected": True, "suspects": ["link:s1-s3"], "explanation": "one direction dead"},
    )
    assert result.ok and result.data == {"sealed": True}
    assert poc_session.sealed
    assert poc_session.findings.suspects == ("link:s1-s3",)

    blocked = poc_session.dispatch("get_topology")
    assert not blocked.ok and blocked.error["code"] == "session_sealed"
    again = poc_session.dispatch("submit_findings", {"detected": False})
    assert not again.ok and again.error["code"] == "already_submitted"


def test_submit_with_defaults_accepted(poc_session):
    result = poc_session.dispatch("submit_findings", {})
    assert result.ok
    assert poc_session.findings.detected is True
    assert poc_session.findings.suspects == ()


def test_table_add_then_modify_and_reroute(poc_session):
    add = poc_session.dispatch(
        "bmv2_table_add", {"switch": "s1", "dst": "h3", "action": "forward", "port": 2, "priority": 300}
    )
    assert add.ok
    dup = poc_session.dispatch(
        "bmv2_table_add", {"switch": "s1", "dst": "h3", "action": "forward", "port": 2, "priority": 300}
    )
    assert not dup.ok and dup.error["code"] == "entry_exists"
    # The new higher-priority route avoids the lossy s3 branch entirely.
    reach = poc_session.dispatch("test_reachability")
    assert "h1 ping h3: 10 packets transmitted, 10 received, 0% packet loss" in reach.content
    mod = poc_session.dispatch(
        "bmv2_table_modify", {"switch": "s1", "dst": "h3", "action": "drop", "priority": 300}
    )
    assert mod.ok
    missing = poc_session.dispatch(
        "bmv2_table_modify", {"switch": "s1", "dst": "h9", "action": "drop", "priority": 300}
    )
    assert not missing.ok and missing.error["code"] == "no_such_entry"


def test_frr_config_recomputes_routes():
    doc = minimal_doc()
    doc["topology"] = copy.deepcopy(doc["topology"])
    doc["topology"]["nodes"]["s3"]["kind"] = "frr_router"
    doc["faults"] = []
    doc["ground_truth"] = {"detection_expected": False}
    session = Session(instantiate(parse_scenario(doc)), build_registry())
    # Withdraw s3's adjacency to s1; s1's h3 route must fall back to s2.
    result = session.dispatch("config_frr_ospf", {"router": "s3", "neighbors": ["s4"]})
    assert result.ok
    from netgym.netsim.forwarding import lookup_entry

    entry = lookup_entry(session.env.state.devices["s1"].table, "h3")
    assert entry.port == 2


def test_at_step_fault_fires_on_schedule():
    doc = minimal_doc()
    doc["faults"] = [
        {"template": "link_loss", "target": "s1->s3", "params": {"loss_prob": 1.0}, "inject_at": 2},
    ]
    session = Session(instantiate(parse_scenario(doc)), build_registry())
    first = session.dispatch("test_reachability")
    assert "h1 ping h3: 10 packets transmitted, 10 received, 0% packet loss" in first.content
    second = session.dispatch("test_reachability")
    assert "h1 ping h3: 10 packets transmitted, 0 received, 100% packet loss" in second.content
