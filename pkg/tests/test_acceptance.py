"""Acceptance gate: every release criterion, one pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from netgym.cli import main
from netgym.gateway.server import GatewayCore
from netgym.gateway.session import Session
from netgym.gateway.tools import build_registry
from netgym.gateway.wire import canonical_json, request_frame
from netgym.harness.policies import ScriptedPolicy, ScriptStep
from netgym.harness.runner import run_session
from netgym.netsim import (
    FaultSpec,
    FaultTemplate,
    NetState,
    apply_fault,
    compute_forwarding,
    load_topology,
    send_probe,
    state_hash,
)
from netgym.evaluator import score
from netgym.scenario import bundled_suite_dir, expand_variations, instantiate, load_scenario
from tests.conftest import DIAMOND_DOC
from tests.helpers import check_instance

EXPECTED_TOOLS = {
    "get_switch_logs", "get_switch_info", "ovs_dump_ports", "bmv2_dump_ports",
    "bmv2_get_counters", "bmv2_counter_read", "get_topology", "config_frr_bgp",
    "config_frr_ospf", "ovs_table_add", "ovs_table_modify", "bmv2_table_add",
    "bmv2_table_modify", "test_reachability", "submit_findings",
}

# Frozen from the independent Monte Carlo oracle (one Bernoulli draw per
# probe, random.Random(42)), computed before being compared to the walker.
ORACLE_RECEIVED = {0.1: 9014, 0.3: 7036, 0.5: 5010}


def report(criterion: str, ok: bool) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}")
    assert ok, criterion


def test_criterion_1_poc_replay(tmp_path):
    started = time.monotonic()
    result = CliRunner().invoke(
        main,
        ["run", "lossy-link-s1-s3", "--policy", "scripted:poc", "--out", str(tmp_path)],
        catch_exceptions=False,
    )
    elapsed = time.monotonic() - started
    out = tmp_path / "lossy-link-s1-s3"
    log_rows = [json.loads(l) for l in (out / "trajectory.jsonl").read_text().splitlines()]
    reach = next(r for r in log_rows if r.get("name") == "test_reachability")["observation"]
    counter = next(r for r in log_rows if r.get("name") == "bmv2_counter_read")["observation"]
    report_json = json.loads((out / "report.json").read_text())

    ok = (
        result.exit_code == 0
        and "h1 ping h2: 10 packets transmitted, 10 received, 0% packet loss" in reach.splitlines()
        and "h1 ping h3: 10 packets transmitted, 0 received, 100% packet loss" in reach.splitlines()
        and counter == "MyEgress.egress_port_counter[3]= (980 bytes, 10 packets)"
        and report_json["detection_correct"] is True
        and report_json["localization_correct"] is True
        and elapsed < 1.0
    )
    report(f"criterion 1: scripted run reproduces the reference session in {elapsed:.2f}s", ok)


def test_criterion_2_determinism(tmp_path):
    artifacts = []
    for i in range(10):
        out = tmp_path / f"run{i}"
        result = CliRunner().invoke(
            main,
            ["run", "lossy-link-s1-s3", "--policy", "scripted:poc", "--seed", "42", "--out", str(out)],
            catch_exceptions=False,
        )
        assert result.exit_code == 0
        base = out / "lossy-link-s1-s3"
        artifacts.append(
            ((base / "trajectory.jsonl").read_bytes(), (base / "counters.json").read_bytes())
        )
    ok = all(a == artifacts[0] for a in artifacts[1:])
    report("criterion 2: ten fixed-seed runs are bit-identical (logs and counter dumps)", ok)


def test_criterion_3_conservation_suite():
    started = time.monotonic()
    violations: list[str] = []
    for seed in range(100):
        violations.extend(check_instance(seed))
    elapsed = time.monotonic() - started
    ok = not violations and elapsed < 30.0
    report(
        f"criterion 3: 100 randomized instances, {len(violations)} violations, {elapsed:.1f}s",
        ok,
    )


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5])
def test_criterion_4_loss_rate_convergence(p):
    topology = load_topology(DIAMOND_DOC)
    state = NetState(topology)
    state.install_tables(compute_forwarding(topology))
    apply_fault(state, FaultSpec(FaultTemplate.LINK_LOSS, "s1->s3", {"loss_prob": p}))
    rng = random.Random(42)
    n = 10_000
    delivered = sum(1 for _ in range(n) if send_probe(state, "h1", "h3", rng))
    observed_loss = (n - delivered) / n
    ok = delivered == ORACLE_RECEIVED[p] and abs(observed_loss - p) <= 0.02
    report(
        f"criterion 4: p={p} observed loss {observed_loss:.4f}, oracle match {delivered}=={ORACLE_RECEIVED[p]}",
        ok,
    )


def test_criterion_5_unidirectional_signature():
    spec = load_scenario(bundled_suite_dir() / "unidir-down-s3-s1.yaml")
    env = instantiate(spec)
    session = Session(env, build_registry())

    ingress_s1_p3 = lambda: env.state.devices["s1"].ingress[3].as_tuple()
    egress_s1_p3 = lambda: env.state.devices["s1"].egress[3].as_tuple()
    ingress_s3_p1 = lambda: env.state.devices["s3"].ingress[1].as_tuple()

    assert ingress_s1_p3() == (0, 0)
    session.dispatch("test_reachability")
    first = (ingress_s1_p3(), egress_s1_p3(), ingress_s3_p1())
    session.dispatch("test_reachability")
    second = (ingress_s1_p3(), egress_s1_p3(), ingress_s3_p1())

    ok = (
        first[0] == second[0] == (0, 0)          # dead direction: frozen at s1 port 3
        and first[1] == (980, 10)                # live direction: s1 keeps sending
        and second[1] == (1960, 20)
        and first[2] == (980, 10)                # and s3 keeps receiving
        and second[2] == (1960, 20)
    )
    report("criterion 5: one-way outage freezes s1 ingress[3] while the reverse grows", ok)


def test_criterion_6_tool_surface():
    core = GatewayCore(load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml"))
    listed = core.handle_line(canonical_json(request_frame(1, "tools/list")))
    names = {t["name"] for t in listed["result"]["tools"]}
    surface_ok = names == EXPECTED_TOOLS and len(listed["result"]["tools"]) == 15

    spec = load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml")
    session = Session(instantiate(spec), build_registry())
    session.dispatch("test_reachability")
    adapter_calls = [
        ("get_switch_logs", {"switch": "s1"}),
        ("get_switch_info", {"switch": "s1"}),
        ("ovs_dump_ports", {"switch": "s1"}),
        ("bmv2_dump_ports", {"switch": "s1"}),
        ("bmv2_get_counters", {"switch": "s1"}),
        ("bmv2_counter_read", {"switch": "s1", "counter": "MyIngress.ingress_port_counter", "index": 1}),
        ("get_topology", {}),
    ]
    purity_ok = True
    for name, args in adapter_calls:
        before = state_hash(session.env.state)
        session.dispatch(name, args)
        purity_ok = purity_ok and state_hash(session.env.state) == before

    report("criterion 6: tools/list is exactly the fifteen tools; data adapters are pure", surface_ok and purity_ok)


def test_criterion_7_variation_soundness():
    spec = load_scenario(bundled_suite_dir() / "lossy-link-s1-s3.yaml")
    children = expand_variations(spec, {"loss_prob": [0.5, 1.0], "target": ["s1->s3", "s3->s4"]})
    assert len(children) == 4

    results = []
    for child in children:
        fault = child.faults[0]
        # An oracle policy that names the child's own injected fault.
        policy = ScriptedPolicy(
            [
                ScriptStep(
                    action="submit_findings",
                    args={"detected": True, "suspects": [f"link:{fault.link_key()}"]},
                )
            ]
        )
        trajectory = run_session(child, policy)
        child_report = score(trajectory, trajectory.findings, child.ground_truth)
        results.append(child_report.passed)
        # Cross-check: the same suspects scored against any OTHER child's
        # truth must fail, so ground truths really are per-variation.
        for other in children:
            if other.faults[0].link_key() != fault.link_key():
                cross = score(trajectory, trajectory.findings, other.ground_truth)
                assert not cross.localization_correct

    brute_count = sum(1 for r in results if r)
    ok = results == [True, True, True, True] and brute_count == 4
    report("criterion 7: 2x2 variation grid scores each child against its own fault", ok)
