"""Shared randomized-instance machinery for the property suites.

Generates connected topologies of up to 8 switches with hosts hanging
off random switches, injects random faults, pushes random ping batches,
and checks the counter laws: per-direction conservation, the fixed
98-byte packet size, and monotonicity.
"""

from __future__ import annotations

import random
from collections import defaultdict

from netgym.netsim import (
    FaultSpec,
    FaultTemplate,
    NetState,
    apply_fault,
    compute_forwarding,
    load_topology,
    simulate_ping,
)
from netgym.netsim.state import PACKET_BYTES


def random_topology_doc(rng: random.Random) -> dict:
    n_switches = rng.randint(2, 8)
    n_hosts = rng.randint(2, 4)
    switches = [f"s{i + 1}" for i in range(n_switches)]
    hosts = [f"h{i + 1}" for i in range(n_hosts)]

    edges: set[tuple[str, str]] = set()
    for i in range(1, n_switches):
        a, b = switches[rng.randrange(i)], switches[i]
        edges.add((min(a, b), max(a, b)))
    for _ in range(rng.randint(0, n_switches)):
        a, b = rng.sample(switches, 2)
        edges.add((min(a, b), max(a, b)))

    wires = sorted(edges)
    for host in hosts:
        wires.append((host, rng.choice(switches)))

    next_port: dict[str, int] = defaultdict(lambda: 1)
    interfaces: dict[str, list[dict]] = defaultdict(list)
    for a, b in wires:
        pa, pb = next_port[a], next_port[b]
        next_port[a], next_port[b] = pa + 1, pb + 1
        interfaces[a].append({"name": f"eth{pa - 1}", "port": pa, "connected_to": b, "connected_port": pb})
        interfaces[b].append({"name": f"eth{pb - 1}", "port": pb, "connected_to": a, "connected_port": pa})

    nodes = {h: {"kind": "host", "interfaces": interfaces[h]} for h in hosts}
    for s in switches:
        nodes[s] = {"kind": "bmv2_switch", "interfaces": interfaces[s]}
    return {"schema": 1, "nodes": nodes}


def random_faults(rng: random.Random, topology) -> list[FaultSpec]:
    switch_links = [l for l in topology.links if not topology.node(l.a).is_host and not topology.node(l.b).is_host]
    hosts = [h.name for h in topology.hosts]
    switches = [s.name for s in topology.switches]
    faults: list[FaultSpec] = []
    for _ in range(rng.randint(0, 3)):
        kind = rng.choice(["loss", "unidir", "bidir", "misconfig"])
        if kind == "misconfig" or not switch_links:
            faults.append(
                FaultSpec(
                    FaultTemplate.TABLE_MISCONFIG,
                    rng.choice(switches),
                    {"dst": rng.choice(hosts), "action": "drop"},
                )
            )
            continue
        link = rng.choice(switch_links)
        ends = [link.a, link.b]
        rng.shuffle(ends)
        target = f"{ends[0]}->{ends[1]}"
        if kind == "loss":
            faults.append(FaultSpec(FaultTemplate.LINK_LOSS, target, {"loss_prob": rng.random()}))
        elif kind == "unidir":
            faults.append(FaultSpec(FaultTemplate.LINK_DOWN_UNIDIR, target))
        else:
            faults.append(FaultSpec(FaultTemplate.LINK_DOWN_BIDIR, f"{ends[0]}-{ends[1]}"))
    return faults


def collect_counters(state: NetState) -> dict[tuple[str, str, int], int]:
    cells = {}
    for name, dev in state.devices.items():
        for port, stats in dev.ingress.items():
            cells[(name, "in", port)] = stats.packets
        for port, stats in dev.egress.items():
            cells[(name, "eg", port)] = stats.packets
    return cells


def check_instance(seed: int) -> list[str]:
    """Run one randomized instance; returns human-readable violations."""
    rng = random.Random(seed)
    topology = load_topology(random_topology_doc(rng))
    state = NetState(topology)
    state.install_tables(compute_forwarding(topology))
    for fault in random_faults(rng, topology):
        apply_fault(state, fault)

    violations: list[str] = []
    hosts = [h.name for h in topology.hosts]
    previous = collect_counters(state)
    for _ in range(rng.randint(1, 3)):
        src, dst = rng.sample(hosts, 2)
        simulate_ping(state, src, dst, rng.randint(1, 20), rng)
        current = collect_counters(state)
        for cell, value in current.items():
            if value < previous[cell]:
                violations.append(f"seed {seed}: counter {cell} decreased {previous[cell]} -> {value}")
        previous = current

    # Byte/packet coupling everywhere.
    for name, dev in state.devices.items():
        for side_name, side in (("in", dev.ingress), ("eg", dev.egress)):
            for port, stats in side.items():
                if stats.bytes != PACKET_BYTES * stats.packets:
                    violations.append(
                        f"seed {seed}: {name} {side_name}[{port}] bytes {stats.bytes} != 98*{stats.packets}"
                    )

    # Per-direction conservation over switch-to-switch links.
    for link in topology.links:
        for sender, s_port, receiver, r_port in (
            (link.a, link.a_port, link.b, link.b_port),
            (link.b, link.b_port, link.a, link.a_port),
        ):
            if topology.node(sender).is_host or topology.node(receiver).is_host:
                continue
            sent = state.devices[sender].egress[s_port].packets
            got = state.devices[receiver].ingress[r_port].packets
            direction = state.direction(sender, s_port)
            if got > sent:
                violations.append(f"seed {seed}: {sender}->{receiver} ingress {got} > egress {sent}")
            if direction.up and direction.loss_prob == 0.0 and got != sent:
                violations.append(
                    f"seed {seed}: clean direction {sender}->{receiver} ingress {got} != egress {sent}"
                )
    return violations
