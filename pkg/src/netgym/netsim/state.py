"""Mutable runtime state of a simulated network.

Tracks per-direction link health, per-switch flow tables, per-port
counters and device logs. A NetState has a single owner: all mutation
goes through that owner in call order, which keeps runs reproducible.

Counter semantics: every simulated packet is 98 bytes on the wire (the
size of a default ICMP echo frame). An egress counter increments when a
switch commits a packet to a link, before loss is sampled; the ingress
counter on the far side increments only if the packet survives the
directional loss trial. Counters never decrease.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from netgym.errors import IndexOutOfRange, UnknownCounter, UnknownSwitch
from netgym.netsim.forwarding import FlowTableEntry
from netgym.netsim.topology import (
    DEFAULT_COUNTERS,
    EGRESS_COUNTER,
    INGRESS_COUNTER,
    NodeKind,
    Topology,
)

PACKET_BYTES = 98


@dataclass
class DirectionState:
    """Health of one direction of a link (sender side)."""

    up: bool = True
    loss_prob: float = 0.0
    delay_us: int = 0


@dataclass
class PortStats:
    bytes: int = 0
    packets: int = 0

    def bump(self) -> None:
        self.bytes += PACKET_BYTES
        self.packets += 1

    def as_tuple(self) -> tuple[int, int]:
        return (self.bytes, self.packets)


@dataclass
class DeviceState:
    """Counters, logs and flow table for one forwarding node."""

    ingress: dict[int, PortStats] = field(default_factory=dict)
    egress: dict[int, PortStats] = field(default_factory=dict)
    tx_drops: dict[int, int] = field(default_factory=dict)
    table: list[FlowTableEntry] = field(default_factory=list)
    extra_counters: dict[str, dict[int, PortStats]] = field(default_factory=dict)


class NetState:
    """Runtime state bound to an immutable topology."""

    def __init__(self, topology: Topology):
        self.topology = topology
        self.directions: dict[tuple[str, int], DirectionState] = {}
        self.devices: dict[str, DeviceState] = {}
        self.logs: dict[str, list[str]] = {n.name: [] for n in topology.nodes}

        for link in topology.links:
            self.directions[(link.a, link.a_port)] = DirectionState(delay_us=link.delay_us)
            self.directions[(link.b, link.b_port)] = DirectionState(delay_us=link.delay_us)

        for node in topology.switches:
            dev = DeviceState()
            for iface in node.interfaces:
                dev.ingress[iface.port] = PortStats()
                dev.egress[iface.port] = PortStats()
                dev.tx_drops[iface.port] = 0
            for counter in node.extra_counters:
                dev.extra_counters[counter] = {i.port: PortStats() for i in node.interfaces}
            self.devices[node.name] = dev

    # -- link state --------------------------------------------------

    def direction(self, sender: str, port: int) -> DirectionState:
        return self.directions[(sender, port)]

    def directions_between(self, sender: str, receiver: str) -> list[DirectionState]:
        sender_node = self.topology.node(sender)
        if sender_node is None:
            return []
        return [
            self.directions[(sender, i.port)]
            for i in sender_node.interfaces_toward(receiver)
        ]

    # -- flow tables -------------------------------------------------

    def install_tables(self, tables: dict[str, list[FlowTableEntry]], replace_priority: int | None = None) -> None:
        """Install computed entries. With replace_priority set, only rows at
        that priority are swapped out, preserving manual and fault entries."""
        for switch, entries in tables.items():
            dev = self.devices[switch]
            if replace_priority is None:
                dev.table = list(entries)
            else:
                dev.table = [e for e in dev.table if e.priority != replace_priority] + list(entries)

    def upsert_entry(self, switch: str, entry: FlowTableEntry) -> None:
        dev = self.devices[switch]
        dev.table = [
            e
            for e in dev.table
            if not (e.table == entry.table and e.match_dst == entry.match_dst and e.priority == entry.priority)
        ]
        dev.table.append(entry)

    # -- counters ----------------------------------------------------

    def count_ingress(self, node: str, port: int) -> None:
        dev = self.devices.get(node)
        if dev is not None:
            dev.ingress[port].bump()

    def count_egress(self, node: str, port: int) -> None:
        dev = self.devices.get(node)
        if dev is not None:
            dev.egress[port].bump()

    def count_drop(self, node: str, port: int) -> None:
        dev = self.devices.get(node)
        if dev is not None and port in dev.tx_drops:
            dev.tx_drops[port] += 1

    # -- logs --------------------------------------------------------

    def log(self, node: str, line: str) -> None:
        self.logs[node].append(line)

    def log_drop(self, node: str, peer: str, port: int, reason: str) -> None:
        self.log(node, f"DROP dir={node}->{peer} port={port} reason={reason}")

    # -- snapshot ----------------------------------------------------

    def snapshot(self) -> dict:
        """Canonical JSON-ready view of all mutable state."""
        directions = {
            f"{sender}:{port}": {
                "up": d.up,
                "loss_prob": d.loss_prob,
                "delay_us": d.delay_us,
            }
            for (sender, port), d in sorted(self.directions.items())
        }
        devices = {}
        for name in sorted(self.devices):
            dev = self.devices[name]
            devices[name] = {
                "ingress": {str(p): dev.ingress[p].as_tuple() for p in sorted(dev.ingress)},
                "egress": {str(p): dev.egress[p].as_tuple() for p in sorted(dev.egress)},
                "tx_drops": {str(p): dev.tx_drops[p] for p in sorted(dev.tx_drops)},
                "table": [
                    {
                        "table": e.table,
                        "match_dst": e.match_dst,
                        "action": e.action,
                        "port": e.port,
                        "priority": e.priority,
                    }
                    for e in sorted(dev.table, key=lambda e: (e.table, -e.priority, e.match_dst))
                ],
                "extra_counters": {
                    c: {str(p): stats[p].as_tuple() for p in sorted(stats)}
                    for c, stats in sorted(dev.extra_counters.items())
                },
            }
        return {
            "directions": directions,
            "devices": devices,
            "logs": {n: list(self.logs[n]) for n in sorted(self.logs)},
        }


def state_hash(state: NetState) -> str:
    blob = json.dumps(state.snapshot(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# -- telemetry reads ----------------------------------------------------


def _require_switch(state: NetState, name: str, kinds: tuple[NodeKind, ...] | None = None):
    node = state.topology.node(name)
    if node is None or node.is_host:
        raise UnknownSwitch(f"no switch named {name!r}")
    if kinds is not None and node.kind not in kinds:
        expected = "/".join(k.value for k in kinds)
        raise UnknownSwitch(f"{name} is a {node.kind.value}, expected {expected}")
    return node


def list_counters(state: NetState, switch: str) -> list[str]:
    """Counter names on a BMv2 switch, default program names first."""
    node = _require_switch(state, switch, (NodeKind.BMV2_SWITCH,))
    return list(DEFAULT_COUNTERS) + list(node.extra_counters)


def read_counter(state: NetState, switch: str, counter: str, index: int) -> tuple[int, int]:
    """Current (bytes, packets) of one counter cell. Read-only."""
    node = _require_switch(state, switch, (NodeKind.BMV2_SWITCH,))
    dev = state.devices[switch]
    if counter == INGRESS_COUNTER:
        cells = dev.ingress
    elif counter == EGRESS_COUNTER:
        cells = dev.egress
    elif counter in dev.extra_counters:
        cells = dev.extra_counters[counter]
    else:
        raise UnknownCounter(f"{switch} has no counter {counter!r}")
    if index not in cells:
        raise IndexOutOfRange(f"{switch} has no port {index} (ports: {sorted(cells)})")
    return cells[index].as_tuple()


def dump_ports(state: NetState, switch: str, kinds: tuple[NodeKind, ...] | None = None) -> list[dict]:
    """Per-port status records: wiring, direction health, traffic totals."""
    node = _require_switch(state, switch, kinds)
    dev = state.devices[switch]
    records = []
    for iface in sorted(node.interfaces, key=lambda i: i.port):
        tx = state.directions[(switch, iface.port)]
        rx = state.directions[(iface.connected_to, iface.connected_port)]
        records.append(
            {
                "port": iface.port,
                "name": iface.name,
                "peer": iface.connected_to,
                "peer_port": iface.connected_port,
                "tx_up": tx.up,
                "rx_up": rx.up,
                "tx_bytes": dev.egress[iface.port].bytes,
                "tx_packets": dev.egress[iface.port].packets,
                "rx_bytes": dev.ingress[iface.port].bytes,
                "rx_packets": dev.ingress[iface.port].packets,
                "tx_drops": dev.tx_drops[iface.port],
            }
        )
    return records


def get_logs(state: NetState, device: str, tail: int = 50) -> list[str]:
    """Most recent ``tail`` log lines of any device."""
    if device not in state.logs:
        raise UnknownSwitch(f"no device named {device!r}")
    if tail <= 0:
        return []
    return state.logs[device][-tail:]
