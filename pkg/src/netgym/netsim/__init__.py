"""Deterministic packet-level network simulator.

Provides the wiring model, shortest-path forwarding, fault injection,
seeded traffic simulation and the per-port telemetry counters that the
troubleshooting tools read.
"""

from netgym.netsim.topology import (
    Interface,
    Link,
    Node,
    NodeKind,
    Topology,
    load_topology,
    serialize_topology,
    topology_to_document,
)
from netgym.netsim.forwarding import (
    FlowTableEntry,
    RoutingConfig,
    compute_forwarding,
    lookup_entry,
)
from netgym.netsim.state import (
    DirectionState,
    NetState,
    dump_ports,
    get_logs,
    list_counters,
    read_counter,
    state_hash,
)
from netgym.netsim.faults import FaultSpec, FaultTemplate, apply_fault
from netgym.netsim.traffic import PingReport, send_probe, simulate_ping, host_pairs

__all__ = [
    "Interface",
    "Link",
    "Node",
    "NodeKind",
    "Topology",
    "load_topology",
    "serialize_topology",
    "topology_to_document",
    "FlowTableEntry",
    "RoutingConfig",
    "compute_forwarding",
    "lookup_entry",
    "DirectionState",
    "NetState",
    "dump_ports",
    "get_logs",
    "list_counters",
    "read_counter",
    "state_hash",
    "FaultSpec",
    "FaultTemplate",
    "apply_fault",
    "PingReport",
    "send_probe",
    "simulate_ping",
    "host_pairs",
]
