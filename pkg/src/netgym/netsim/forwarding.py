"""Shortest-path forwarding tables.

Tables are computed once per explicit control-plane invocation; injected
faults never trigger rerouting, so a lossy link stays on-path until an
agent reconfigures routing.

Path selection is hop-count shortest path per destination host. When two
neighbors offer equal cost the lexicographically greatest next-hop name
wins, so equal-cost choices always resolve the same way.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from netgym.errors import PartitionedTopology
from netgym.netsim.topology import Node, NodeKind, Topology

DEFAULT_PRIORITY = 100

_DEFAULT_TABLE = {
    NodeKind.BMV2_SWITCH: "MyIngress.ipv4_lpm",
    NodeKind.OVS_SWITCH: "flows",
    NodeKind.FRR_ROUTER: "rib",
}


def default_table(kind: NodeKind) -> str:
    return _DEFAULT_TABLE[kind]


@dataclass(frozen=True)
class FlowTableEntry:
    """One match/action row. action is 'forward' (with port) or 'drop'."""

    table: str
    match_dst: str
    action: str
    port: int | None = None
    priority: int = DEFAULT_PRIORITY

    def matches(self, dst: str) -> bool:
        if self.match_dst.endswith("*"):
            return dst.startswith(self.match_dst[:-1])
        return self.match_dst == dst


@dataclass
class RoutingConfig:
    """Declarative adjacency filter for one router.

    ``neighbors=None`` enables every physical adjacency. An adjacency is
    usable only if both endpoints enable it; hosts and plain switches
    always do.
    """

    node: str
    enabled: bool = True
    neighbors: list[str] | None = None

    def allows(self, peer: str) -> bool:
        if not self.enabled:
            return False
        return self.neighbors is None or peer in self.neighbors


def _adjacency(topology: Topology, routing: dict[str, RoutingConfig]) -> dict[str, list[str]]:
    def allows(node: str, peer: str) -> bool:
        cfg = routing.get(node)
        return cfg.allows(peer) if cfg is not None else True

    adj: dict[str, set[str]] = {n.name: set() for n in topology.nodes}
    for link in topology.links:
        if allows(link.a, link.b) and allows(link.b, link.a):
            adj[link.a].add(link.b)
            adj[link.b].add(link.a)
    return {name: sorted(peers) for name, peers in adj.items()}


def _bfs_distances(adj: dict[str, list[str]], origin: str) -> dict[str, int]:
    dist = {origin: 0}
    queue = deque([origin])
    while queue:
        current = queue.popleft()
        for peer in adj[current]:
            if peer not in dist:
                dist[peer] = dist[current] + 1
                queue.append(peer)
    return dist


def compute_forwarding(
    topology: Topology,
    routing: dict[str, RoutingConfig] | None = None,
) -> dict[str, list[FlowTableEntry]]:
    """Build one forward entry per (switch, destination host).

    Raises PartitionedTopology if any host is unreachable from any
    forwarding node under the enabled adjacencies.
    """
    routing = routing or {}
    adj = _adjacency(topology, routing)
    switches = topology.switches
    tables: dict[str, list[FlowTableEntry]] = {sw.name: [] for sw in switches}

    for host in sorted(topology.hosts, key=lambda h: h.name):
        dist = _bfs_distances(adj, host.name)
        for sw in switches:
            if sw.name not in dist:
                raise PartitionedTopology(
                    f"host {host.name} unreachable from {sw.name} under current routing"
                )
            candidates = [p for p in adj[sw.name] if dist.get(p, -1) == dist[sw.name] - 1]
            next_hop = max(candidates)
            port = min(i.port for i in sw.interfaces_toward(next_hop))
            tables[sw.name].append(
                FlowTableEntry(
                    table=default_table(sw.kind),
                    match_dst=host.name,
                    action="forward",
                    port=port,
                    priority=DEFAULT_PRIORITY,
                )
            )
    return tables


def lookup_entry(entries: list[FlowTableEntry], dst: str) -> FlowTableEntry | None:
    """Highest-priority matching entry; ties broken by lexicographic match."""
    matching = [e for e in entries if e.matches(dst)]
    if not matching:
        return None
    return sorted(matching, key=lambda e: (-e.priority, e.match_dst))[0]
