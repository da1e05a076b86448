"""Topology model: nodes, interfaces and bidirectional links.

A topology is immutable once loaded. Wiring is declared per interface
(``connected_to`` / ``connected_port``) and must be reciprocal: if s1 port 3
claims a connection to s3 port 1, then s3 port 1 must claim s1 port 3 back.

Two input shapes are accepted by :func:`load_topology`:

* the document form used in scenario files, a mapping with ``nodes`` where
  each node declares a ``kind`` and its interfaces;
* the bare prompt form shown to agents, a mapping from node name straight
  to its interface list. Node kinds are then inferred from the name prefix
  (``h*`` host, ``r*`` FRR router, ``ovs*`` OVS switch, anything else BMv2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import yaml

from netgym.errors import AsymmetricWiring, DanglingEndpoint, MalformedDocument

SCHEMA_VERSION = 1

_IFACE_KEYS = ("name", "port", "connected_to", "connected_port")


class NodeKind(str, Enum):
    HOST = "host"
    BMV2_SWITCH = "bmv2_switch"
    OVS_SWITCH = "ovs_switch"
    FRR_ROUTER = "frr_router"


# Counter names exposed by the default switch program.
INGRESS_COUNTER = "MyIngress.ingress_port_counter"
EGRESS_COUNTER = "MyEgress.egress_port_counter"
DEFAULT_COUNTERS = (INGRESS_COUNTER, EGRESS_COUNTER)


@dataclass(frozen=True)
class Interface:
    """One attachment point of a node, wired to a peer (node, port)."""

    name: str
    port: int
    connected_to: str
    connected_port: int


@dataclass(frozen=True)
class Link:
    """Undirected link between two (node, port) endpoints, a < b."""

    a: str
    a_port: int
    b: str
    b_port: int
    delay_us: int = 0

    @property
    def key(self) -> str:
        return f"{self.a}-{self.b}"


@dataclass(frozen=True)
class Node:
    name: str
    kind: NodeKind
    interfaces: tuple[Interface, ...]
    extra_counters: tuple[str, ...] = ()

    @property
    def is_host(self) -> bool:
        return self.kind is NodeKind.HOST

    @property
    def ports(self) -> dict[int, Interface]:
        return {i.port: i for i in self.interfaces}

    def interface_for_port(self, port: int) -> Interface | None:
        for iface in self.interfaces:
            if iface.port == port:
                return iface
        return None

    def interfaces_toward(self, peer: str) -> list[Interface]:
        return [i for i in self.interfaces if i.connected_to == peer]


@dataclass(frozen=True)
class Topology:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    name: str = ""
    _by_name: dict[str, Node] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {n.name: n for n in self.nodes})

    def node(self, name: str) -> Node | None:
        return self._by_name.get(name)

    @property
    def hosts(self) -> list[Node]:
        return [n for n in self.nodes if n.is_host]

    @property
    def switches(self) -> list[Node]:
        return [n for n in self.nodes if not n.is_host]

    def link_between(self, a: str, b: str) -> Link | None:
        lo, hi = min(a, b), max(a, b)
        for link in self.links:
            if link.a == lo and link.b == hi:
                return link
        return None


def _infer_kind(name: str) -> NodeKind:
    if name.startswith("h"):
        return NodeKind.HOST
    if name.startswith("ovs"):
        return NodeKind.OVS_SWITCH
    if name.startswith("r"):
        return NodeKind.FRR_ROUTER
    return NodeKind.BMV2_SWITCH


def _parse_interface(node_name: str, raw: object) -> Interface:
    if not isinstance(raw, dict):
        raise MalformedDocument(f"{node_name}: interface entry must be a mapping, got {type(raw).__name__}")
    unknown = set(raw) - set(_IFACE_KEYS)
    if unknown:
        raise MalformedDocument(f"{node_name}: unknown interface keys {sorted(unknown)}")
    missing = [k for k in _IFACE_KEYS if k not in raw]
    if missing:
        raise MalformedDocument(f"{node_name}: interface missing keys {missing}")
    name, port, peer, peer_port = (raw[k] for k in _IFACE_KEYS)
    if not isinstance(name, str) or not isinstance(peer, str):
        raise MalformedDocument(f"{node_name}: interface name and connected_to must be strings")
    if not isinstance(port, int) or isinstance(port, bool) or port < 1:
        raise MalformedDocument(f"{node_name}: port must be a positive integer, got {port!r}")
    if not isinstance(peer_port, int) or isinstance(peer_port, bool) or peer_port < 1:
        raise MalformedDocument(f"{node_name}: connected_port must be a positive integer, got {peer_port!r}")
    return Interface(name=name, port=port, connected_to=peer, connected_port=peer_port)


def _parse_node(name: str, raw: object) -> Node:
    if isinstance(raw, list):
        # Bare prompt form: the node maps straight to its interface list.
        kind = _infer_kind(name)
        iface_list = raw
        extra: tuple[str, ...] = ()
    elif isinstance(raw, dict):
        unknown = set(raw) - {"kind", "interfaces", "extra_counters"}
        if unknown:
            raise MalformedDocument(f"{name}: unknown node keys {sorted(unknown)}")
        kind_raw = raw.get("kind")
        if kind_raw is None:
            kind = _infer_kind(name)
        else:
            try:
                kind = NodeKind(kind_raw)
            except ValueError:
                raise MalformedDocument(f"{name}: unknown node kind {kind_raw!r}") from None
        iface_list = raw.get("interfaces")
        extra_raw = raw.get("extra_counters", [])
        if not isinstance(extra_raw, list) or not all(isinstance(c, str) for c in extra_raw):
            raise MalformedDocument(f"{name}: extra_counters must be a list of strings")
        extra = tuple(extra_raw)
    else:
        raise MalformedDocument(f"{name}: node must be a mapping or an interface list")

    if not isinstance(iface_list, list) or not iface_list:
        raise MalformedDocument(f"{name}: node needs a non-empty interface list")
    interfaces = tuple(sorted((_parse_interface(name, i) for i in iface_list), key=lambda i: i.port))

    ports = [i.port for i in interfaces]
    if len(ports) != len(set(ports)):
        raise MalformedDocument(f"{name}: duplicate port indices {ports}")
    names = [i.name for i in interfaces]
    if len(names) != len(set(names)):
        raise MalformedDocument(f"{name}: duplicate interface names {names}")
    if kind is NodeKind.HOST and len(interfaces) != 1:
        raise MalformedDocument(f"{name}: hosts have exactly one interface, got {len(interfaces)}")
    if extra and kind is NodeKind.HOST:
        raise MalformedDocument(f"{name}: hosts cannot declare counters")
    return Node(name=name, kind=kind, interfaces=interfaces, extra_counters=extra)


def _check_wiring(nodes: dict[str, Node]) -> None:
    # Dangling references first, so a missing node or port is reported as
    # such even when it also breaks reciprocity.
    for node in nodes.values():
        for iface in node.interfaces:
            peer = nodes.get(iface.connected_to)
            if peer is None:
                raise DanglingEndpoint(
                    f"{node.name} port {iface.port} connects to nonexistent node {iface.connected_to!r}"
                )
            if peer.interface_for_port(iface.connected_port) is None:
                raise DanglingEndpoint(
                    f"{node.name} port {iface.port} connects to {peer.name} port "
                    f"{iface.connected_port}, which is not declared"
                )
    for node in nodes.values():
        for iface in node.interfaces:
            back = nodes[iface.connected_to].interface_for_port(iface.connected_port)
            if back.connected_to != node.name or back.connected_port != iface.port:
                raise AsymmetricWiring(
                    f"{node.name} port {iface.port} -> {iface.connected_to} port {iface.connected_port} "
                    f"is not wired back (peer declares {back.connected_to}:{back.connected_port})"
                )


def _build_links(nodes: dict[str, Node], link_attrs: list[dict] | None) -> tuple[Link, ...]:
    delay_by_pair: dict[tuple[str, str], int] = {}
    for raw in link_attrs or []:
        if not isinstance(raw, dict) or "a" not in raw or "b" not in raw:
            raise MalformedDocument(f"link attribute entry needs 'a' and 'b': {raw!r}")
        pair = (min(raw["a"], raw["b"]), max(raw["a"], raw["b"]))
        delay = raw.get("delay_us", 0)
        if not isinstance(delay, int) or delay < 0:
            raise MalformedDocument(f"link {pair}: delay_us must be a nonnegative integer")
        delay_by_pair[pair] = delay

    seen: set[tuple[str, int, str, int]] = set()
    links: list[Link] = []
    for node in sorted(nodes.values(), key=lambda n: n.name):
        for iface in node.interfaces:
            ends = sorted([(node.name, iface.port), (iface.connected_to, iface.connected_port)])
            key = (ends[0][0], ends[0][1], ends[1][0], ends[1][1])
            if key in seen:
                continue
            seen.add(key)
            links.append(
                Link(
                    a=key[0],
                    a_port=key[1],
                    b=key[2],
                    b_port=key[3],
                    delay_us=delay_by_pair.get((key[0], key[2]), 0),
                )
            )
    return tuple(sorted(links, key=lambda l: (l.a, l.a_port, l.b, l.b_port)))


def load_topology(document: dict | str) -> Topology:
    """Parse and validate a topology from a document or its YAML/prompt text."""
    if isinstance(document, str):
        try:
            document = yaml.safe_load(document)
        except yaml.YAMLError as exc:
            raise MalformedDocument(f"unparseable topology text: {exc}") from exc
    if not isinstance(document, dict) or not document:
        raise MalformedDocument("topology document must be a non-empty mapping")

    if "nodes" in document:
        unknown = set(document) - {"schema", "name", "nodes", "links"}
        if unknown:
            raise MalformedDocument(f"unknown topology keys {sorted(unknown)}")
        schema = document.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise MalformedDocument(f"unsupported topology schema {schema!r}")
        raw_nodes = document["nodes"]
        name = document.get("name", "")
        link_attrs = document.get("links")
    else:
        # Bare prompt form: every key is a node name.
        raw_nodes = document
        name = ""
        link_attrs = None

    if not isinstance(raw_nodes, dict) or not raw_nodes:
        raise MalformedDocument("nodes must be a non-empty mapping")
    nodes = {n: _parse_node(n, raw) for n, raw in raw_nodes.items()}
    _check_wiring(nodes)
    links = _build_links(nodes, link_attrs)
    ordered = tuple(sorted(nodes.values(), key=lambda n: n.name))
    return Topology(nodes=ordered, links=links, name=name if isinstance(name, str) else "")


def serialize_topology(topology: Topology) -> str:
    """Render the wiring in the form shown to agents, one node per line.

    Nodes are listed lexicographically and interfaces by port, so the output
    is stable and parseable back into the same topology.
    """
    lines = []
    for node in sorted(topology.nodes, key=lambda n: n.name):
        rendered = ", ".join(
            "{'name': '%s', 'port': %d, 'connected_to': '%s', 'connected_port': %d}"
            % (i.name, i.port, i.connected_to, i.connected_port)
            for i in sorted(node.interfaces, key=lambda i: i.port)
        )
        lines.append(f"{node.name}: [{rendered}]")
    return "\n".join(lines)


def topology_to_document(topology: Topology) -> dict:
    """Express a topology in the scenario-file document form."""
    nodes: dict[str, dict] = {}
    for node in sorted(topology.nodes, key=lambda n: n.name):
        entry: dict = {
            "kind": node.kind.value,
            "interfaces": [
                {
                    "name": i.name,
                    "port": i.port,
                    "connected_to": i.connected_to,
                    "connected_port": i.connected_port,
                }
                for i in sorted(node.interfaces, key=lambda i: i.port)
            ],
        }
        if node.extra_counters:
            entry["extra_counters"] = list(node.extra_counters)
        nodes[node.name] = entry
    doc: dict = {"schema": SCHEMA_VERSION, "nodes": nodes}
    if topology.name:
        doc["name"] = topology.name
    delays = [
        {"a": l.a, "b": l.b, "delay_us": l.delay_us}
        for l in topology.links
        if l.delay_us
    ]
    if delays:
        doc["links"] = delays
    return doc
