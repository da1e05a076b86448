"""Seeded traffic simulation: single probes and ping exchanges.

Loss is an independent Bernoulli trial per packet per link direction,
drawing from one shared generator in packet order along the path. A
direction with loss_prob 0 consumes no draw, so a run's draw sequence
is exactly one draw per traversal of a lossy direction. That makes the
simulator's arithmetic checkable against a plain per-packet loop using
the same generator.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from netgym.errors import InvalidParameter, UnknownHost
from netgym.netsim.forwarding import lookup_entry
from netgym.netsim.state import NetState

# Hop budget per packet; protects against forwarding loops from
# misconfigured tables. Such drops are logged as no_route.
MAX_HOPS = 64


@dataclass(frozen=True)
class PingReport:
    src: str
    dst: str
    transmitted: int
    received: int
    loss_pct: int

    def render(self) -> str:
        return (
            f"{self.src} ping {self.dst}: {self.transmitted} packets transmitted, "
            f"{self.received} received, {self.loss_pct}% packet loss"
        )


def _require_host(state: NetState, name: str):
    node = state.topology.node(name)
    if node is None or not node.is_host:
        raise UnknownHost(f"no host named {name!r}")
    return node


def _traverse(state: NetState, sender: str, port: int, peer: str, rng: random.Random) -> bool:
    """Send one packet over a link direction; False means it was dropped."""
    direction = state.direction(sender, port)
    if not direction.up:
        state.log_drop(sender, peer, port, "down")
        state.count_drop(sender, port)
        return False
    if direction.loss_prob > 0.0 and rng.random() < direction.loss_prob:
        state.log_drop(sender, peer, port, "loss")
        state.count_drop(sender, port)
        return False
    return True


def send_probe(state: NetState, src: str, dst: str, rng: random.Random) -> bool:
    """Walk one packet from src to dst; True iff it is delivered."""
    src_node = _require_host(state, src)
    _require_host(state, dst)

    iface = src_node.interfaces[0]
    if not _traverse(state, src, iface.port, iface.connected_to, rng):
        return False
    current = state.topology.node(iface.connected_to)
    in_port = iface.connected_port

    for _ in range(MAX_HOPS):
        if current.is_host:
            if current.name == dst:
                return True
            # Delivered to the wrong host by a bad table; host discards it.
            state.log(current.name, f"DROP dir={current.name}->{dst} port=0 reason=no_route")
            return False

        state.count_ingress(current.name, in_port)
        entry = lookup_entry(state.devices[current.name].table, dst)
        if entry is None or entry.action == "drop":
            state.log(current.name, f"DROP dir={current.name}->{dst} port=0 reason=no_route")
            return False

        out_iface = current.interface_for_port(entry.port)
        if out_iface is None:
            state.log(current.name, f"DROP dir={current.name}->{dst} port={entry.port} reason=no_route")
            return False
        state.count_egress(current.name, out_iface.port)
        if not _traverse(state, current.name, out_iface.port, out_iface.connected_to, rng):
            return False
        current = state.topology.node(out_iface.connected_to)
        in_port = out_iface.connected_port

    state.log(current.name, f"DROP dir={current.name}->{dst} port=0 reason=no_route")
    return False


def simulate_ping(state: NetState, src: str, dst: str, count: int, rng: random.Random) -> PingReport:
    """Run ``count`` request/reply exchanges between two hosts.

    A ping counts as received only when the request reaches dst and the
    reply makes it back.
    """
    if count < 1:
        raise InvalidParameter(f"count must be positive, got {count}")
    if src == dst:
        raise UnknownHost(f"src and dst must differ, got {src!r} twice")
    _require_host(state, src)
    _require_host(state, dst)
    received = 0
    for _ in range(count):
        if send_probe(state, src, dst, rng) and send_probe(state, dst, src, rng):
            received += 1
    loss_pct = round(100 * (1 - received / count))
    return PingReport(src=src, dst=dst, transmitted=count, received=received, loss_pct=loss_pct)


def host_pairs(state: NetState) -> list[tuple[str, str]]:
    """Each unordered host pair once, lexicographic, smaller name as source."""
    names = sorted(h.name for h in state.topology.hosts)
    return [(a, b) for i, a in enumerate(names) for b in names[i + 1 :]]
