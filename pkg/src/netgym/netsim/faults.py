"""Parametric fault templates and their injection.

Targets name either a link direction (``s1->s3``), a whole link
(``s1-s3``) or a node (``s2``). Injection is idempotent: applying the
same spec twice leaves the state it produced the first time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from netgym.errors import InvalidParameter, UnknownTarget
from netgym.netsim.forwarding import FlowTableEntry, default_table
from netgym.netsim.state import NetState

MISCONFIG_PRIORITY = 1000


class FaultTemplate(str, Enum):
    LINK_LOSS = "link_loss"
    LINK_DOWN_UNIDIR = "link_down_unidir"
    LINK_DOWN_BIDIR = "link_down_bidir"
    TABLE_MISCONFIG = "table_misconfig"


@dataclass(frozen=True)
class FaultSpec:
    template: FaultTemplate
    target: str
    params: dict = field(default_factory=dict)
    inject_at: int | None = None  # None = before the session, k = before step k

    def directed_target(self) -> tuple[str, str] | None:
        if "->" in self.target:
            a, b = self.target.split("->", 1)
            return a.strip(), b.strip()
        return None

    def undirected_target(self) -> tuple[str, str] | None:
        if "->" in self.target:
            return None
        if "-" in self.target:
            a, b = self.target.split("-", 1)
            return a.strip(), b.strip()
        return None

    def link_key(self) -> str | None:
        """Normalized ``a-b`` form for any link-shaped target."""
        pair = self.directed_target() or self.undirected_target()
        if pair is None:
            return None
        return f"{min(pair)}-{max(pair)}"


def _link_directions(state: NetState, a: str, b: str):
    dirs = state.directions_between(a, b)
    if not dirs:
        raise UnknownTarget(f"no link between {a!r} and {b!r}")
    return dirs


def _fault_link_loss(state: NetState, fault: FaultSpec) -> None:
    prob = fault.params.get("loss_prob")
    if not isinstance(prob, (int, float)) or isinstance(prob, bool) or not 0.0 <= prob <= 1.0:
        raise InvalidParameter(f"loss_prob must be in [0, 1], got {prob!r}")
    directed = fault.directed_target()
    if directed is not None:
        for d in _link_directions(state, *directed):
            d.loss_prob = float(prob)
        return
    undirected = fault.undirected_target()
    if undirected is None:
        raise InvalidParameter(f"link_loss needs a link target, got {fault.target!r}")
    a, b = undirected
    for d in _link_directions(state, a, b):
        d.loss_prob = float(prob)
    for d in _link_directions(state, b, a):
        d.loss_prob = float(prob)


def _fault_link_down_unidir(state: NetState, fault: FaultSpec) -> None:
    directed = fault.directed_target()
    if directed is None:
        raise InvalidParameter(
            f"link_down_unidir needs a directed target like 'a->b', got {fault.target!r}"
        )
    for d in _link_directions(state, *directed):
        d.up = False


def _fault_link_down_bidir(state: NetState, fault: FaultSpec) -> None:
    pair = fault.directed_target() or fault.undirected_target()
    if pair is None:
        raise InvalidParameter(f"link_down_bidir needs a link target, got {fault.target!r}")
    a, b = pair
    for d in _link_directions(state, a, b):
        d.up = False
    for d in _link_directions(state, b, a):
        d.up = False


def _fault_table_misconfig(state: NetState, fault: FaultSpec) -> None:
    node = state.topology.node(fault.target)
    if node is None or node.is_host:
        raise UnknownTarget(f"table_misconfig target must be a switch, got {fault.target!r}")
    dst = fault.params.get("dst")
    if not isinstance(dst, str) or not dst:
        raise InvalidParameter("table_misconfig needs a 'dst' host or prefix")
    action = fault.params.get("action", "drop")
    if action not in ("drop", "forward"):
        raise InvalidParameter(f"action must be 'drop' or 'forward', got {action!r}")
    port = fault.params.get("port")
    if action == "forward":
        if port not in {i.port for i in node.interfaces}:
            raise InvalidParameter(f"forward needs a declared port on {node.name}, got {port!r}")
    elif port is not None:
        raise InvalidParameter("'port' is only valid with action=forward")
    priority = fault.params.get("priority", MISCONFIG_PRIORITY)
    if not isinstance(priority, int) or isinstance(priority, bool):
        raise InvalidParameter(f"priority must be an integer, got {priority!r}")
    state.upsert_entry(
        node.name,
        FlowTableEntry(
            table=fault.params.get("table", default_table(node.kind)),
            match_dst=dst,
            action=action,
            port=port if action == "forward" else None,
            priority=priority,
        ),
    )


_HANDLERS = {
    FaultTemplate.LINK_LOSS: _fault_link_loss,
    FaultTemplate.LINK_DOWN_UNIDIR: _fault_link_down_unidir,
    FaultTemplate.LINK_DOWN_BIDIR: _fault_link_down_bidir,
    FaultTemplate.TABLE_MISCONFIG: _fault_table_misconfig,
}


def apply_fault(state: NetState, fault: FaultSpec) -> NetState:
    """Inject one fault into the running state and return it."""
    handler = _HANDLERS[FaultTemplate(fault.template)]
    handler(state, fault)
    return state
