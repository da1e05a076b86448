"""The troubleshooting tool set exposed to agents.

Every tool has a descriptor (name, description, parameter schema,
category) and a handler bound to a live environment. Data adapters are
strictly read-only; actions are the only mutators. Content renderings
are pinned strings that agents parse, so changing them is a contract
break (see goldens/).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from netgym.errors import (
    ArgsInvalid,
    EntryExists,
    NoSuchEntry,
    UnknownSwitch,
    UnknownTarget,
    UnknownTool,
)
from netgym.netsim import FlowTableEntry, RoutingConfig, compute_forwarding, host_pairs, simulate_ping
from netgym.netsim.forwarding import DEFAULT_PRIORITY, default_table
from netgym.netsim.state import dump_ports, get_logs, list_counters, read_counter
from netgym.netsim.topology import NodeKind, serialize_topology

DATA_ADAPTER = "data_adapter"
ACTION = "action"

MANUAL_ENTRY_PRIORITY = 200
SUBMIT_TOOL = "submit_findings"


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    params_schema: dict
    category: str

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "params_schema": self.params_schema,
            "category": self.category,
        }


def _schema(properties: dict[str, dict], required: list[str]) -> dict:
    # param_order carries the declaration order explicitly: positional
    # binding must survive serializers that sort object keys.
    return {
        "type": "object",
        "properties": properties,
        "required": required,
        "param_order": list(properties),
    }

_SWITCH = {"type": "string", "description": "switch name"}

_TABLE_SCHEMA = _schema(
    {
        "switch": _SWITCH,
        "dst": {"type": "string", "description": "destination host or prefix"},
        "action": {"type": "string", "enum": ["forward", "drop"]},
        "port": {"type": "integer", "description": "egress port (forward only)"},
        "priority": {"type": "integer"},
    },
    ["switch", "dst", "action"],
)

_FRR_SCHEMA = _schema(
    {
        "router": {"type": "string", "description": "FRR router name"},
        "neighbors": {"type": "array", "items": {"type": "string"}},
    },
    ["router"],
)


def validate_args(schema: dict, args: dict) -> dict:
    """Check an argument mapping against a descriptor schema."""
    if not isinstance(args, dict):
        raise ArgsInvalid(f"arguments must be a mapping, got {type(args).__name__}")
    properties = schema["properties"]
    unknown = set(args) - set(properties)
    if unknown:
        raise ArgsInvalid(f"unknown arguments {sorted(unknown)}")
    missing = [name for name in schema.get("required", []) if name not in args]
    if missing:
        raise ArgsInvalid(f"missing required arguments {missing}")
    for name, value in args.items():
        expected = properties[name].get("type")
        if expected == "string" and not isinstance(value, str):
            raise ArgsInvalid(f"{name} must be a string")
        if expected == "integer" and (not isinstance(value, int) or isinstance(value, bool)):
            raise ArgsInvalid(f"{name} must be an integer")
        if expected == "boolean" and not isinstance(value, bool):
            raise ArgsInvalid(f"{name} must be a boolean")
        if expected == "array":
            if not isinstance(value, list):
                raise ArgsInvalid(f"{name} must be an array")
            item_type = properties[name].get("items", {}).get("type")
            if item_type == "string" and not all(isinstance(v, str) for v in value):
                raise ArgsInvalid(f"{name} must be an array of strings")
        enum = properties[name].get("enum")
        if enum is not None and value not in enum:
            raise ArgsInvalid(f"{name} must be one of {enum}, got {value!r}")
    return args


# -- renderings ----------------------------------------------------------


def _render_ports_bmv2(records: list[dict]) -> str:
    lines = []
    for r in records:
        status = _link_status(r)
        lines.append(
            f"port {r['port']} ({r['name']}) peer={r['peer']}:{r['peer_port']} link={status} "
            f"tx_pkts={r['tx_packets']} tx_bytes={r['tx_bytes']} "
            f"rx_pkts={r['rx_packets']} rx_bytes={r['rx_bytes']} tx_drops={r['tx_drops']}"
        )
    return "\n".join(lines)


def _render_ports_ovs(records: list[dict]) -> str:
    lines = []
    for r in records:
        lines.append(
            f"port {r['port']} ({r['name']}): rx pkts={r['rx_packets']}, bytes={r['rx_bytes']}; "
            f"tx pkts={r['tx_packets']}, bytes={r['tx_bytes']}, drops={r['tx_drops']}; "
            f"link={_link_status(r)} peer={r['peer']}:{r['peer_port']}"
        )
    return "\n".join(lines)


def _link_status(record: dict) -> str:
    if record["tx_up"] and record["rx_up"]:
        return "up"
    if record["tx_up"]:
        return "rx_down"
    if record["rx_up"]:
        return "tx_down"
    return "down"


# -- handlers ------------------------------------------------------------


def _h_get_switch_logs(env, args):
    lines = get_logs(env.state, args["switch"], tail=args.get("tail", 50))
    content = "\n".join(lines) if lines else "(no log lines)"
    return content, {"lines": lines}


def _h_get_switch_info(env, args):
    name = args["switch"]
    node = env.topology.node(name)
    if node is None:
        raise UnknownSwitch(f"no device named {name!r}")
    entries = len(env.state.devices[name].table) if name in env.state.devices else 0
    info = {
        "name": name,
        "kind": node.kind.value,
        "ports": len(node.interfaces),
        "table_entries": entries,
        "log_lines": len(env.state.logs[name]),
    }
    content = (
        f"{name}: kind={info['kind']} ports={info['ports']} "
        f"table_entries={info['table_entries']} log_lines={info['log_lines']}"
    )
    return content, info


def _h_ovs_dump_ports(env, args):
    records = dump_ports(env.state, args["switch"], kinds=(NodeKind.OVS_SWITCH,))
    return _render_ports_ovs(records), {"ports": records}


def _h_bmv2_dump_ports(env, args):
    records = dump_ports(env.state, args["switch"], kinds=(NodeKind.BMV2_SWITCH,))
    return _render_ports_bmv2(records), {"ports": records}


def _h_bmv2_get_counters(env, args):
    names = list_counters(env.state, args["switch"])
    content = ", ".join(f"'{n}'" for n in names)
    return content, {"counters": names}


def _h_bmv2_counter_read(env, args):
    bytes_, packets = read_counter(env.state, args["switch"], args["counter"], args["index"])
    content = f"{args['counter']}[{args['index']}]= ({bytes_} bytes, {packets} packets)"
    return content, {"bytes": bytes_, "packets": packets}


def _h_get_topology(env, args):
    text = serialize_topology(env.topology)
    return text, {"topology": text}


def _config_frr(env, args):
    name = args["router"]
    node = env.topology.node(name)
    if node is None or node.kind is not NodeKind.FRR_ROUTER:
        raise UnknownTarget(f"{name!r} is not an FRR router")
    env.routing[name] = RoutingConfig(node=name, neighbors=args.get("neighbors"))
    tables = compute_forwarding(env.topology, env.routing)
    env.state.install_tables(tables, replace_priority=DEFAULT_PRIORITY)
    total = sum(len(v) for v in tables.values())
    content = f"routing recomputed: {total} entries across {len(tables)} devices"
    return content, {"entries": total, "devices": len(tables)}


def _table_edit(env, args, kinds: tuple[NodeKind, ...], mode: str):
    name = args["switch"]
    node = env.topology.node(name)
    if node is None or node.is_host or node.kind not in kinds:
        expected = "/".join(k.value for k in kinds)
        raise UnknownSwitch(f"{name!r} is not a {expected}")
    action = args["action"]
    port = args.get("port")
    if action == "forward":
        if port not in {i.port for i in node.interfaces}:
            raise ArgsInvalid(f"forward needs a declared port on {name}, got {port!r}")
    elif port is not None:
        raise ArgsInvalid("'port' is only valid with action=forward")
    entry = FlowTableEntry(
        table=default_table(node.kind),
        match_dst=args["dst"],
        action=action,
        port=port if action == "forward" else None,
        priority=args.get("priority", MANUAL_ENTRY_PRIORITY),
    )
    existing = [
        e
        for e in env.state.devices[name].table
        if e.table == entry.table and e.match_dst == entry.match_dst and e.priority == entry.priority
    ]
    if mode == "add" and existing:
        raise EntryExists(f"{name} already has an entry for {entry.match_dst} at priority {entry.priority}")
    if mode == "modify" and not existing:
        raise NoSuchEntry(f"{name} has no entry for {entry.match_dst} at priority {entry.priority}")
    env.state.upsert_entry(name, entry)
    content = (
        f"{name}: {mode} {entry.table} dst={entry.match_dst} action={entry.action}"
        + (f" port={entry.port}" if entry.action == "forward" else "")
        + f" priority={entry.priority}"
    )
    return content, {"entry": {"table": entry.table, "dst": entry.match_dst, "action": entry.action,
                               "port": entry.port, "priority": entry.priority}}


def _h_test_reachability(env, args):
    count = env.reachability_count()
    reports = [
        simulate_ping(env.state, src, dst, count, env.rng)
        for src, dst in host_pairs(env.state)
    ]
    content = "\n".join(r.render() for r in reports)
    data = {
        "pairs": [
            {
                "src": r.src,
                "dst": r.dst,
                "transmitted": r.transmitted,
                "received": r.received,
                "loss_pct": r.loss_pct,
            }
            for r in reports
        ]
    }
    return content, data


_BUILTINS: list[tuple[ToolDescriptor, Callable]] = [
    (
        ToolDescriptor(
            "get_switch_logs",
            "Get device running logs/information",
            _schema({"switch": _SWITCH, "tail": {"type": "integer"}}, ["switch"]),
            DATA_ADAPTER,
        ),
        _h_get_switch_logs,
    ),
    (
        ToolDescriptor(
            "get_switch_info",
            "Get device running logs/information",
            _schema({"switch": _SWITCH}, ["switch"]),
            DATA_ADAPTER,
        ),
        _h_get_switch_info,
    ),
    (
        ToolDescriptor(
            "ovs_dump_ports",
            "Show all ports of OVS/Bmv2 P4 switch",
            _schema({"switch": _SWITCH}, ["switch"]),
            DATA_ADAPTER,
        ),
        _h_ovs_dump_ports,
    ),
    (
        ToolDescriptor(
            "bmv2_dump_ports",
            "Show all ports of OVS/Bmv2 P4 switch",
            _schema({"switch": _SWITCH}, ["switch"]),
            DATA_ADAPTER,
        ),
        _h_bmv2_dump_ports,
    ),
    (
        ToolDescriptor(
            "bmv2_get_counters",
            "Get counters in a BMv2 P4 switch",
            _schema({"switch": _SWITCH}, ["switch"]),
            DATA_ADAPTER,
        ),
        _h_bmv2_get_counters,
    ),
    (
        ToolDescriptor(
            "bmv2_counter_read",
            "Read counter values in a BMv2 P4 switch",
            _schema(
                {
                    "switch": _SWITCH,
                    "counter": {"type": "string", "description": "counter name"},
                    "index": {"type": "integer", "description": "port index"},
                },
                ["switch", "counter", "index"],
            ),
            DATA_ADAPTER,
        ),
        _h_bmv2_counter_read,
    ),
    (
        ToolDescriptor(
            "get_topology",
            "Obtain structured topology information",
            _schema({}, []),
            DATA_ADAPTER,
        ),
        _h_get_topology,
    ),
    (
        ToolDescriptor("config_frr_bgp", "Configure BGP/OSPF in FRRouting", _FRR_SCHEMA, ACTION),
        _config_frr,
    ),
    (
        ToolDescriptor("config_frr_ospf", "Configure BGP/OSPF in FRRouting", _FRR_SCHEMA, ACTION),
        _config_frr,
    ),
    (
        ToolDescriptor("ovs_table_add", "Add/modify flow table entry of OVS", _TABLE_SCHEMA, ACTION),
        lambda env, args: _table_edit(env, args, (NodeKind.OVS_SWITCH,), "add"),
    ),
    (
        ToolDescriptor("ovs_table_modify", "Add/modify flow table entry of OVS", _TABLE_SCHEMA, ACTION),
        lambda env, args: _table_edit(env, args, (NodeKind.OVS_SWITCH,), "modify"),
    ),
    (
        ToolDescriptor("bmv2_table_add", "Add/modify table entry in BMv2 P4 switch", _TABLE_SCHEMA, ACTION),
        lambda env, args: _table_edit(env, args, (NodeKind.BMV2_SWITCH,), "add"),
    ),
    (
        ToolDescriptor("bmv2_table_modify", "Add/modify table entry in BMv2 P4 switch", _TABLE_SCHEMA, ACTION),
        lambda env, args: _table_edit(env, args, (NodeKind.BMV2_SWITCH,), "modify"),
    ),
    (
        ToolDescriptor(
            "test_reachability",
            "Check reachability between all hosts",
            _schema({}, []),
            ACTION,
        ),
        _h_test_reachability,
    ),
    (
        ToolDescriptor(
            SUBMIT_TOOL,
            "Submit the final diagnosis: detection verdict, suspected components, explanation",
            _schema(
                {
                    "detected": {"type": "boolean"},
                    "suspects": {"type": "array", "items": {"type": "string"}},
                    "explanation": {"type": "string"},
                },
                [],
            ),
            ACTION,
        ),
        None,  # handled by the session itself; it seals the trajectory
    ),
]

BUILTIN_TOOL_NAMES = tuple(d.name for d, _ in _BUILTINS)


@dataclass
class ToolRegistry:
    descriptors: dict[str, ToolDescriptor] = field(default_factory=dict)
    handlers: dict[str, Callable] = field(default_factory=dict)

    def register(self, descriptor: ToolDescriptor, handler: Callable | None) -> None:
        if descriptor.name in self.descriptors:
            raise ArgsInvalid(f"tool {descriptor.name!r} already registered")
        self.descriptors[descriptor.name] = descriptor
        if handler is not None:
            self.handlers[descriptor.name] = handler

    def descriptor(self, name: str) -> ToolDescriptor:
        if name not in self.descriptors:
            raise UnknownTool(f"no tool named {name!r}")
        return self.descriptors[name]

    def list(self, allowlist: tuple[str, ...] | None = None) -> list[ToolDescriptor]:
        names = self.descriptors if allowlist is None else [n for n in self.descriptors if n in allowlist]
        return [self.descriptors[n] for n in names]

    def tool_docs(self, allowlist: tuple[str, ...] | None = None) -> str:
        """Human-readable tool list fed into agent prompts."""
        lines = []
        for d in self.list(allowlist):
            params = ", ".join(d.params_schema["properties"]) or "no arguments"
            lines.append(f"- {d.name}({params}): {d.description}")
        return "\n".join(lines)


def build_registry() -> ToolRegistry:
    """All built-in tools, in their canonical listing order."""
    registry = ToolRegistry()
    for descriptor, handler in _BUILTINS:
        registry.register(descriptor, handler)
    return registry
