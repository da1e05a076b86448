"""Declarative benchmark cases.

A scenario file bundles a topology, traffic, parametric faults, the task
prompt shown to the agent, a tool allowlist, a seed and the ground truth
used for scoring. Files are YAML with ``schema: 1`` and are fully
validated at load time: anything that loads will also instantiate.
"""

from __future__ import annotations

import copy
import itertools
import random
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import yaml

from netgym.errors import (
    EmptyAxis,
    SchemaError,
    TargetNotInTopology,
    UnknownTemplate,
    UnknownTarget,
)
from netgym.netsim import (
    FaultSpec,
    FaultTemplate,
    NetState,
    RoutingConfig,
    Topology,
    apply_fault,
    compute_forwarding,
    host_pairs,
    load_topology,
    simulate_ping,
)

SCHEMA_VERSION = 1
DEFAULT_STEP_BUDGET = 30
DEFAULT_REACHABILITY_COUNT = 10

BEFORE_SESSION = "before_session"


def normalize_component(text: str) -> str:
    """Canonical component id: ``node:<name>`` or ``link:<a>-<b>`` (a < b)."""
    raw = text.strip()
    for prefix in ("link:", "node:"):
        if raw.startswith(prefix):
            raw = raw[len(prefix) :].strip()
            break
    for sep in ("<->", "->", "-"):
        if sep in raw:
            a, b = (part.strip() for part in raw.split(sep, 1))
            if a and b:
                return f"link:{min(a, b)}-{max(a, b)}"
    return f"node:{raw}"


def derive_accepted(fault: FaultSpec) -> tuple[str, ...]:
    """Default localization set for a fault.

    A directed link fault also accepts the node downstream of the broken
    direction, since from the outside the far end of a one-way failure is
    indistinguishable from a sick device.
    """
    if fault.template is FaultTemplate.TABLE_MISCONFIG:
        return (f"node:{fault.target}",)
    accepted = [f"link:{fault.link_key()}"]
    directed = fault.directed_target()
    if directed is not None:
        accepted.append(f"node:{directed[1]}")
    return tuple(accepted)


@dataclass(frozen=True)
class TrafficSpec:
    kind: str  # ping_mesh | ping_pair
    count: int = DEFAULT_REACHABILITY_COUNT
    when: str = "on_demand"  # background_before_session | on_demand
    src: str | None = None
    dst: str | None = None


@dataclass(frozen=True)
class GroundTruth:
    detection_expected: bool
    root_cause_index: int | None = None
    accepted_localizations: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioSpec:
    id: str
    title: str
    topology_doc: dict
    task_intent: str
    traffic: tuple[TrafficSpec, ...] = ()
    faults: tuple[FaultSpec, ...] = ()
    tool_allowlist: tuple[str, ...] | None = None
    step_budget: int = DEFAULT_STEP_BUDGET
    seed: int = 0
    ground_truth: GroundTruth = GroundTruth(detection_expected=False)

    @property
    def root_cause(self) -> FaultSpec | None:
        idx = self.ground_truth.root_cause_index
        if idx is None:
            return None
        return self.faults[idx]


class Environment:
    """A live, exclusively-owned network instance for one session."""

    def __init__(self, spec: ScenarioSpec, topology: Topology):
        self.spec = spec
        self.topology = topology
        self.state = NetState(topology)
        self.rng = random.Random(spec.seed)
        self.routing: dict[str, RoutingConfig] = {}
        self.step_faults: dict[int, list[FaultSpec]] = {}
        for fault in spec.faults:
            if fault.inject_at is not None:
                self.step_faults.setdefault(fault.inject_at, []).append(fault)

    def on_step(self, step: int) -> None:
        """Inject any faults scheduled for this step index."""
        for fault in self.step_faults.pop(step, ()):
            apply_fault(self.state, fault)

    def reachability_count(self) -> int:
        for traffic in self.spec.traffic:
            if traffic.kind == "ping_mesh" and traffic.when == "on_demand":
                return traffic.count
        return DEFAULT_REACHABILITY_COUNT

    def run_background_traffic(self) -> None:
        for traffic in self.spec.traffic:
            if traffic.when != "background_before_session":
                continue
            if traffic.kind == "ping_mesh":
                for src, dst in host_pairs(self.state):
                    simulate_ping(self.state, src, dst, traffic.count, self.rng)
            else:
                simulate_ping(self.state, traffic.src, traffic.dst, traffic.count, self.rng)


def _parse_fault(raw: object, index: int) -> FaultSpec:
    if not isinstance(raw, dict):
        raise SchemaError(f"faults[{index}] must be a mapping")
    unknown = set(raw) - {"template", "target", "params", "inject_at"}
    if unknown:
        raise SchemaError(f"faults[{index}]: unknown keys {sorted(unknown)}")
    template_raw = raw.get("template")
    try:
        template = FaultTemplate(template_raw)
    except ValueError:
        raise UnknownTemplate(f"faults[{index}]: unknown template {template_raw!r}") from None
    target = raw.get("target")
    if not isinstance(target, str) or not target:
        raise SchemaError(f"faults[{index}]: target must be a non-empty string")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SchemaError(f"faults[{index}]: params must be a mapping")
    inject_raw = raw.get("inject_at", BEFORE_SESSION)
    if inject_raw == BEFORE_SESSION:
        inject_at = None
    elif isinstance(inject_raw, int) and not isinstance(inject_raw, bool) and inject_raw >= 1:
        inject_at = inject_raw
    else:
        raise SchemaError(
            f"faults[{index}]: inject_at must be 'before_session' or a step number, got {inject_raw!r}"
        )
    return FaultSpec(template=template, target=target, params=params, inject_at=inject_at)


def _parse_traffic(raw: object, index: int, topology: Topology) -> TrafficSpec:
    if not isinstance(raw, dict):
        raise SchemaError(f"traffic[{index}] must be a mapping")
    kind = raw.get("kind")
    if kind not in ("ping_mesh", "ping_pair"):
        raise SchemaError(f"traffic[{index}]: kind must be ping_mesh or ping_pair, got {kind!r}")
    count = raw.get("count", DEFAULT_REACHABILITY_COUNT)
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise SchemaError(f"traffic[{index}]: count must be a positive integer")
    when = raw.get("when", "on_demand")
    if when not in ("background_before_session", "on_demand"):
        raise SchemaError(f"traffic[{index}]: bad 'when' value {when!r}")
    src, dst = raw.get("src"), raw.get("dst")
    if kind == "ping_pair":
        hosts = {h.name for h in topology.hosts}
        if src not in hosts or dst not in hosts or src == dst:
            raise SchemaError(f"traffic[{index}]: ping_pair needs two distinct hosts")
    return TrafficSpec(kind=kind, count=count, when=when, src=src, dst=dst)


def _check_fault_targets(spec: ScenarioSpec, topology: Topology) -> None:
    """Apply every fault to a scratch state so bad targets fail at load."""
    scratch = NetState(topology)
    scratch.install_tables(compute_forwarding(topology))
    for fault in spec.faults:
        try:
            apply_fault(scratch, fault)
        except UnknownTarget as exc:
            raise TargetNotInTopology(str(exc)) from exc


def parse_scenario(document: dict, *, base_dir: Path | None = None) -> ScenarioSpec:
    if not isinstance(document, dict):
        raise SchemaError("scenario document must be a mapping")
    if document.get("schema") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported scenario schema {document.get('schema')!r}")
    allowed = {
        "schema", "id", "title", "topology", "topology_ref", "task_intent",
        "traffic", "faults", "tool_allowlist", "step_budget", "seed", "ground_truth",
    }
    unknown = set(document) - allowed
    if unknown:
        raise SchemaError(f"unknown scenario keys {sorted(unknown)}")

    scenario_id = document.get("id")
    if not isinstance(scenario_id, str) or not scenario_id:
        raise SchemaError("scenario needs a non-empty string id")
    title = document.get("title", scenario_id)
    task_intent = document.get("task_intent", "")
    if not isinstance(task_intent, str) or not task_intent.strip():
        raise SchemaError(f"{scenario_id}: task_intent is required")

    if "topology" in document:
        topology_doc = document["topology"]
    elif "topology_ref" in document:
        if base_dir is None:
            raise SchemaError(f"{scenario_id}: topology_ref needs a file context")
        ref = base_dir / document["topology_ref"]
        if not ref.is_file():
            raise SchemaError(f"{scenario_id}: topology_ref {ref} not found")
        topology_doc = yaml.safe_load(ref.read_text(encoding="utf-8"))
    else:
        raise SchemaError(f"{scenario_id}: topology or topology_ref is required")
    topology = load_topology(topology_doc)

    faults = tuple(_parse_fault(raw, i) for i, raw in enumerate(document.get("faults", [])))
    traffic = tuple(_parse_traffic(raw, i, topology) for i, raw in enumerate(document.get("traffic", [])))

    allowlist_raw = document.get("tool_allowlist")
    if allowlist_raw is None:
        allowlist: tuple[str, ...] | None = None
    elif isinstance(allowlist_raw, list) and all(isinstance(t, str) for t in allowlist_raw):
        from netgym.gateway.tools import BUILTIN_TOOL_NAMES

        unknown_tools = set(allowlist_raw) - set(BUILTIN_TOOL_NAMES)
        if unknown_tools:
            raise SchemaError(f"{scenario_id}: allowlisted tools not in registry: {sorted(unknown_tools)}")
        allowlist = tuple(allowlist_raw)
    else:
        raise SchemaError(f"{scenario_id}: tool_allowlist must be a list of tool names")

    step_budget = document.get("step_budget", DEFAULT_STEP_BUDGET)
    if not isinstance(step_budget, int) or isinstance(step_budget, bool) or step_budget < 1:
        raise SchemaError(f"{scenario_id}: step_budget must be >= 1")
    for fault in faults:
        if fault.inject_at is not None and fault.inject_at > step_budget:
            raise SchemaError(f"{scenario_id}: fault inject_at {fault.inject_at} exceeds step budget")
    seed = document.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise SchemaError(f"{scenario_id}: seed must be an integer")

    gt_raw = document.get("ground_truth", {})
    if not isinstance(gt_raw, dict):
        raise SchemaError(f"{scenario_id}: ground_truth must be a mapping")
    detection_expected = gt_raw.get("detection_expected", bool(faults))
    root_cause_index = gt_raw.get("root_cause")
    if root_cause_index is None and faults:
        root_cause_index = 0
    if root_cause_index is not None:
        if not isinstance(root_cause_index, int) or not 0 <= root_cause_index < len(faults):
            raise SchemaError(f"{scenario_id}: ground_truth.root_cause must index a fault")
    accepted_raw = gt_raw.get("accepted_localizations")
    if accepted_raw is None:
        accepted = derive_accepted(faults[root_cause_index]) if root_cause_index is not None else ()
    else:
        accepted = tuple(normalize_component(c) for c in accepted_raw)
    if detection_expected and not accepted:
        raise SchemaError(f"{scenario_id}: detection expected but no accepted localizations")
    ground_truth = GroundTruth(
        detection_expected=bool(detection_expected),
        root_cause_index=root_cause_index,
        accepted_localizations=accepted,
    )

    spec = ScenarioSpec(
        id=scenario_id,
        title=title,
        topology_doc=copy.deepcopy(topology_doc),
        task_intent=task_intent,
        traffic=traffic,
        faults=faults,
        tool_allowlist=allowlist,
        step_budget=step_budget,
        seed=seed,
        ground_truth=ground_truth,
    )
    _check_fault_targets(spec, topology)
    return spec


def load_scenario(path: str | Path) -> ScenarioSpec:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"scenario file {path} not found")
    try:
        document = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise SchemaError(f"{path}: unparseable YAML: {exc}") from exc
    return parse_scenario(document, base_dir=path.parent)


def scenario_to_document(spec: ScenarioSpec) -> dict:
    """Express a spec back in file form; load(parse(doc)) == spec."""
    doc: dict = {
        "schema": SCHEMA_VERSION,
        "id": spec.id,
        "title": spec.title,
        "seed": spec.seed,
        "step_budget": spec.step_budget,
        "topology": copy.deepcopy(spec.topology_doc),
        "task_intent": spec.task_intent,
    }
    if spec.traffic:
        doc["traffic"] = [
            {k: v for k, v in (("kind", t.kind), ("count", t.count), ("when", t.when), ("src", t.src), ("dst", t.dst)) if v is not None}
            for t in spec.traffic
        ]
    if spec.faults:
        doc["faults"] = [
            {
                "template": f.template.value,
                "target": f.target,
                "params": dict(f.params),
                "inject_at": BEFORE_SESSION if f.inject_at is None else f.inject_at,
            }
            for f in spec.faults
        ]
    if spec.tool_allowlist is not None:
        doc["tool_allowlist"] = list(spec.tool_allowlist)
    doc["ground_truth"] = {
        "detection_expected": spec.ground_truth.detection_expected,
        "root_cause": spec.ground_truth.root_cause_index,
        "accepted_localizations": list(spec.ground_truth.accepted_localizations),
    }
    return doc


def instantiate(spec: ScenarioSpec) -> Environment:
    """Build the live environment: tables installed, pre-session faults
    injected, background traffic already in the counters."""
    topology = load_topology(spec.topology_doc)
    env = Environment(spec, topology)
    env.state.install_tables(compute_forwarding(topology, env.routing))
    for fault in spec.faults:
        if fault.inject_at is None:
            apply_fault(env.state, fault)
    env.run_background_traffic()
    return env


def expand_variations(spec: ScenarioSpec, axes: dict[str, list], limit: int | None = None) -> list[ScenarioSpec]:
    """Deterministic grid expansion over fault parameters and targets.

    Axis keys name parameters of the root-cause fault; the special key
    ``target`` swaps the fault target. Children are renamed ``parent#k``
    and each gets ground truth matching its own fault.
    """
    if not axes:
        return [spec]
    for name, values in axes.items():
        if not values:
            raise EmptyAxis(f"axis {name!r} has no values")
    if spec.root_cause is None:
        raise SchemaError(f"{spec.id}: variations need a root-cause fault")

    index = spec.ground_truth.root_cause_index
    names = sorted(axes)
    children: list[ScenarioSpec] = []
    for k, combo in enumerate(itertools.product(*(axes[n] for n in names)), start=1):
        if limit is not None and len(children) >= limit:
            break
        assignment = dict(zip(names, combo))
        base = spec.faults[index]
        target = assignment.pop("target", base.target)
        fault = FaultSpec(
            template=base.template,
            target=target,
            params={**base.params, **assignment},
            inject_at=base.inject_at,
        )
        faults = tuple(fault if i == index else f for i, f in enumerate(spec.faults))
        child = replace(
            spec,
            id=f"{spec.id}#{k}",
            faults=faults,
            ground_truth=GroundTruth(
                detection_expected=spec.ground_truth.detection_expected,
                root_cause_index=index,
                accepted_localizations=derive_accepted(fault),
            ),
        )
        _check_fault_targets(child, load_topology(child.topology_doc))
        children.append(child)
    return children


# -- suite discovery ----------------------------------------------------


def bundled_suite_dir() -> Path:
    return Path(str(resources.files("netgym").joinpath("scenarios")))


def suite_scenario_paths(suite_dir: str | Path) -> list[Path]:
    """Scenario files in a suite, honoring the manifest when present."""
    suite_dir = Path(suite_dir)
    manifest = suite_dir / "manifest.yaml"
    if manifest.is_file():
        raw = yaml.safe_load(manifest.read_text(encoding="utf-8"))
        if not isinstance(raw, dict) or not isinstance(raw.get("scenarios"), list):
            raise SchemaError(f"{manifest}: manifest needs a 'scenarios' list")
        return [suite_dir / f"{sid}.yaml" for sid in raw["scenarios"]]
    return sorted(p for p in suite_dir.glob("*.yaml") if p.name != "manifest.yaml")


def find_scenario(suite_dir: str | Path, scenario_id: str) -> Path | None:
    path = Path(suite_dir) / f"{scenario_id}.yaml"
    return path if path.is_file() else None
