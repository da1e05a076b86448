"""Trajectory records and their line-delimited log format.

A log is one JSON object per line: a versioned header, one record per
step, and a closing outcome record. Wall-clock timestamps are kept on
the in-memory steps for live debugging but never serialized, so two
runs of the same (scenario, seed) produce byte-identical logs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from netgym.errors import SchemaError
from netgym.evaluator import Findings

LOG_SCHEMA = 1

OUTCOME_SUBMITTED = "submitted"
OUTCOME_BUDGET_EXHAUSTED = "budget_exhausted"
OUTCOME_AGENT_ERROR = "agent_error"

_OUTCOMES = (OUTCOME_SUBMITTED, OUTCOME_BUDGET_EXHAUSTED, OUTCOME_AGENT_ERROR)


@dataclass
class TrajectoryStep:
    index: int
    name: str
    args: dict
    ok: bool
    observation: str
    thought: str | None = None
    timestamp: float = field(default_factory=time.time, compare=False)


@dataclass
class Trajectory:
    scenario_id: str
    seed: int
    steps: list[TrajectoryStep] = field(default_factory=list)
    findings: Findings | None = None
    outcome: str | None = None  # None while the session is still open

    def seal(self, outcome: str, findings: Findings | None = None) -> None:
        if outcome not in _OUTCOMES:
            raise SchemaError(f"unknown outcome {outcome!r}")
        self.outcome = outcome
        self.findings = findings


def write_log(trajectory: Trajectory, path: str | Path) -> None:
    if trajectory.outcome is None:
        raise SchemaError("refusing to write an unsealed trajectory")
    lines = [
        json.dumps(
            {
                "schema": LOG_SCHEMA,
                "kind": "trajectory",
                "scenario": trajectory.scenario_id,
                "seed": trajectory.seed,
            }
        )
    ]
    for step in trajectory.steps:
        lines.append(
            json.dumps(
                {
                    "index": step.index,
                    "thought": step.thought,
                    "name": step.name,
                    "args": step.args,
                    "ok": step.ok,
                    "observation": step.observation,
                }
            )
        )
    lines.append(
        json.dumps(
            {
                "outcome": trajectory.outcome,
                "findings": trajectory.findings.to_dict() if trajectory.findings else None,
            }
        )
    )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_log(path: str | Path) -> Trajectory:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"trajectory file {path} not found")
    raw_lines = [line for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
    if len(raw_lines) < 2:
        raise SchemaError(f"{path}: truncated trajectory log")
    try:
        rows = [json.loads(line) for line in raw_lines]
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: bad JSON line: {exc}") from exc

    header = rows[0]
    if header.get("schema") != LOG_SCHEMA or header.get("kind") != "trajectory":
        raise SchemaError(f"{path}: not a schema-{LOG_SCHEMA} trajectory log")
    tail = rows[-1]
    if "outcome" not in tail or tail["outcome"] not in _OUTCOMES:
        raise SchemaError(f"{path}: missing or invalid outcome record")

    steps = []
    for i, row in enumerate(rows[1:-1], start=1):
        if row.get("index") != i:
            raise SchemaError(f"{path}: step indices not contiguous at line {i + 1}")
        steps.append(
            TrajectoryStep(
                index=row["index"],
                thought=row.get("thought"),
                name=row["name"],
                args=row.get("args", {}),
                ok=bool(row.get("ok")),
                observation=row.get("observation", ""),
            )
        )
    findings = Findings.from_dict(tail["findings"]) if tail.get("findings") else None
    trajectory = Trajectory(
        scenario_id=header.get("scenario", ""),
        seed=header.get("seed", 0),
        steps=steps,
        findings=findings,
    )
    trajectory.outcome = tail["outcome"]
    return trajectory
