"""Rule-based scoring of agent sessions against ground truth.

Scoring is a pure function of (trajectory, findings, ground truth):

* detection is correct when the agent's verdict matches whether a fault
  was actually injected;
* localization is judged on the first suspect only, which must fall in
  the scenario's accepted set (when a fault exists; otherwise vacuous);
* a session that never submitted findings scores as a miss on both.

An optional free-text judge verdict can be attached next to the rule
scores, never in place of them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import requests

from netgym.errors import UnsealedTrajectory
from netgym.scenario import GroundTruth, normalize_component

if TYPE_CHECKING:
    from netgym.harness.trajectory import Trajectory


@dataclass(frozen=True)
class Findings:
    """The agent's submitted diagnosis."""

    detected: bool
    suspects: tuple[str, ...] = ()
    explanation: str = ""

    def to_dict(self) -> dict:
        return {
            "detected": self.detected,
            "suspects": list(self.suspects),
            "explanation": self.explanation,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Findings":
        return cls(
            detected=bool(raw.get("detected", True)),
            suspects=tuple(raw.get("suspects", ())),
            explanation=str(raw.get("explanation", "")),
        )


@dataclass
class EvaluationReport:
    scenario_id: str
    outcome: str
    detection_correct: bool
    localization_correct: bool
    steps_used: int
    invalid_calls: int
    score: dict[str, float] = field(default_factory=dict)
    judge_verdict: str | None = None

    @property
    def passed(self) -> bool:
        return self.detection_correct and self.localization_correct

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "outcome": self.outcome,
            "detection_correct": self.detection_correct,
            "localization_correct": self.localization_correct,
            "steps_used": self.steps_used,
            "invalid_calls": self.invalid_calls,
            "score": dict(self.score),
            "judge_verdict": self.judge_verdict,
        }


def score(trajectory: "Trajectory", findings: Findings | None, ground_truth: GroundTruth) -> EvaluationReport:
    """Score one sealed trajectory. Deterministic, no side effects."""
    if trajectory.outcome is None:
        raise UnsealedTrajectory(f"trajectory for {trajectory.scenario_id} has no outcome yet")

    if findings is None:
        detection_correct = False
        localization_correct = False
    else:
        detection_correct = findings.detected == ground_truth.detection_expected
        if not ground_truth.detection_expected:
            localization_correct = True
        elif not detection_correct or not findings.suspects:
            localization_correct = False
        else:
            first = normalize_component(findings.suspects[0])
            localization_correct = first in set(ground_truth.accepted_localizations)

    invalid_calls = sum(1 for step in trajectory.steps if not step.ok)
    # Integral scores keep report files and wire frames identical across
    # serializers (1.0 rendering differs between languages, 1 does not).
    return EvaluationReport(
        scenario_id=trajectory.scenario_id,
        outcome=trajectory.outcome,
        detection_correct=detection_correct,
        localization_correct=localization_correct,
        steps_used=len(trajectory.steps),
        invalid_calls=invalid_calls,
        score={
            "detection": 1 if detection_correct else 0,
            "localization": 1 if localization_correct else 0,
        },
    )


def render_report(report: EvaluationReport, format: str = "text") -> str:
    """Stable rendering; 'text' is one metric per line, 'structured' is JSON."""
    if format == "structured":
        return json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    lines = [
        f"scenario: {report.scenario_id}",
        f"outcome: {report.outcome}",
        f"detection: {'PASS' if report.detection_correct else 'FAIL'}",
        f"localization: {'PASS' if report.localization_correct else 'FAIL'}",
        f"steps_used: {report.steps_used}",
        f"invalid_calls: {report.invalid_calls}",
    ]
    if report.judge_verdict is not None:
        lines.append(f"judge_verdict: {report.judge_verdict}")
    return "\n".join(lines) + "\n"


def render_suite_summary(reports: list[EvaluationReport]) -> str:
    """One row per scenario plus an aggregate pass rate."""
    if not reports:
        return "no scenarios\n"
    width = max(len(r.scenario_id) for r in reports)
    lines = []
    for r in reports:
        lines.append(
            f"{r.scenario_id:<{width}}  detection={'PASS' if r.detection_correct else 'FAIL'}  "
            f"localization={'PASS' if r.localization_correct else 'FAIL'}  "
            f"steps={r.steps_used}  invalid={r.invalid_calls}"
        )
    passed = sum(1 for r in reports if r.passed)
    rate = 100.0 * passed / len(reports)
    lines.append(f"passed {passed}/{len(reports)} ({rate:.1f}%)")
    return "\n".join(lines) + "\n"


def judge_hook(trajectory: "Trajectory", findings: Findings | None, config: dict | None) -> str | None:
    """Optional LLM judge pass-through; absent or unreachable means no verdict.

    Rule-based scores are never affected by the verdict.
    """
    if not config or not config.get("enabled"):
        return None
    endpoint = config.get("endpoint")
    if not endpoint:
        return None
    rubric = config.get("rubric", "Assess whether the diagnosis follows from the observations.")
    transcript = "\n".join(
        f"step {s.index}: {s.name}({json.dumps(s.args, sort_keys=True)}) -> {s.observation}"
        for s in trajectory.steps
    )
    body = {
        "model": config.get("model", "judge"),
        "messages": [
            {"role": "system", "content": rubric},
            {
                "role": "user",
                "content": transcript
                + "\nfindings: "
                + json.dumps(findings.to_dict() if findings else None, sort_keys=True),
            },
        ],
    }
    try:
        response = requests.post(endpoint, json=body, timeout=config.get("timeout", 30))
        response.raise_for_status()
        payload = response.json()
        return payload["choices"][0]["message"]["content"]
    except Exception:
        return None
