from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from netgym.errors import UnsealedTrajectory
from netgym.evaluator import (
    EvaluationReport,
    Findings,
    judge_hook,
    render_report,
    render_suite_summary,
    score,
)
from netgym.harness.trajectory import Trajectory, TrajectoryStep
from netgym.scenario import GroundTruth

POC_TRUTH = GroundTruth(
    detection_expected=True,
    root_cause_index=0,
    accepted_localizations=("link:s1-s3", "node:s3"),
)
CONTROL_TRUTH = GroundTruth(detection_expected=False)


def sealed_trajectory(steps=2, invalid=0, outcome="submitted") -> Trajectory:
    t = Trajectory(scenario_id="case", seed=1)
    for i in range(1, steps + 1):
        t.steps.append(
            TrajectoryStep(
                index=i,
                name="test_reachability",
                args={},
                ok=i > invalid,
                observation="ok" if i > invalid else "ERROR[args_invalid]: bad",
            )
        )
    t.outcome = outcome
    return t


def test_poc_detection_and_localization_pass():
    findings = Findings(detected=True, suspects=("s3",), explanation="one-way failure")
    report = score(sealed_trajectory(), findings, POC_TRUTH)
    assert report.detection_correct and report.localization_correct
    assert report.score == {"detection": 1.0, "localization": 1.0}


def test_link_suspect_in_any_spelling_passes():
    for suspect in ("link:s1-s3", "s1-s3", "s3-s1", "s1->s3"):
        report = score(sealed_trajectory(), Findings(True, (suspect,)), POC_TRUTH)
        assert report.localization_correct, suspect


def test_first_suspect_rule():
    findings = Findings(detected=True, suspects=("s2", "s3"), explanation="")
    report = score(sealed_trajectory(), findings, POC_TRUTH)
    assert report.detection_correct is True
    assert report.localization_correct is False


def test_control_scenario_no_detection_is_vacuously_localized():
    report = score(sealed_trajectory(), Findings(detected=False), CONTROL_TRUTH)
    assert report.detection_correct is True
    assert report.localization_correct is True


def test_false_positive_on_control():
    report = score(sealed_trajectory(), Findings(detected=True, suspects=("s1",)), CONTROL_TRUTH)
    assert report.detection_correct is False
    # Vacuous rule still holds; detection alone fails the case.
    assert report.passed is False


def test_missed_detection_fails_localization_too():
    report = score(sealed_trajectory(), Findings(detected=False, suspects=("s3",)), POC_TRUTH)
    assert report.detection_correct is False
    assert report.localization_correct is False


def test_empty_suspects_scores_detection_only():
    report = score(sealed_trajectory(), Findings(detected=True, suspects=()), POC_TRUTH)
    assert report.detection_correct is True
    assert report.localization_correct is False


def test_no_findings_scores_as_miss():
    report = score(sealed_trajectory(outcome="budget_exhausted"), None, POC_TRUTH)
    assert not report.detection_correct and not report.localization_correct


def test_invalid_calls_counted_not_penalized():
    findings = Findings(detected=True, suspects=("s3",))
    report = score(sealed_trajectory(steps=5, invalid=2), findings, POC_TRUTH)
    assert report.invalid_calls == 2
    assert report.steps_used == 5
    assert report.passed


def test_unsealed_trajectory_rejected():
    t = Trajectory(scenario_id="case", seed=1)
    with pytest.raises(UnsealedTrajectory):
        score(t, None, POC_TRUTH)


def test_scoring_is_deterministic():
    findings = Findings(detected=True, suspects=("s3",))
    a = score(sealed_trajectory(), findings, POC_TRUTH)
    b = score(sealed_trajectory(), findings, POC_TRUTH)
    assert a.to_dict() == b.to_dict()


def test_render_text_and_structured():
    report = score(sealed_trajectory(), Findings(True, ("s3",)), POC_TRUTH)
    text = render_report(report, "text")
    assert "localization: PASS" in text
    assert "detection: PASS" in text
    structured = json.loads(render_report(report, "structured"))
    assert structured["scenario_id"] == "case"
    assert structured["score"]["localization"] == 1.0
    with pytest.raises(ValueError):
        render_report(report, "pdf")


def test_suite_summary_aggregates_by_recount():
    reports = [
        score(sealed_trajectory(), Findings(True, ("s3",)), POC_TRUTH),
        score(sealed_trajectory(), Findings(True, ("s2",)), POC_TRUTH),
        score(sealed_trajectory(), Findings(False), CONTROL_TRUTH),
    ]
    brute = sum(1 for r in reports if r.detection_correct and r.localization_correct)
    summary = render_suite_summary(reports)
    assert f"passed {brute}/3" in summary
    assert render_suite_summary([]) == "no scenarios\n"


class _CannedJudge(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        body = json.dumps({"choices": [{"message": {"content": "correct"}}]}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def canned_judge():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _CannedJudge)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}/chat/completions"
    server.shutdown()


def test_judge_disabled_returns_none():
    assert judge_hook(sealed_trajectory(), Findings(True, ("s3",)), None) is None
    assert judge_hook(sealed_trajectory(), Findings(True, ("s3",)), {"enabled": False}) is None


def test_judge_passthrough_verbatim(canned_judge):
    verdict = judge_hook(
        sealed_trajectory(),
        Findings(True, ("s3",)),
        {"enabled": True, "endpoint": canned_judge},
    )
    assert verdict == "correct"


def test_judge_unreachable_leaves_report_intact():
    findings = Findings(True, ("s3",))
    verdict = judge_hook(
        sealed_trajectory(),
        findings,
        {"enabled": True, "endpoint": "http://127.0.0.1:1/nope", "timeout": 0.2},
    )
    assert verdict is None
    report = score(sealed_trajectory(), findings, POC_TRUTH)
    assert report.passed


def test_judge_isolation_from_rule_scores(canned_judge):
    findings = Findings(True, ("s3",))
    base = score(sealed_trajectory(), findings, POC_TRUTH)
    verdict = judge_hook(sealed_trajectory(), findings, {"enabled": True, "endpoint": canned_judge})
    enriched = score(sealed_trajectory(), findings, POC_TRUTH)
    enriched.judge_verdict = verdict
    assert enriched.detection_correct == base.detection_correct
    assert enriched.localization_correct == base.localization_correct
    assert "judge_verdict: correct" in render_report(enriched, "text")
