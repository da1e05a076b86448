"""The session loop tying scenario, gateway and policy together.

Each turn the policy produces ReAct text from the conversation so far;
the loop parses it, dispatches the call through the session and feeds
the observation back. Unparseable completions get one format reminder
and a retry; a second failure spends the turn without a recorded step.
Policy exceptions end the session as agent_error with the partial
trajectory intact.
"""

from __future__ import annotations

from pathlib import Path

from netgym.errors import NetGymError, SchemaError
from netgym.gateway.session import Session
from netgym.gateway.tools import build_registry
from netgym.harness.react import FORMAT_REMINDER, Unparseable, parse_react
from netgym.harness.trajectory import (
    OUTCOME_AGENT_ERROR,
    OUTCOME_BUDGET_EXHAUSTED,
    OUTCOME_SUBMITTED,
    Trajectory,
    TrajectoryStep,
)
from netgym.scenario import ScenarioSpec, find_scenario, instantiate, load_scenario


def _trajectory_from_session(session: Session, spec: ScenarioSpec) -> Trajectory:
    trajectory = Trajectory(scenario_id=spec.id, seed=spec.seed)
    for record in session.records:
        trajectory.steps.append(
            TrajectoryStep(
                index=record.call.step,
                name=record.call.name,
                args=record.call.args,
                ok=record.result.ok,
                observation=record.result.render(),
                thought=record.thought,
            )
        )
    return trajectory


def run_session(spec: ScenarioSpec, policy) -> Trajectory:
    """Drive one complete agent session and return its sealed trajectory."""
    return run_session_full(spec, policy)[0]


def run_session_full(spec: ScenarioSpec, policy) -> tuple[Trajectory, Session]:
    """run_session variant that also hands back the session, so callers
    can dump final environment state."""
    env = instantiate(spec)
    session = Session(env, build_registry())
    history: list[dict] = [{"role": "user", "content": session.opening_context()}]

    outcome = OUTCOME_BUDGET_EXHAUSTED
    for _ in range(spec.step_budget):
        try:
            turn = _next_parsed_turn(policy, history)
        except NetGymError:
            outcome = OUTCOME_AGENT_ERROR
            break
        if turn is None:
            continue  # both parses failed; the turn is spent

        result = session.dispatch(turn.name, turn.args, thought=turn.thought)
        observation = result.render()
        history.append({"role": "assistant", "content": _turn_text(turn)})
        history.append({"role": "user", "content": f"Observation: {observation}"})

        if hasattr(policy, "observe"):
            try:
                policy.observe(session.steps_used, observation)
            except NetGymError:
                outcome = OUTCOME_AGENT_ERROR
                break
        if session.sealed:
            outcome = OUTCOME_SUBMITTED
            break

    trajectory = _trajectory_from_session(session, spec)
    trajectory.seal(outcome, session.findings if outcome == OUTCOME_SUBMITTED else None)
    return trajectory, session


def _turn_text(turn) -> str:
    text = f"Action: {turn.name}(...)"
    if turn.thought:
        text = f"Thought: {turn.thought}\n{text}"
    return text


def _next_parsed_turn(policy, history: list[dict]):
    """One policy turn with a single reminder retry on bad format."""
    completion = policy.complete(history)
    try:
        return parse_react(completion)
    except Unparseable:
        history.append({"role": "assistant", "content": completion})
        history.append({"role": "user", "content": FORMAT_REMINDER})
        retry = policy.complete(history)
        try:
            return parse_react(retry)
        except Unparseable:
            history.append({"role": "assistant", "content": retry})
            history.append({"role": "user", "content": FORMAT_REMINDER})
            return None


def replay_log(path: str | Path, suite_dir: str | Path, seed_override: int | None = None):
    """Re-execute a trajectory's recorded calls against a fresh environment.

    Returns (trajectory, divergences) where each divergence is a dict with
    the step index, the recorded observation and the replayed one.
    """
    from netgym.harness.trajectory import read_log

    trajectory = read_log(path)
    scenario_path = find_scenario(suite_dir, trajectory.scenario_id)
    if scenario_path is None:
        raise SchemaError(f"scenario {trajectory.scenario_id!r} not found in {suite_dir}")
    spec = load_scenario(scenario_path)
    if seed_override is not None:
        from dataclasses import replace

        spec = replace(spec, seed=seed_override)
    elif spec.seed != trajectory.seed:
        from dataclasses import replace

        spec = replace(spec, seed=trajectory.seed)

    env = instantiate(spec)
    session = Session(env, build_registry())
    divergences = []
    for step in trajectory.steps:
        result = session.dispatch(step.name, step.args, thought=step.thought)
        observation = result.render()
        if observation != step.observation:
            divergences.append(
                {"index": step.index, "recorded": step.observation, "replayed": observation}
            )
    return trajectory, divergences
