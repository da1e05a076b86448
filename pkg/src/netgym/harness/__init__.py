"""Agent session driving: ReAct parsing, policies, run loop, trajectories."""

from netgym.harness.trajectory import Trajectory, TrajectoryStep, read_log, write_log
from netgym.harness.react import ParsedTurn, parse_react
from netgym.harness.policies import LLMPolicy, PolicyError, ScriptedPolicy, load_script
from netgym.harness.runner import replay_log, run_session

__all__ = [
    "Trajectory",
    "TrajectoryStep",
    "read_log",
    "write_log",
    "ParsedTurn",
    "parse_react",
    "LLMPolicy",
    "PolicyError",
    "ScriptedPolicy",
    "load_script",
    "replay_log",
    "run_session",
]
