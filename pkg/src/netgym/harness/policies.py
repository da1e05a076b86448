"""Agent policies: deterministic scripts and chat-completion backends.

A policy is anything with ``complete(history) -> str`` returning ReAct
text; the run loop parses and dispatches it. The optional ``observe``
hook lets a policy react to (or assert on) the latest observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, runtime_checkable

import requests
import yaml

from netgym.errors import NetGymError, SchemaError, ServiceUnreachable


class PolicyError(NetGymError):
    code = "policy_error"


@runtime_checkable
class AgentPolicy(Protocol):
    def complete(self, history: list[dict]) -> str: ...


@dataclass(frozen=True)
class ScriptStep:
    action: str
    args: dict = field(default_factory=dict)
    thought: str | None = None
    expect: str | None = None


def _render_args(args: dict) -> str:
    def literal(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, list):
            return "[" + ", ".join(literal(v) for v in value) + "]"
        return repr(value)  # handles quoting and escaping for strings

    return ", ".join(f"{key}={literal(value)}" for key, value in args.items())


class ScriptedPolicy:
    """Replays a fixed action list; guards fail the run loudly."""

    def __init__(self, steps: list[ScriptStep]):
        self.steps = list(steps)
        self._cursor = 0

    def complete(self, history: list[dict]) -> str:
        if self._cursor >= len(self.steps):
            raise PolicyError("script exhausted without submitting findings")
        step = self.steps[self._cursor]
        self._cursor += 1
        text = f"Action: {step.action}({_render_args(step.args)})"
        if step.thought:
            text = f"Thought: {step.thought}\n{text}"
        return text

    def observe(self, step_index: int, observation: str) -> None:
        step = self.steps[step_index - 1] if step_index - 1 < len(self.steps) else None
        if step is not None and step.expect is not None and step.expect not in observation:
            raise PolicyError(
                f"step {step_index} guard failed: expected {step.expect!r} in observation"
            )


def load_script(path: str | Path) -> ScriptedPolicy:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"script file {path} not found")
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    if not isinstance(raw, dict) or not isinstance(raw.get("steps"), list):
        raise SchemaError(f"{path}: script needs a 'steps' list")
    steps = []
    for i, row in enumerate(raw["steps"]):
        if not isinstance(row, dict) or not isinstance(row.get("action"), str):
            raise SchemaError(f"{path}: steps[{i}] needs an 'action' name")
        steps.append(
            ScriptStep(
                action=row["action"],
                args=row.get("args", {}) or {},
                thought=row.get("thought"),
                expect=row.get("expect"),
            )
        )
    return ScriptedPolicy(steps)


class LLMPolicy:
    """Chat-completion backend speaking the common /chat/completions shape.

    One retry on transport failure, then the session errors out.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        system_prompt: str | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.system_prompt = system_prompt

    def complete(self, history: list[dict]) -> str:
        messages = list(history)
        if self.system_prompt:
            messages = [{"role": "system", "content": self.system_prompt}] + messages
        body = {"model": self.model, "messages": messages}
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error: Exception | None = None
        for _ in range(2):
            try:
                response = requests.post(
                    f"{self.endpoint}/chat/completions", json=body, headers=headers, timeout=self.timeout
                )
                response.raise_for_status()
                payload = response.json()
                return payload["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise ServiceUnreachable(f"completion service failed twice: {last_error}")
