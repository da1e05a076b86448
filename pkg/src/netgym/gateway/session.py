"""Session dispatch: allowlists, budgets, trajectory recording, sealing.

Every call that reaches dispatch is answered with a ToolResult, never an
exception; agents see their own mistakes as error results. Calls
rejected for budget exhaustion or after sealing are refused without
being recorded, so a trajectory never exceeds the step budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from netgym.errors import (
    AlreadySubmitted,
    BudgetExhausted,
    NetGymError,
    NotAllowlisted,
    SessionSealed,
    UnknownTool,
)
from netgym.evaluator import Findings
from netgym.gateway.tools import SUBMIT_TOOL, ToolDescriptor, ToolRegistry, validate_args
from netgym.scenario import Environment


@dataclass(frozen=True)
class ToolCall:
    session: str
    step: int
    name: str
    args: dict


@dataclass(frozen=True)
class ToolResult:
    ok: bool
    content: str = ""
    data: dict | None = None
    error: dict | None = None

    def render(self) -> str:
        """The observation text shown to the agent."""
        if self.ok:
            return self.content
        return f"ERROR[{self.error['code']}]: {self.error['message']}"

    def to_dict(self) -> dict:
        if self.ok:
            return {"ok": True, "content": self.content, "data": self.data or {}}
        return {"ok": False, "error": self.error}

    @classmethod
    def failure(cls, exc: NetGymError) -> "ToolResult":
        return cls(ok=False, error={"code": exc.code, "message": exc.message})


@dataclass
class SessionRecord:
    call: ToolCall
    result: ToolResult
    thought: str | None = None


class Session:
    """One agent's exclusive handle on a live environment."""

    def __init__(self, env: Environment, registry: ToolRegistry, session_id: str = "s-1"):
        self.env = env
        self.registry = registry
        self.id = session_id
        self.records: list[SessionRecord] = []
        self.findings: Findings | None = None
        self.sealed = False

    @property
    def spec(self):
        return self.env.spec

    @property
    def steps_used(self) -> int:
        return len(self.records)

    @property
    def budget_left(self) -> int:
        return self.spec.step_budget - self.steps_used

    def allowed(self, name: str) -> bool:
        allowlist = self.spec.tool_allowlist
        return allowlist is None or name in allowlist

    def list_tools(self) -> list[ToolDescriptor]:
        return self.registry.list(self.spec.tool_allowlist)

    def opening_context(self) -> str:
        """Task intent, wiring and tool docs, the first thing an agent sees."""
        from netgym.netsim.topology import serialize_topology

        return (
            f"{self.spec.task_intent.strip()}\n\n"
            f"Network topology:\n{serialize_topology(self.env.topology)}\n\n"
            f"You can interact with the network through these tools:\n"
            f"{self.registry.tool_docs(self.spec.tool_allowlist)}"
        )

    def dispatch(self, name: str, args: dict | None = None, thought: str | None = None) -> ToolResult:
        args = args or {}
        if self.sealed:
            if name == SUBMIT_TOOL:
                return ToolResult.failure(AlreadySubmitted("findings were already submitted"))
            return ToolResult.failure(SessionSealed("session is sealed; no further tool calls"))
        if self.steps_used >= self.spec.step_budget:
            return ToolResult.failure(
                BudgetExhausted(f"step budget of {self.spec.step_budget} is exhausted")
            )

        step = self.steps_used + 1
        self.env.on_step(step)
        result = self._execute(name, args)
        call = ToolCall(session=self.id, step=step, name=name, args=dict(args))
        self.records.append(SessionRecord(call=call, result=result, thought=thought))
        return result

    def _execute(self, name: str, args: dict) -> ToolResult:
        try:
            descriptor = self.registry.descriptor(name)
        except UnknownTool as exc:
            return ToolResult.failure(exc)
        if not self.allowed(name):
            return ToolResult.failure(NotAllowlisted(f"tool {name!r} is not allowlisted for this session"))
        try:
            validate_args(descriptor.params_schema, args)
            if name == SUBMIT_TOOL:
                return self._submit(args)
            handler = self.registry.handlers[name]
            content, data = handler(self.env, args)
            return ToolResult(ok=True, content=content, data=data)
        except NetGymError as exc:
            return ToolResult.failure(exc)
        except Exception as exc:  # never crash the session on a handler bug
            return ToolResult(ok=False, error={"code": "internal_error", "message": str(exc)})

    def _submit(self, args: dict) -> ToolResult:
        self.findings = Findings(
            detected=args.get("detected", True),
            suspects=tuple(args.get("suspects", ())),
            explanation=args.get("explanation", ""),
        )
        self.sealed = True
        content = "findings recorded; session sealed"
        return ToolResult(ok=True, content=content, data={"sealed": True})
