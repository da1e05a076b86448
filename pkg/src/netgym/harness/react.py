"""Parsing of Thought/Action completions.

The expected shape is free text containing lines like::

    Thought: packets leave s1 but never arrive at s3
    Action: bmv2_counter_read("s1", "MyEgress.egress_port_counter", 3)

The last Thought/Action pair wins. Call arguments accept quoted strings,
integers, booleans, lists and key=value form; positional arguments are
bound to the tool's declared parameters in order.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass

from netgym.errors import NetGymError
from netgym.evaluator import Findings
from netgym.gateway.tools import SUBMIT_TOOL, ToolRegistry, build_registry


class Unparseable(NetGymError):
    code = "unparseable"


@dataclass(frozen=True)
class ParsedTurn:
    thought: str | None
    name: str
    args: dict

    @property
    def is_submit(self) -> bool:
        return self.name == SUBMIT_TOOL

    def findings(self) -> Findings | None:
        if not self.is_submit:
            return None
        return Findings(
            detected=bool(self.args.get("detected", True)),
            suspects=tuple(self.args.get("suspects", ())),
            explanation=str(self.args.get("explanation", "")),
        )


_ACTION_RE = re.compile(r"^[ \t>*`]*\**\s*Action\s*\**\s*:\s*(?P<call>.+?)\s*$", re.IGNORECASE | re.MULTILINE)
_THOUGHT_RE = re.compile(r"^[ \t>*`]*\**\s*Thought\s*\**\s*:\s*(?P<text>.*?)\s*$", re.IGNORECASE | re.MULTILINE)

_WORD_CONSTANTS = {"true": True, "True": True, "false": False, "False": False, "null": None, "None": None}


def _literal(node: ast.expression):
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.Name) and node.id in _WORD_CONSTANTS:
        return _WORD_CONSTANTS[node.id]
    if isinstance(node, (ast.List, ast.Tuple)):
        return [_literal(e) for e in node.elts]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        value = _literal(node.operand)
        if isinstance(value, (int, float)):
            return -value
    raise Unparseable(f"unsupported literal in action arguments: {ast.dump(node)}")


def _parse_call(text: str) -> tuple[str, list, dict]:
    cleaned = text.strip().strip("`").strip()
    try:
        tree = ast.parse(cleaned, mode="eval")
    except SyntaxError as exc:
        raise Unparseable(f"action is not a call: {text!r}") from exc
    call = tree.body
    if not isinstance(call, ast.Call) or not isinstance(call.func, ast.Name):
        raise Unparseable(f"action is not a plain name(...) call: {text!r}")
    positional = [_literal(a) for a in call.args]
    keywords = {}
    for kw in call.keywords:
        if kw.arg is None:
            raise Unparseable("**kwargs form is not supported in actions")
        keywords[kw.arg] = _literal(kw.value)
    return call.func.id, positional, keywords


def bind_args(params_schema: dict, positional: list, keywords: dict) -> dict:
    """Map positional values onto declared parameter names, in order."""
    names = list(params_schema.get("param_order") or params_schema["properties"])
    if len(positional) > len(names):
        raise Unparseable(f"too many positional arguments ({len(positional)} given)")
    args = dict(zip(names, positional))
    overlap = set(args) & set(keywords)
    if overlap:
        raise Unparseable(f"arguments given twice: {sorted(overlap)}")
    args.update(keywords)
    return args


def parse_react(text: str, registry: ToolRegistry | None = None) -> ParsedTurn:
    """Extract the last Thought/Action pair of a completion.

    Raises Unparseable when no well-formed action call is present; the
    run loop answers that with a format reminder.
    """
    if not isinstance(text, str) or not text.strip():
        raise Unparseable("empty completion")
    registry = registry or build_registry()

    actions = list(_ACTION_RE.finditer(text))
    if not actions:
        raise Unparseable("no 'Action:' line found")
    action = actions[-1]
    name, positional, keywords = _parse_call(action.group("call"))

    thoughts = [m for m in _THOUGHT_RE.finditer(text) if m.start() < action.start()]
    thought: str | None = None
    if thoughts:
        # The thought runs from its marker up to the action line.
        start = thoughts[-1].start("text")
        thought = text[start : action.start()].strip() or None

    if name in registry.descriptors:
        args = bind_args(registry.descriptor(name).params_schema, positional, keywords)
    else:
        # Unknown tools still dispatch, so the agent sees the gateway error.
        args = dict(enumerate(positional)) if positional and not keywords else dict(keywords)
        args = {str(k): v for k, v in args.items()}
    return ParsedTurn(thought=thought, name=name, args=args)


FORMAT_REMINDER = (
    "Your reply could not be parsed. End your reply with exactly one line of the form\n"
    "Action: tool_name(arg1, arg2, ...)\n"
    "with quoted strings and plain integers, optionally preceded by a 'Thought:' line."
)
