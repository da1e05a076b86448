"""Tool registry, session dispatch and the wire server agents attach to."""

from netgym.gateway.tools import (
    ACTION,
    BUILTIN_TOOL_NAMES,
    DATA_ADAPTER,
    ToolDescriptor,
    ToolRegistry,
    build_registry,
)
from netgym.gateway.session import Session, ToolCall, ToolResult

__all__ = [
    "ACTION",
    "BUILTIN_TOOL_NAMES",
    "DATA_ADAPTER",
    "ToolDescriptor",
    "ToolRegistry",
    "build_registry",
    "Session",
    "ToolCall",
    "ToolResult",
]
