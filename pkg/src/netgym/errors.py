"""Exception hierarchy shared across the benchmark.

Every error carries a stable ``code`` string so the tool gateway can surface
failures to agents as structured results instead of crashes.
"""

from __future__ import annotations


class NetGymError(Exception):
    """Base class for all benchmark errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# Topology / document validation

class MalformedDocument(NetGymError):
    code = "malformed_document"


class DanglingEndpoint(NetGymError):
    code = "dangling_endpoint"


class AsymmetricWiring(NetGymError):
    code = "asymmetric_wiring"


class PartitionedTopology(NetGymError):
    code = "partitioned_topology"


# Simulator runtime

class UnknownHost(NetGymError):
    code = "unknown_host"


class UnknownSwitch(NetGymError):
    code = "unknown_switch"


class UnknownCounter(NetGymError):
    code = "unknown_counter"


class IndexOutOfRange(NetGymError):
    code = "index_out_of_range"


class UnknownTarget(NetGymError):
    code = "unknown_target"


class InvalidParameter(NetGymError):
    code = "invalid_parameter"


class EntryExists(NetGymError):
    code = "entry_exists"


class NoSuchEntry(NetGymError):
    code = "no_such_entry"


# Scenario files

class SchemaError(NetGymError):
    code = "schema_error"


class UnknownTemplate(NetGymError):
    code = "unknown_template"


class TargetNotInTopology(NetGymError):
    code = "target_not_in_topology"


class EmptyAxis(NetGymError):
    code = "empty_axis"


# Gateway

class UnknownTool(NetGymError):
    code = "unknown_tool"


class ArgsInvalid(NetGymError):
    code = "args_invalid"


class NotAllowlisted(NetGymError):
    code = "not_allowlisted"


class BudgetExhausted(NetGymError):
    code = "budget_exhausted"


class AlreadySubmitted(NetGymError):
    code = "already_submitted"


class SessionSealed(NetGymError):
    code = "session_sealed"


class ProtocolError(NetGymError):
    code = "protocol_error"


# Evaluation

class UnsealedTrajectory(NetGymError):
    code = "unsealed_trajectory"


class ServiceUnreachable(NetGymError):
    code = "service_unreachable"
