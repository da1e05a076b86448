"""netgym: a reproducible benchmark for network-troubleshooting agents.

A deterministic simulated network with fault injection and per-port
telemetry, a tool gateway agents talk to, declarative scenarios with
ground truth, and a rule-based evaluator for recorded sessions.
"""

__version__ = "0.1.0"
