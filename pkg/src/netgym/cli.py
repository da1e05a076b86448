"""Command-line surface: list scenarios, run evaluations, serve the
gateway for external agents, replay recorded trajectories.

Option precedence is CLI flag, then NETGYM_* environment variable, then
config file key, then built-in default. Exit codes for `run`: 0 pass,
1 scoring failure, 2 scenario missing, 3 agent error.
"""

from __future__ import annotations

import json
import os
import signal
import sys
import threading
from dataclasses import replace
from importlib import resources
from pathlib import Path

import click
import yaml

from netgym.errors import NetGymError, SchemaError
from netgym.evaluator import render_report, render_suite_summary, score
from netgym.gateway.server import GatewayServer, serve_stdio
from netgym.harness.policies import LLMPolicy, load_script
from netgym.harness.runner import replay_log, run_session_full
from netgym.harness.trajectory import OUTCOME_SUBMITTED, write_log
from netgym.netsim.state import NetState
from netgym.scenario import (
    ScenarioSpec,
    bundled_suite_dir,
    find_scenario,
    load_scenario,
    suite_scenario_paths,
)

EXIT_PASS = 0
EXIT_SCORING_FAIL = 1
EXIT_SCENARIO_MISSING = 2
EXIT_AGENT_ERROR = 3
EXIT_BIND_FAILURE = 4

DEFAULT_ENDPOINT = "127.0.0.1:7777"


def _load_config(path: str | None) -> dict:
    candidate = path or os.environ.get("NETGYM_CONFIG")
    if not candidate:
        return {}
    file = Path(candidate)
    if not file.is_file():
        raise click.ClickException(f"config file {file} not found")
    raw = yaml.safe_load(file.read_text(encoding="utf-8")) or {}
    if not isinstance(raw, dict):
        raise click.ClickException(f"{file}: config must be a mapping")
    return raw


def _resolve(cli_value, env_name: str, config: dict, key: str, default):
    if cli_value is not None:
        return cli_value
    env_value = os.environ.get(env_name)
    if env_value is not None:
        return env_value
    if key in config:
        return config[key]
    return default


def _suite_dir(cli_value, config: dict) -> Path:
    return Path(_resolve(cli_value, "NETGYM_SCENARIOS", config, "scenarios", bundled_suite_dir()))


def _make_policy(selector: str, config: dict):
    kind, _, value = selector.partition(":")
    if kind == "scripted" and value:
        path = Path(value)
        if not path.is_file():
            bundled = resources.files("netgym").joinpath(f"policies/{value}.yaml")
            if bundled.is_file():
                path = Path(str(bundled))
            else:
                raise SchemaError(f"script {value!r} is neither a file nor a bundled policy")
        return load_script(path)
    if kind == "llm" and value:
        profiles = config.get("llm_profiles", {})
        profile = profiles.get(value)
        if not isinstance(profile, dict) or "endpoint" not in profile:
            raise SchemaError(f"llm profile {value!r} with an 'endpoint' key is required in the config file")
        api_key = None
        if profile.get("api_key_env"):
            api_key = os.environ.get(profile["api_key_env"])
        return LLMPolicy(
            endpoint=profile["endpoint"],
            model=profile.get("model", "default"),
            api_key=api_key or profile.get("api_key"),
            timeout=float(profile.get("timeout", 60)),
            system_prompt=profile.get("system_prompt"),
        )
    raise SchemaError(f"policy selector must be scripted:<name-or-file> or llm:<profile>, got {selector!r}")


def counters_dump(state: NetState) -> str:
    """Canonical JSON of every per-port counter cell."""
    devices = state.snapshot()["devices"]
    dump = {
        name: {key: dev[key] for key in ("ingress", "egress", "tx_drops", "extra_counters")}
        for name, dev in devices.items()
    }
    return json.dumps(dump, sort_keys=True, indent=2) + "\n"


@click.group()
def main():
    """Benchmark playground for network-troubleshooting agents."""


@main.command("list")
@click.option("--scenarios", "suite_dir_opt", default=None, help="Scenario suite directory.")
@click.option("--config", "config_path", default=None, help="YAML config file.")
def cmd_list(suite_dir_opt, config_path):
    """List the scenarios of a suite with their fault templates."""
    config = _load_config(config_path)
    suite_dir = _suite_dir(suite_dir_opt, config)
    paths = suite_scenario_paths(suite_dir)
    if not paths:
        click.echo("no scenarios found")
        return
    for path in paths:
        try:
            spec = load_scenario(path)
            templates = ", ".join(f.template.value for f in spec.faults) or "none"
            click.echo(f"{spec.id:<24} {templates:<24} {spec.title}")
        except NetGymError as exc:
            click.echo(f"{path.stem:<24} INVALID: {exc.message}")


def _run_one(spec: ScenarioSpec, policy_selector: str, out_dir: Path, config: dict):
    policy = _make_policy(policy_selector, config)
    trajectory, session = run_session_full(spec, policy)
    report = score(trajectory, trajectory.findings, spec.ground_truth)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_log(trajectory, out_dir / "trajectory.jsonl")
    (out_dir / "counters.json").write_text(counters_dump(session.env.state), encoding="utf-8")
    (out_dir / "report.json").write_text(render_report(report, "structured"), encoding="utf-8")
    (out_dir / "report.txt").write_text(render_report(report, "text"), encoding="utf-8")
    return trajectory, report


def _exit_code(trajectory, report) -> int:
    if trajectory.outcome != OUTCOME_SUBMITTED:
        return EXIT_AGENT_ERROR
    return EXIT_PASS if report.passed else EXIT_SCORING_FAIL


@main.command("run")
@click.argument("scenario_id", required=False)
@click.option("--policy", "policy_opt", default=None, help="scripted:<name-or-file> or llm:<profile>.")
@click.option("--seed", "seed_opt", default=None, type=int, help="Override the scenario seed.")
@click.option("--out", "out_opt", default=None, help="Output directory for logs and reports.")
@click.option("--scenarios", "suite_dir_opt", default=None, help="Scenario suite directory.")
@click.option("--suite", is_flag=True, help="Run every scenario in the suite.")
@click.option("--jobs", "jobs_opt", default=None, type=int, help="Parallel workers with --suite.")
@click.option("--quiet", is_flag=True, help="Print only the report path(s).")
@click.option("--config", "config_path", default=None, help="YAML config file.")
def cmd_run(scenario_id, policy_opt, seed_opt, out_opt, suite_dir_opt, suite, jobs_opt, quiet, config_path):
    """Run an agent against one scenario (or the whole suite) and score it."""
    config = _load_config(config_path)
    suite_dir = _suite_dir(suite_dir_opt, config)
    policy_selector = _resolve(policy_opt, "NETGYM_POLICY", config, "policy", "scripted:poc")
    out_root = Path(_resolve(out_opt, "NETGYM_OUT", config, "out", "runs"))
    seed_env = _resolve(seed_opt, "NETGYM_SEED", config, "seed", None)
    seed = int(seed_env) if seed_env is not None else None

    if not suite and not scenario_id:
        raise click.UsageError("give a scenario id or use --suite")

    if suite:
        jobs_value = _resolve(jobs_opt, "NETGYM_JOBS", config, "jobs", 1)
        sys.exit(_run_suite(suite_dir, policy_selector, seed, out_root, int(jobs_value), quiet, config))

    path = find_scenario(suite_dir, scenario_id)
    if path is None:
        click.echo(f"scenario {scenario_id!r} not found in {suite_dir}", err=True)
        sys.exit(EXIT_SCENARIO_MISSING)
    spec = load_scenario(path)
    if seed is not None:
        spec = replace(spec, seed=seed)
    try:
        trajectory, report = _run_one(spec, policy_selector, out_root / spec.id, config)
    except NetGymError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(EXIT_AGENT_ERROR)
    if quiet:
        click.echo(str(out_root / spec.id / "report.json"))
    else:
        click.echo(render_report(report, "text"), nl=False)
    sys.exit(_exit_code(trajectory, report))


def _run_suite(suite_dir, policy_selector, seed, out_root, jobs, quiet, config) -> int:
    from concurrent.futures import ThreadPoolExecutor

    paths = suite_scenario_paths(suite_dir)
    specs = []
    for path in paths:
        spec = load_scenario(path)
        if seed is not None:
            spec = replace(spec, seed=seed)
        specs.append(spec)

    def job(spec):
        return spec, _run_one(spec, policy_selector, out_root / spec.id, config)

    results = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for spec, (trajectory, report) in pool.map(job, specs):
            results.append((spec, trajectory, report))

    reports = [r for _, _, r in results]
    if quiet:
        for spec, _, _ in results:
            click.echo(str(out_root / spec.id / "report.json"))
    else:
        click.echo(render_suite_summary(reports), nl=False)
    return max(_exit_code(t, r) for _, t, r in results)


@main.command("serve")
@click.argument("scenario_id")
@click.option("--endpoint", "endpoint_opt", default=None, help="host:port to bind (TCP mode).")
@click.option("--stdio", is_flag=True, help="Serve frames over stdin/stdout instead of TCP.")
@click.option("--scenarios", "suite_dir_opt", default=None, help="Scenario suite directory.")
@click.option("--config", "config_path", default=None, help="YAML config file.")
def cmd_serve(scenario_id, endpoint_opt, stdio, suite_dir_opt, config_path):
    """Serve one scenario's tool gateway for external agents."""
    config = _load_config(config_path)
    suite_dir = _suite_dir(suite_dir_opt, config)
    path = find_scenario(suite_dir, scenario_id)
    if path is None:
        click.echo(f"scenario {scenario_id!r} not found in {suite_dir}", err=True)
        sys.exit(EXIT_SCENARIO_MISSING)
    spec = load_scenario(path)

    if stdio:
        serve_stdio(spec, sys.stdin, sys.stdout)
        return

    endpoint = _resolve(endpoint_opt, "NETGYM_ENDPOINT", config, "endpoint", DEFAULT_ENDPOINT)
    host, _, port_text = endpoint.partition(":")
    try:
        port = int(port_text)
    except ValueError:
        raise click.ClickException(f"endpoint must be host:port, got {endpoint!r}")
    try:
        server = GatewayServer(spec, host, port)
    except OSError as exc:
        click.echo(f"cannot bind {endpoint}: {exc}", err=True)
        sys.exit(EXIT_BIND_FAILURE)

    stop = threading.Event()
    signal.signal(signal.SIGINT, lambda signum, frame: stop.set())
    signal.signal(signal.SIGTERM, lambda signum, frame: stop.set())
    server.serve_background()
    click.echo(f"serving {spec.id} on {server.endpoint[0]}:{server.endpoint[1]}", err=True)
    stop.wait()
    sealed = server.core.seal_open_sessions()
    click.echo(f"shutting down, sealed {sealed} open session(s)", err=True)
    server.shutdown()


@main.command("replay")
@click.argument("log_file")
@click.option("--scenarios", "suite_dir_opt", default=None, help="Scenario suite directory.")
@click.option("--config", "config_path", default=None, help="YAML config file.")
def cmd_replay(log_file, suite_dir_opt, config_path):
    """Re-execute a trajectory log and report observation divergences."""
    config = _load_config(config_path)
    suite_dir = _suite_dir(suite_dir_opt, config)
    try:
        trajectory, divergences = replay_log(log_file, suite_dir)
    except NetGymError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(EXIT_SCENARIO_MISSING)
    if not divergences:
        click.echo(f"replayed {len(trajectory.steps)} step(s): no divergence")
        sys.exit(EXIT_PASS)
    for d in divergences:
        click.echo(f"step {d['index']} diverged:")
        click.echo(f"  recorded: {d['recorded']!r}")
        click.echo(f"  replayed: {d['replayed']!r}")
    sys.exit(EXIT_SCORING_FAIL)


if __name__ == "__main__":
    main()
