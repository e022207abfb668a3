"""Command-line front end.

    ethercpn --scenario sp-base --out runs/sp --emit stats,records,trace,net

Exit codes: 0 success (famine is a result, not a failure), 2 bad scenario
or arguments, 3 the simulation itself failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .config import ConfigError, load_scenario, normalize
from .kernel import Engine, FiringError, Net, NetError, RunResult, format_trace
from .metrics import MetricsError, RunStats, extract_records, format_table, records_csv, stats_csv, summarize
from .netdump import dump_net
from .switch import BUILTIN, WRR, Scenario, ScenarioError, StopCondition, build_net

EMIT_CHOICES = ("stats", "records", "trace", "net")
FILES = {"stats": "stats.csv", "records": "records.csv", "trace": "trace.txt", "net": "net.dot"}
SCENARIO_FILE = "scenario.yaml"

EXIT_OK, EXIT_BUILD, EXIT_RUNTIME = 0, 2, 3


class BuildError(Exception):
    pass


@dataclass
class Outcome:
    scenario: Scenario
    net: Net
    result: RunResult
    records: list
    stats: RunStats


def build(scenario: Scenario) -> Net:
    try:
        return build_net(scenario)
    except (NetError, ScenarioError, ValueError) as exc:
        raise BuildError(str(exc)) from exc


def simulate(scenario: Scenario, net: Optional[Net] = None) -> Outcome:
    net = net or build(scenario)
    result = Engine(net, scenario.seed).run(scenario.stop.max_steps, scenario.stop.max_time)
    records = extract_records(result.trace)
    return Outcome(scenario, net, result, records, summarize(records, scenario.switch.priorities))


def write_outputs(out: Outcome, directory: Path, emit: Sequence[str]) -> List[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    texts = {SCENARIO_FILE: normalize(out.scenario)}
    if "stats" in emit:
        texts[FILES["stats"]] = stats_csv(out.stats)
    if "records" in emit:
        texts[FILES["records"]] = records_csv(out.records)
    if "trace" in emit:
        texts[FILES["trace"]] = format_trace(out.result.trace)
    if "net" in emit:
        texts[FILES["net"]] = dump_net(out.net)
    written = []
    for name, text in texts.items():
        path = directory / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def _weights(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("weights must be comma-separated integers") from None


def _emit(text: str):
    items = [x.strip() for x in text.split(",") if x.strip()]
    bad = [x for x in items if x not in EMIT_CHOICES]
    if bad:
        raise argparse.ArgumentTypeError("unknown output %s (choose from %s)"
                                         % (", ".join(bad), ", ".join(EMIT_CHOICES)))
    return tuple(items)


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected an integer, got %r" % text) from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ethercpn", description="Simulate the Ethernet switch CPN model.")
    ap.add_argument("--scenario", required=True,
                    help="built-in name (%s) or path to a YAML scenario" % ", ".join(BUILTIN))
    ap.add_argument("--seed", type=int)
    ap.add_argument("--stop-steps", type=_nonneg)
    ap.add_argument("--stop-time", type=_nonneg)
    ap.add_argument("--weights", type=_weights, help="WRR quanta, e.g. 6,3,1")
    ap.add_argument("--out", type=Path, help="output directory")
    ap.add_argument("--emit", type=_emit, default=("stats", "records"),
                    help="comma list of %s (default stats,records)" % ",".join(EMIT_CHOICES))
    ap.add_argument("--sweep", type=_nonneg, default=0, metavar="N",
                    help="run N consecutive seeds, each into OUT/seed-<n>")
    ap.add_argument("--jobs", type=_nonneg, default=1, help="parallel runs for --sweep")
    return ap


def resolve(args: argparse.Namespace) -> Scenario:
    sc = load_scenario(args.scenario)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.stop_steps is not None or args.stop_time is not None:
        changes["stop"] = StopCondition(
            sc.stop.max_steps if args.stop_steps is None else args.stop_steps,
            sc.stop.max_time if args.stop_time is None else args.stop_time)
    if args.weights is not None:
        if not isinstance(sc.scheduler, WRR):
            raise ScenarioError("--weights needs a wrr scenario")
        changes["scheduler"] = WRR(args.weights)
    return dataclasses.replace(sc, **changes) if changes else sc


def _one(scenario: Scenario, out: Optional[Path], emit: Sequence[str]) -> Outcome:
    outcome = simulate(scenario)
    if out is not None:
        write_outputs(outcome, out, emit)
    return outcome


def _report(outcome: Outcome, stream) -> None:
    r = outcome.result
    stream.write("seed %d: %d steps, clock %d, stopped on %s\n"
                 % (outcome.scenario.seed, len(r.trace), r.clock, r.stop_reason))
    stream.write(format_table(outcome.stats))


def run_command(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_BUILD if exc.code else EXIT_OK
    try:
        scenario = resolve(args)
        build(scenario)
        if args.sweep and args.out is None:
            raise ScenarioError("--sweep needs --out")
    except (ConfigError, ScenarioError, BuildError, OSError) as exc:
        stderr.write("error: %s\n" % exc)
        return EXIT_BUILD

    try:
        if args.sweep:
            seeds = [scenario.seed + i for i in range(args.sweep)]
            jobs = [(dataclasses.replace(scenario, seed=s), args.out / ("seed-%d" % s)) for s in seeds]
            if args.jobs > 1:
                with ProcessPoolExecutor(args.jobs) as pool:
                    outcomes = list(pool.map(_one, *zip(*jobs), [args.emit] * len(jobs)))
            else:
                outcomes = [_one(sc, d, args.emit) for sc, d in jobs]
        else:
            outcomes = [_one(scenario, args.out, args.emit)]
    except (FiringError, NetError, MetricsError) as exc:
        stderr.write("simulation failed: %s\n" % exc)
        return EXIT_RUNTIME
    for o in outcomes:
        _report(o, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run_command())
