"""YAML scenario files.

Schema (every key except ``sources`` and ``consumers`` is optional)::

    seed: 1
    scheduler:
      policy: wrr            # sp | wrr
      weights: [6, 3, 1]     # wrr only, one per priority
    stop:
      max_steps: 10000
      max_time: 565
    switch:
      output_ports: [O1, O2]
      priorities: [H, M, L]  # highest first
      stage_delays: {ingress_fifo: 2, demux: 2, queue: 1, transmit: 5}
    sources:
      - period: 5
        start_offset: 0
        emissions:
          - {inp: I1, outp: O1, prio: H, count: 1}
    consumers:
      - {port: O1, period: 5, capacity: 3, start_offset: 0}

``normalize`` writes every field out, defaults included, so the dumped
text alone reproduces a run.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import yaml

from .switch.scenario import (
    BUILTIN,
    WRR,
    ConsumerSpec,
    Emission,
    Scenario,
    ScenarioError,
    SourceSpec,
    StageDelays,
    StaticPriority,
    StopCondition,
    SwitchConfig,
)


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(message if line is None else "line %d: %s" % (line, message))


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


_CONSTRUCT = yaml.SafeLoader("")


def _scalar(node: yaml.Node, kind: type, what: str):
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError("%s must be a scalar" % what, _line(node))
    value = _CONSTRUCT.construct_object(node, deep=True)
    if type(value) is not kind:
        raise ConfigError("%s must be %s, got %r" % (what, "an integer" if kind is int else "a name",
                                                    node.value), _line(node))
    if kind is str and not value:
        raise ConfigError("%s must not be empty" % what, _line(node))
    return value


def _seq(node: yaml.Node, what: str):
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError("%s must be a list" % what, _line(node))
    return node.value


def _map(node: yaml.Node, what: str, allowed) -> Dict[str, yaml.Node]:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("%s must be a mapping" % what, _line(node))
    out: Dict[str, yaml.Node] = {}
    for k, v in node.value:
        key = k.value
        if key not in allowed:
            raise ConfigError("unknown key %r in %s (allowed: %s)" % (key, what, ", ".join(allowed)), _line(k))
        if key in out:
            raise ConfigError("duplicate key %r in %s" % (key, what), _line(k))
        out[key] = v
    return out


def _build(node: yaml.Node, ctor: Callable[..., Any]):
    """Run a dataclass constructor, pinning invariant errors to ``node``."""
    try:
        return ctor()
    except ScenarioError as exc:
        raise ConfigError(str(exc), _line(node)) from None


def _ints(node, what):
    return tuple(_scalar(n, int, what) for n in _seq(node, what))


def _names(node, what):
    return tuple(_scalar(n, str, what) for n in _seq(node, what))


def _emission(node) -> Emission:
    m = _map(node, "emission", ("inp", "outp", "prio", "count"))
    for key in ("inp", "outp", "prio"):
        if key not in m:
            raise ConfigError("emission needs %r" % key, _line(node))
    args = {k: _scalar(m[k], str, k) for k in ("inp", "outp", "prio")}
    if "count" in m:
        args["count"] = _scalar(m["count"], int, "count")
    return _build(node, lambda: Emission(**args))


def _source(node) -> SourceSpec:
    m = _map(node, "source", ("period", "start_offset", "emissions"))
    if "period" not in m or "emissions" not in m:
        raise ConfigError("source needs 'period' and 'emissions'", _line(node))
    period = _scalar(m["period"], int, "period")
    offset = _scalar(m["start_offset"], int, "start_offset") if "start_offset" in m else 0
    emissions = tuple(_emission(n) for n in _seq(m["emissions"], "emissions"))
    return _build(node, lambda: SourceSpec(period, emissions, offset))


def _consumer(node) -> ConsumerSpec:
    m = _map(node, "consumer", ("port", "period", "capacity", "start_offset"))
    if "port" not in m:
        raise ConfigError("consumer needs 'port'", _line(node))
    args: Dict[str, Any] = {"port": _scalar(m["port"], str, "port")}
    for key in ("period", "capacity", "start_offset"):
        if key in m:
            args[key] = _scalar(m[key], int, key)
    return _build(node, lambda: ConsumerSpec(**args))


def _switch(node) -> SwitchConfig:
    m = _map(node, "switch", ("output_ports", "priorities", "stage_delays"))
    args: Dict[str, Any] = {}
    if "output_ports" in m:
        args["output_ports"] = _names(m["output_ports"], "output_ports")
    if "priorities" in m:
        args["priorities"] = _names(m["priorities"], "priorities")
    if "stage_delays" in m:
        keys = ("ingress_fifo", "demux", "queue", "transmit")
        d = _map(m["stage_delays"], "stage_delays", keys)
        delays = {k: _scalar(v, int, k) for k, v in d.items()}
        args["stage_delays"] = _build(m["stage_delays"], lambda: StageDelays(**delays))
    return _build(node, lambda: SwitchConfig(**args))


def _scheduler(node):
    m = _map(node, "scheduler", ("policy", "weights"))
    policy = _scalar(m["policy"], str, "policy") if "policy" in m else "sp"
    if policy == "sp":
        if "weights" in m:
            raise ConfigError("static priority takes no weights", _line(m["weights"]))
        return StaticPriority()
    if policy == "wrr":
        if "weights" not in m:
            raise ConfigError("wrr needs 'weights'", _line(node))
        weights = _ints(m["weights"], "weights")
        return _build(m["weights"], lambda: WRR(weights))
    raise ConfigError("unknown policy %r (sp or wrr)" % policy, _line(m["policy"]))


def _stop(node) -> StopCondition:
    m = _map(node, "stop", ("max_steps", "max_time"))
    args = {k: _scalar(v, int, k) for k, v in m.items()}
    return _build(node, lambda: StopCondition(**args))


TOP_KEYS = ("seed", "scheduler", "stop", "switch", "sources", "consumers")


def parse_config(text: str) -> Scenario:
    """Parse scenario YAML. Errors carry the offending line number."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError("YAML syntax error: %s" % getattr(exc, "problem", exc),
                          mark.line + 1 if mark else None) from None
    if node is None:
        raise ConfigError("empty scenario file", 1)
    m = _map(node, "scenario", TOP_KEYS)
    for key in ("sources", "consumers"):
        if key not in m:
            raise ConfigError("scenario needs %r" % key, _line(node))
    seed = _scalar(m["seed"], int, "seed") if "seed" in m else 1
    scheduler = _scheduler(m["scheduler"]) if "scheduler" in m else StaticPriority()
    stop = _stop(m["stop"]) if "stop" in m else StopCondition()
    switch = _switch(m["switch"]) if "switch" in m else SwitchConfig()
    sources = tuple(_source(n) for n in _seq(m["sources"], "sources"))
    consumers = tuple(_consumer(n) for n in _seq(m["consumers"], "consumers"))
    return _build(node, lambda: Scenario(sources, consumers, switch, scheduler, stop, seed))


def to_dict(sc: Scenario) -> Dict[str, Any]:
    sched: Dict[str, Any] = {"policy": sc.scheduler.name}
    if isinstance(sc.scheduler, WRR):
        sched["weights"] = list(sc.scheduler.weights)
    d = sc.switch.stage_delays
    return {
        "seed": sc.seed,
        "scheduler": sched,
        "stop": {"max_steps": sc.stop.max_steps, "max_time": sc.stop.max_time},
        "switch": {
            "output_ports": list(sc.switch.output_ports),
            "priorities": list(sc.switch.priorities),
            "stage_delays": {"ingress_fifo": d.ingress_fifo, "demux": d.demux,
                             "queue": d.queue, "transmit": d.transmit},
        },
        "sources": [
            {"period": s.period, "start_offset": s.start_offset,
             "emissions": [{"inp": e.inp, "outp": e.outp, "prio": e.prio, "count": e.count}
                           for e in s.emissions]}
            for s in sc.sources
        ],
        "consumers": [
            {"port": c.port, "period": c.period, "capacity": c.capacity,
             "start_offset": c.start_offset}
            for c in sc.consumers
        ],
    }


def normalize(sc: Scenario) -> str:
    """Canonical YAML text with every default spelled out."""
    return yaml.safe_dump(to_dict(sc), sort_keys=False, default_flow_style=None, width=100)


def load_scenario(source: Union[str, Path]) -> Scenario:
    """A built-in name or the path of a scenario file."""
    if isinstance(source, str) and source in BUILTIN:
        return BUILTIN[source]()
    path = Path(source)
    if not path.is_file():
        raise ConfigError("no built-in scenario or file named %r (built-ins: %s)"
                          % (str(source), ", ".join(BUILTIN)))
    return parse_config(path.read_text(encoding="utf-8"))
