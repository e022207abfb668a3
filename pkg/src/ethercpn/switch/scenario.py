"""Scenario description: sources, consumers, switch configuration, stop rule."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Tuple, Union


class Priority(str, enum.Enum):
    """Traffic classes, highest first."""

    HIGH = "H"
    MEAN = "M"
    LOW = "L"

    def __str__(self) -> str:
        return self.value


DEFAULT_PRIORITIES = (Priority.HIGH.value, Priority.MEAN.value, Priority.LOW.value)
DEFAULT_PORTS = ("O1", "O2")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Emission:
    inp: str
    outp: str
    prio: str
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ScenarioError("emission count must be >= 1, got %d" % self.count)


@dataclass(frozen=True)
class SourceSpec:
    period: int
    emissions: Tuple[Emission, ...]
    start_offset: int = 0

    def __post_init__(self):
        if self.period < 1:
            raise ScenarioError("source period must be >= 1, got %d" % self.period)
        if self.start_offset < 0:
            raise ScenarioError("source start_offset must be >= 0")
        if not self.emissions:
            raise ScenarioError("source has no emissions")
        object.__setattr__(self, "emissions", tuple(self.emissions))

    @property
    def packets_per_period(self) -> int:
        return sum(e.count for e in self.emissions)


@dataclass(frozen=True)
class ConsumerSpec:
    port: str
    period: int = 5
    capacity: int = 3  # folded logical consumers, one packet each per period
    start_offset: int = 0

    def __post_init__(self):
        if self.period < 1:
            raise ScenarioError("consumer period must be >= 1, got %d" % self.period)
        if self.capacity < 1:
            raise ScenarioError("consumer capacity must be >= 1")
        if self.start_offset < 0:
            raise ScenarioError("consumer start_offset must be >= 0")


@dataclass(frozen=True)
class StageDelays:
    ingress_fifo: int = 2
    demux: int = 2
    queue: int = 1
    transmit: int = 5

    def __post_init__(self):
        for name in ("ingress_fifo", "demux", "queue", "transmit"):
            if getattr(self, name) < 0:
                raise ScenarioError("stage delay %s must be >= 0" % name)

    @property
    def pipeline_latency(self) -> int:
        return self.ingress_fifo + self.demux + self.queue + self.transmit


@dataclass(frozen=True)
class SwitchConfig:
    output_ports: Tuple[str, ...] = DEFAULT_PORTS
    priorities: Tuple[str, ...] = DEFAULT_PRIORITIES
    stage_delays: StageDelays = field(default_factory=StageDelays)

    def __post_init__(self):
        object.__setattr__(self, "output_ports", tuple(self.output_ports))
        object.__setattr__(self, "priorities", tuple(self.priorities))
        if not self.priorities:
            raise ScenarioError("at least one priority is required")
        if len(self.priorities) > 8:
            raise ScenarioError("at most 8 priorities are supported")
        if len(set(self.priorities)) != len(self.priorities):
            raise ScenarioError("duplicate priority")
        if not self.output_ports:
            raise ScenarioError("at least one output port is required")
        if len(set(self.output_ports)) != len(self.output_ports):
            raise ScenarioError("duplicate output port")


@dataclass(frozen=True)
class StaticPriority:
    name = "sp"


@dataclass(frozen=True)
class WRR:
    weights: Tuple[int, ...]
    name = "wrr"

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights or any(type(w) is not int or w < 1 for w in self.weights):
            raise ScenarioError("WRR weights must be positive integers, got %r" % (self.weights,))


SchedulerChoice = Union[StaticPriority, WRR]


@dataclass(frozen=True)
class StopCondition:
    max_steps: int = 10000
    max_time: int = 565

    def __post_init__(self):
        if self.max_steps < 0 or self.max_time < 0:
            raise ScenarioError("stop bounds must be >= 0")


@dataclass(frozen=True)
class Scenario:
    sources: Tuple[SourceSpec, ...]
    consumers: Tuple[ConsumerSpec, ...]
    switch: SwitchConfig = field(default_factory=SwitchConfig)
    scheduler: SchedulerChoice = field(default_factory=StaticPriority)
    stop: StopCondition = field(default_factory=StopCondition)
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "consumers", tuple(self.consumers))
        self.validate()

    def validate(self) -> None:
        ports = set(self.switch.output_ports)
        prios = set(self.switch.priorities)
        consumer_ports = [c.port for c in self.consumers]
        if len(set(consumer_ports)) != len(consumer_ports):
            raise ScenarioError("more than one consumer page for a port")
        for c in self.consumers:
            if c.port not in ports:
                raise ScenarioError("consumer on unknown port %s" % c.port)
        for s in self.sources:
            for e in s.emissions:
                if e.outp not in ports:
                    raise ScenarioError("emission to unknown output port %s" % e.outp)
                if e.outp not in consumer_ports:
                    raise ScenarioError("no consumer for output port %s" % e.outp)
                if e.prio not in prios:
                    raise ScenarioError("emission with unknown priority %s" % e.prio)
        if isinstance(self.scheduler, WRR) and len(self.scheduler.weights) != len(self.switch.priorities):
            raise ScenarioError("WRR needs one weight per priority (%d), got %d"
                                % (len(self.switch.priorities), len(self.scheduler.weights)))

    @property
    def inputs(self) -> Tuple[str, ...]:
        seen = []
        for s in self.sources:
            for e in s.emissions:
                if e.inp not in seen:
                    seen.append(e.inp)
        return tuple(seen)


# -- built-in scenarios ---------------------------------------------------------

BASE_PERIOD = 5
DEFAULT_WEIGHTS = (6, 3, 1)  # 60% / 30% / 10% as packets per server visit


def _folded_source(count: int) -> SourceSpec:
    emissions = []
    i = 1
    for port in DEFAULT_PORTS:
        for prio in DEFAULT_PRIORITIES:
            emissions.append(Emission("I%d" % i, port, prio, count))
            i += 1
    return SourceSpec(BASE_PERIOD, tuple(emissions), 0)


def _default_consumers():
    return tuple(ConsumerSpec(port, BASE_PERIOD, 3, 0) for port in DEFAULT_PORTS)


def base_scenario(scheduler: SchedulerChoice = StaticPriority(), seed: int = 1) -> Scenario:
    """Six folded periodic sources, one packet per (port, priority) each period."""
    return Scenario((_folded_source(1),), _default_consumers(), SwitchConfig(), scheduler,
                    StopCondition(10000, 565), seed)


def congestion_scenario(scheduler: SchedulerChoice = StaticPriority(), seed: int = 1) -> Scenario:
    """Base scenario with two extra packets per source and period (18 per period)."""
    return Scenario((_folded_source(3),), _default_consumers(), SwitchConfig(), scheduler,
                    StopCondition(10000, 565), seed)


BUILTIN = {
    "sp-base": lambda: base_scenario(StaticPriority()),
    "sp-congested": lambda: congestion_scenario(StaticPriority()),
    "wrr-base": lambda: base_scenario(WRR(DEFAULT_WEIGHTS)),
    "wrr-congested": lambda: congestion_scenario(WRR(DEFAULT_WEIGHTS)),
}
