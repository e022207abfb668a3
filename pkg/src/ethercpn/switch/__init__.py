"""Coloured Petri net model of a two-stage-demultiplexing Ethernet switch."""

from .assemble import (
    assemble_switch,
    build_net,
    build_probe_net,
    delivery_place,
    line_place,
    queue_place,
    scenario_colours,
)
from .colours import Colours, default_colours, make_colours
from .pages import (
    build_demux,
    build_periodic_consumer,
    build_periodic_source,
    build_priority_queues,
    build_shared_fifo,
)
from .scenario import (
    BUILTIN,
    DEFAULT_WEIGHTS,
    WRR,
    ConsumerSpec,
    Emission,
    Priority,
    Scenario,
    ScenarioError,
    SourceSpec,
    StageDelays,
    StaticPriority,
    StopCondition,
    SwitchConfig,
    base_scenario,
    congestion_scenario,
)
