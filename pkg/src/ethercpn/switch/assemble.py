"""Hierarchical assembly of the switch net.

Page tree::

    root
    ├── traffic_source            (one per SourceSpec: traffic_source, traffic_source2, ...)
    ├── switch
    │   ├── fifo                  shared-memory FIFO
    │   ├── demux                 DMULX, DMULX1, DMULX2, ...
    │   ├── queues_<port>         per-priority FIFO lists Ptr4'k
    │   └── scheduler_<port>      static priority or WRR
    └── consumers
        └── <port>                folded periodic consumers

Root places: ``Ptr1`` (source -> switch), ``Ptr2``/``Ptr2'`` (switch ->
consumer, one per output port), ``Pbp1``/``Pbp2`` (output line free) and
``Nseq`` (packet sequence counter).
"""

from __future__ import annotations

from typing import Dict, Sequence, Tuple

from ..kernel import NIL, UNIT, Const, Net, Page, TimedToken, Var, flatten
from .colours import Colours, make_colours
from .pages import (
    build_demux,
    build_periodic_consumer,
    build_periodic_source,
    build_priority_queues,
    build_shared_fifo,
    demux_port,
)
from .scenario import Scenario


def delivery_place(index: int) -> str:
    """Ptr2, Ptr2', Ptr2'', ... for output ports 0, 1, 2, ..."""
    return "Ptr2" + "'" * index


def line_place(index: int) -> str:
    return "Pbp%d" % (index + 1)


def queue_place(k: int, port: str) -> str:
    return "Ptr4'%d_%s" % (k, port)


def scenario_colours(scenario: Scenario, extra_inputs: Sequence[str] = ()) -> Colours:
    inputs = list(scenario.inputs)
    inputs += [i for i in extra_inputs if i not in inputs]
    return make_colours(inputs or ("I1",), scenario.switch.output_ports, scenario.switch.priorities)


def build_switch_page(scenario: Scenario, colours: Colours) -> Page:
    from ..schedulers import build_scheduler_page  # schedulers imports this package

    cfg = scenario.switch
    d = cfg.stage_delays
    page = Page("switch")
    page.add_place("Ptr1", colours.packet, port=True)
    for i, _ in enumerate(cfg.output_ports):
        page.add_place(delivery_place(i), colours.packet, port=True)
        page.add_place(line_place(i), colours.unit, port=True)
    page.add_place("Pdmx", colours.tagged)
    page.substitute("fifo", build_shared_fifo(d.ingress_fifo, colours),
                    {"in": "Ptr1", "out": "Pdmx"})

    demux_map = {"in": "Pdmx"}
    for port in cfg.output_ports:
        for prio in cfg.priorities:
            staging = "Ptr4_%s_%s" % (port, prio)
            page.add_place(staging, colours.tagged)
            demux_map[demux_port(port, prio)] = staging
    page.substitute("demux", build_demux(cfg.output_ports, cfg.priorities, d.demux, d.queue, colours),
                    demux_map)

    for i, port in enumerate(cfg.output_ports):
        qmap: Dict[str, str] = {}
        smap: Dict[str, str] = {"Pbp": line_place(i), "out": delivery_place(i)}
        for k, prio in enumerate(cfg.priorities, 1):
            qp = queue_place(k, port)
            page.add_place(qp, colours.packets, timed=False, initial=[NIL])
            qmap["in_%s" % prio] = "Ptr4_%s_%s" % (port, prio)
            qmap["Q%d" % k] = qp
            smap["Q%d" % k] = qp
        page.substitute("queues_%s" % port, build_priority_queues(cfg.priorities, colours), qmap)
        sched = build_scheduler_page(scenario.scheduler, cfg.priorities, d.transmit, colours)
        page.substitute("scheduler_%s" % port, sched, smap)
    return page


def assemble_switch(scenario: Scenario) -> Page:
    """Root page of the full hierarchical model for ``scenario``."""
    scenario.validate()
    colours = scenario_colours(scenario)
    cfg = scenario.switch
    root = Page("root")
    root.add_place("Ptr1", colours.packet)
    root.add_place("Nseq", colours.count, timed=False, initial=[0])
    for i, _ in enumerate(cfg.output_ports):
        root.add_place(delivery_place(i), colours.packet)
        root.add_place(line_place(i), colours.unit, initial=[UNIT])

    for k, src in enumerate(scenario.sources):
        name = "traffic_source" if k == 0 else "traffic_source%d" % (k + 1)
        root.substitute(name, build_periodic_source(src, colours), {"out": "Ptr1", "seq": "Nseq"})

    switch_map = {"Ptr1": "Ptr1"}
    for i, _ in enumerate(cfg.output_ports):
        switch_map[delivery_place(i)] = delivery_place(i)
        switch_map[line_place(i)] = line_place(i)
    root.substitute("switch", build_switch_page(scenario, colours), switch_map)

    consumers = Page("consumers")
    by_port = {c.port: c for c in scenario.consumers}
    for i, port in enumerate(cfg.output_ports):
        if port not in by_port:
            continue
        consumers.add_place(delivery_place(i), colours.packet, port=True)
        consumers.add_place(line_place(i), colours.unit, port=True)
        consumers.substitute(port, build_periodic_consumer(by_port[port], cfg.priorities, colours),
                             {"in": delivery_place(i), "Pbp": line_place(i)})
    root.substitute("consumers", consumers,
                    {p: p for p in consumers.ports})
    return root


def build_net(scenario: Scenario) -> Net:
    return flatten(assemble_switch(scenario))


def build_probe_net(scenario: Scenario, injections: Sequence[Tuple[tuple, int]]) -> Net:
    """The switch of ``scenario`` with packets placed straight into Ptr1.

    ``injections`` are (packet, time) pairs. Each output line gets a sink
    ``sink_<port>`` that takes a delivered packet as soon as it lands and
    frees the line; sources and consumers are left out.
    """
    colours = scenario_colours(scenario, [pkt[0] for pkt, _ in injections])
    cfg = scenario.switch
    root = Page("probe")
    root.add_place("Ptr1", colours.packet, initial=[TimedToken(pkt, t) for pkt, t in injections])
    switch_map = {"Ptr1": "Ptr1"}
    p = Var("p")
    for i, port in enumerate(cfg.output_ports):
        root.add_place(delivery_place(i), colours.packet)
        root.add_place(line_place(i), colours.unit, initial=[UNIT])
        root.add_transition("sink_%s" % port, inputs=[(delivery_place(i), p)],
                            outputs=[(line_place(i), Const(UNIT))])
        switch_map[delivery_place(i)] = delivery_place(i)
        switch_map[line_place(i)] = line_place(i)
    root.substitute("switch", build_switch_page(scenario, colours), switch_map)
    return flatten(root)
