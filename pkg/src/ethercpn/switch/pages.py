"""Page builders for the switch model: source, shared FIFO, demultiplexers,
per-priority queues and periodic consumers."""

from __future__ import annotations

from typing import Optional, Sequence

from ..kernel import (
    NIL,
    P_HIGH,
    UNIT,
    Bag,
    Cons,
    Const,
    If,
    ListOf,
    Page,
    TimedToken,
    Tup,
    Var,
    Wild,
)
from .colours import OUTP, PRIO, Colours, default_colours
from .scenario import ConsumerSpec, SourceSpec

_UNIT = Const(UNIT)


def build_periodic_source(spec: SourceSpec, colours: Optional[Colours] = None) -> Page:
    """Emit every configured packet once per period, from ``start_offset`` on.

    Ports: ``out`` (packets, socket Ptr1) and ``seq`` (the shared packet
    counter; each emitted packet takes the next number).
    """
    colours = colours or default_colours()
    page = Page("traffic_source")
    page.add_place("clock", colours.unit, initial=[TimedToken(UNIT, spec.start_offset)])
    page.add_place("seq", colours.count, timed=False, port=True)
    page.add_place("out", colours.packet, port=True)
    n = Var("n")
    packets = []
    j = 0
    for e in spec.emissions:
        for _ in range(e.count):
            packets.append(Tup(e.inp, e.outp, e.prio, n + j))
            j += 1
    page.add_transition(
        "emit",
        inputs=[("clock", Wild()), ("seq", n)],
        outputs=[("clock", _UNIT.at(spec.period)), ("seq", n + j), ("out", Bag(*packets))],
    )
    return page


def build_shared_fifo(ingress_delay: int = 2, colours: Optional[Colours] = None) -> Page:
    """Shared-memory FIFO: one list token, append on arrival, emit the head.

    The head leaves tagged with its flow's running count (place ``tags``)
    so that later pure-delay stages cannot reorder a flow.
    """
    colours = colours or default_colours()
    page = Page("fifo")
    page.add_place("in", colours.packet, port=True)
    page.add_place("Pfifo", colours.packets, timed=False, initial=[NIL])
    page.add_place("tags", colours.flow_count, timed=False,
                   initial=[(o, pr, 0) for o in colours.outp.symbols for pr in colours.prio.symbols])
    page.add_place("out", colours.tagged, port=True)
    p, rest, lw, n = Var("p"), Var("rest"), Var("Lw"), Var("n")
    page.add_transition("enqueue", inputs=[("in", p), ("Pfifo", lw)],
                        outputs=[("Pfifo", lw.concat(ListOf(p)))], priority=P_HIGH)
    page.add_transition("dequeue",
                        inputs=[("Pfifo", Cons(p, rest)), ("tags", Tup(p[OUTP], p[PRIO], n))],
                        outputs=[("Pfifo", rest), ("tags", Tup(p[OUTP], p[PRIO], n + 1)),
                                 ("out", Tup(n, p).at(ingress_delay))],
                        priority=P_HIGH)
    return page


def build_demux(ports: Sequence[str], priorities: Sequence[str], demux_delay: int = 2,
                queue_delay: int = 1, colours: Optional[Colours] = None) -> Page:
    """Two-stage routing: ``DMULX`` by destination port, then ``DMULXk`` (one
    per port) by priority, each through conditional output arcs.

    Ports: ``in`` and one ``out_<port>_<prio>`` place per pair.
    """
    colours = colours or default_colours()
    unknown = set(colours.outp.symbols) - set(ports)
    if unknown:
        raise ValueError("packet colour set admits ports with no route: %s" % sorted(unknown))
    unknown = set(colours.prio.symbols) - set(priorities)
    if unknown:
        raise ValueError("packet colour set admits priorities with no queue: %s" % sorted(unknown))
    page = Page("demux")
    page.add_place("in", colours.tagged, port=True)
    p, n = Var("p"), Var("n")
    tp = Tup(n, p)
    for port in ports:
        page.add_place("Ptr3_%s" % port, colours.tagged)
        for prio in priorities:
            page.add_place(demux_port(port, prio), colours.tagged, port=True)
    page.add_transition(
        "DMULX",
        inputs=[("in", tp)],
        outputs=[("Ptr3_%s" % port, If(p[OUTP].eq(port), tp.at(demux_delay))) for port in ports],
        priority=P_HIGH,
    )
    for k, port in enumerate(ports, 1):
        page.add_transition(
            "DMULX%d" % k,
            inputs=[("Ptr3_%s" % port, tp)],
            outputs=[(demux_port(port, prio), If(p[PRIO].eq(prio), tp.at(queue_delay)))
                     for prio in priorities],
            priority=P_HIGH,
        )
    return page


def demux_port(port: str, prio: str) -> str:
    return "out_%s_%s" % (port, prio)


def build_priority_queues(priorities: Sequence[str], colours: Optional[Colours] = None) -> Page:
    """Per-priority FIFO lists of one output port.

    Ports: ``in_<prio>`` (tagged packets from the demultiplexer) and
    ``Q1..Qn`` (the list places shared with the scheduler page). ``next<k>``
    holds the tag queue k expects next, so packets join in tag order.
    """
    colours = colours or default_colours()
    page = Page("queues")
    p, lw, n = Var("p"), Var("Lw"), Var("n")
    for k, prio in enumerate(priorities, 1):
        page.add_place("in_%s" % prio, colours.tagged, port=True)
        page.add_place("Q%d" % k, colours.packets, timed=False, port=True)
        page.add_place("next%d" % k, colours.count, timed=False, initial=[0])
        page.add_transition("enqueue%d" % k,
                            inputs=[("in_%s" % prio, Tup(n, p)), ("next%d" % k, n), ("Q%d" % k, lw)],
                            outputs=[("Q%d" % k, lw.concat(ListOf(p))), ("next%d" % k, n + 1)],
                            priority=P_HIGH)
    return page


def build_periodic_consumer(spec: ConsumerSpec, priorities: Sequence[str],
                            colours: Optional[Colours] = None) -> Page:
    """Folded periodic consumers of one output port.

    ``ready`` holds one unit token per logical consumer; each consumption
    uses one and returns it ``period`` later, so at most ``capacity``
    packets are consumed in any window of one period. Consuming a packet
    bumps its priority's counter in ``C1`` and re-marks ``Pbp``.
    Ports: ``in`` (Ptr2 / Ptr2') and ``Pbp``.
    """
    colours = colours or default_colours()
    page = Page("consumer")
    page.add_place("in", colours.packet, port=True)
    page.add_place("Pbp", colours.unit, port=True)
    page.add_place("ready", colours.unit, initial=[TimedToken(UNIT, spec.start_offset)] * spec.capacity)
    page.add_place("C1", colours.counter, timed=False, initial=[(pr, 0) for pr in priorities])
    p, c = Var("p"), Var("c")
    page.add_transition(
        "consume",
        inputs=[("in", p), ("ready", _UNIT), ("C1", Tup(p[PRIO], c))],
        outputs=[("C1", Tup(p[PRIO], c + 1)), ("ready", _UNIT.at(spec.period)), ("Pbp", _UNIT)],
    )
    return page
