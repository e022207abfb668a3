"""Colour sets of the switch model.

A packet is the product ``INP * OUTP * PRIO * SEQ``. The trailing sequence
number is bookkeeping for metrics: no guard or routing condition reads it.

Between the shared FIFO and the priority queues a packet travels as
``(tag, packet)``, where the tag counts packets of the same (port, priority)
flow in FIFO exit order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..kernel import Expr, IntSet, ListSet, ProductSet, SymbolSet, UnitSet
from .scenario import DEFAULT_PORTS, DEFAULT_PRIORITIES

INP, OUTP, PRIO, SEQ = 0, 1, 2, 3


@dataclass(frozen=True)
class Colours:
    inp: SymbolSet
    outp: SymbolSet
    prio: SymbolSet
    packet: ProductSet
    packets: ListSet
    unit: UnitSet
    count: IntSet
    counter: ProductSet
    tagged: ProductSet
    flow_count: ProductSet


def make_colours(inputs: Sequence[str], ports: Sequence[str], priorities: Sequence[str]) -> Colours:
    inp = SymbolSet("INP", inputs)
    outp = SymbolSet("OUTP", ports)
    prio = SymbolSet("PRIO", priorities)
    seq = IntSet("SEQ", lo=0)
    packet = ProductSet("PACKET", (inp, outp, prio, seq))
    count = IntSet("INT", lo=0)
    return Colours(
        inp=inp,
        outp=outp,
        prio=prio,
        packet=packet,
        packets=ListSet("PACKETS", packet),
        unit=UnitSet("E"),
        count=count,
        counter=ProductSet("PRIOxINT", (prio, count)),
        tagged=ProductSet("TAGxPACKET", (count, packet)),
        flow_count=ProductSet("OUTPxPRIOxINT", (outp, prio, count)),
    )


def default_colours() -> Colours:
    return make_colours(["I%d" % i for i in range(1, 7)], DEFAULT_PORTS, DEFAULT_PRIORITIES)


def outp(p: Expr) -> Expr:
    return p[OUTP]


def prio(p: Expr) -> Expr:
    return p[PRIO]
