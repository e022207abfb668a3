"""Output-port scheduler pages and a direct event-loop reference.

Both pages share one port interface:

``Q1 .. Qn``  untimed list places, one FIFO per priority, highest first
``Pbp``       timed unit place, marked while the output line is free
``out``       timed packet place receiving transmitted packets

A scheduler takes the ``Pbp`` token when it starts a transmission and never
returns it; whoever drains ``out`` (the periodic consumer, or a test sink)
re-marks ``Pbp``. The transmitted packet lands in ``out`` after
``transmit_delay``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .kernel import (
    NIL,
    UNIT,
    Cons,
    Const,
    ListOf,
    P_HIGH,
    Page,
    ProductSet,
    TimedToken,
    Tup,
    Var,
)
from .switch.colours import PRIO, Colours, default_colours
from .switch.scenario import WRR, SchedulerChoice, StaticPriority

__all__ = [
    "StaticPriority",
    "WRR",
    "SchedulerChoice",
    "Service",
    "build_static_priority_page",
    "build_wrr_page",
    "build_scheduler_page",
    "oracle_schedule",
    "build_scheduler_harness",
    "harness_services",
]

_NIL = Const(NIL)
_UNIT = Const(UNIT)


def _queue_ports(page: Page, n: int, colours: Colours) -> List[str]:
    names = ["Q%d" % (k + 1) for k in range(n)]
    for name in names:
        page.add_place(name, colours.packets, timed=False, port=True)
    page.add_place("Pbp", colours.unit, port=True)
    page.add_place("out", colours.packet, port=True)
    return names


def build_static_priority_page(queues: Sequence[str], transmit_delay: int,
                               colours: Optional[Colours] = None) -> Page:
    """Non-preemptive static priority.

    ``TSk`` serves the head of queue k; higher queues are matched against
    the empty list, so it is enabled only while every higher queue is empty.
    Once ``Pbp`` is taken nothing can interrupt the transmission.
    """
    colours = colours or default_colours()
    page = Page("static_priority")
    q = _queue_ports(page, len(queues), colours)
    p, rest = Var("p"), Var("rest")
    for k in range(len(queues)):
        higher = q[:k]
        page.add_transition(
            "TS%d" % (k + 1),
            inputs=[("Pbp", _UNIT), (q[k], Cons(p, rest))] + [(h, _NIL) for h in higher],
            outputs=[(q[k], rest), ("out", p.at(transmit_delay))] + [(h, _NIL) for h in higher],
        )
    return page


def build_wrr_page(queues: Sequence[str], weights: Sequence[int], transmit_delay: int,
                   colours: Optional[Colours] = None) -> Page:
    """Weighted round robin over the queues in cyclic order.

    ``Ek`` (unit) marks the queue the server is visiting; ``Wk`` holds the
    remaining quantum of queue k. ``THk`` transmits one packet and
    decrements ``Wk``. ``LVi_j`` moves the server from i to j, the first
    non-empty queue after i (possibly i itself), when queue i is empty or
    its quantum is spent: it zeroes ``Wi`` and loads ``Wj`` with w_j. When
    every queue is empty no ``LV`` is enabled and the server stays parked.
    """
    colours = colours or default_colours()
    n = len(queues)
    if len(weights) != n:
        raise ValueError("need one weight per queue")
    if any(w < 1 for w in weights):
        raise ValueError("weights must be >= 1")
    page = Page("wrr")
    q = _queue_ports(page, n, colours)
    for k in range(n):
        page.add_place("E%d" % (k + 1), colours.unit, timed=False,
                       initial=[UNIT] if k == 0 else [])
        page.add_place("W%d" % (k + 1), colours.count, timed=False,
                       initial=[weights[0] if k == 0 else 0])

    p, rest, n_ = Var("p"), Var("rest"), Var("n")
    for k in range(n):
        e, w = "E%d" % (k + 1), "W%d" % (k + 1)
        page.add_transition(
            "TH%d" % (k + 1),
            inputs=[(e, _UNIT), (w, n_), (q[k], Cons(p, rest)), ("Pbp", _UNIT)],
            outputs=[(e, _UNIT), (w, n_ - 1), (q[k], rest), ("out", p.at(transmit_delay))],
            guard=n_.gt(0),
        )

    for i in range(n):
        for step in range(1, n + 1):
            j = (i + step) % n
            between = [(i + s) % n for s in range(1, step)]
            ei, wi, ej, wj = "E%d" % (i + 1), "W%d" % (i + 1), "E%d" % (j + 1), "W%d" % (j + 1)
            li, lj = Var("L%d" % (i + 1)), Var("L%d" % (j + 1))
            inputs = [(ei, _UNIT), (wi, n_)] + [(q[b], _NIL) for b in between]
            outputs = [(ej, _UNIT)] + [(q[b], _NIL) for b in between]
            if j == i:
                # quantum spent, every other queue empty: start a fresh visit
                inputs.append((q[i], li))
                outputs += [(q[i], li), (wi, Const(weights[i]))]
                guard = n_.eq(0) & li.ne(NIL)
            else:
                inputs += [(wj, Var("m")), (q[i], li), (q[j], lj)]
                outputs += [(wi, Const(0)), (wj, Const(weights[j])), (q[i], li), (q[j], lj)]
                guard = (n_.eq(0) | li.eq(NIL)) & lj.ne(NIL)
            page.add_transition("LV%d_%d" % (i + 1, j + 1), inputs=inputs, outputs=outputs,
                                guard=guard)
    return page


def build_scheduler_page(choice: SchedulerChoice, queues: Sequence[str], transmit_delay: int,
                         colours: Optional[Colours] = None) -> Page:
    if isinstance(choice, WRR):
        return build_wrr_page(queues, choice.weights, transmit_delay, colours)
    if isinstance(choice, StaticPriority):
        return build_static_priority_page(queues, transmit_delay, colours)
    raise TypeError("unknown scheduler %r" % (choice,))


# -- reference event loop -----------------------------------------------------


@dataclass(frozen=True)
class Service:
    packet: Any
    start: int
    finish: int


def oracle_schedule(arrivals: Sequence[Tuple[Any, int]], policy: SchedulerChoice,
                    transmit_delay: int, priorities: Sequence[str] = ("H", "M", "L"),
                    prio_of=lambda pkt: pkt[PRIO]) -> List[Service]:
    """Schedule one output line directly, without a net.

    ``arrivals`` are (packet, time) pairs sorted by time; packets arriving at
    the same instant join their queues in list order. At each instant the
    arrivals are queued first, then a line whose transmission has finished
    is freed, then the policy decides. The line is released at ``finish``.
    """
    rank = {p: i for i, p in enumerate(priorities)}
    n = len(priorities)
    queues: List[List[Any]] = [[] for _ in range(n)]
    pending = list(arrivals)
    if any(pending[i][1] > pending[i + 1][1] for i in range(len(pending) - 1)):
        raise ValueError("arrivals must be sorted by time")
    out: List[Service] = []
    busy_until: Optional[int] = None
    # WRR server state
    pos = 0
    quantum = policy.weights[0] if isinstance(policy, WRR) else 0
    idx = 0
    now = pending[0][1] if pending else 0
    while idx < len(pending) or any(queues) or busy_until is not None:
        while idx < len(pending) and pending[idx][1] == now:
            pkt = pending[idx][0]
            queues[rank[prio_of(pkt)]].append(pkt)
            idx += 1
        if busy_until is not None and busy_until <= now:
            busy_until = None

        if isinstance(policy, StaticPriority):
            if busy_until is None:
                for qu in queues:
                    if qu:
                        out.append(Service(qu.pop(0), now, now + transmit_delay))
                        busy_until = now + transmit_delay
                        break
        else:
            w = policy.weights
            while True:
                if (quantum == 0 or not queues[pos]) and any(queues):
                    # leave: first non-empty queue after pos, wrapping to pos itself
                    for s in range(1, n + 1):
                        j = (pos + s) % n
                        if queues[j]:
                            break
                    pos, quantum = j, w[j]
                    continue
                if busy_until is None and queues[pos] and quantum > 0:
                    out.append(Service(queues[pos].pop(0), now, now + transmit_delay))
                    busy_until = now + transmit_delay
                    quantum -= 1
                    continue
                break

        nxt = []
        if idx < len(pending):
            nxt.append(pending[idx][1])
        if busy_until is not None:
            nxt.append(busy_until)
        if not nxt:
            break
        now = min(nxt)
    return out


# -- test harness: a scheduler page fed from a timed arrival list -------------


def build_scheduler_harness(policy: SchedulerChoice, arrivals_per_port: Dict[str, Sequence[Tuple[Any, int]]],
                            transmit_delay: int, colours: Optional[Colours] = None) -> Page:
    """Root page driving one scheduler page per port from fixed arrivals.

    Each arrival is a timed token in ``arrivals``; a feeder transition
    appends it to its priority queue, strictly in the given order (a ticket
    counter enforces it for same-instant arrivals). A sink drains ``out``
    the moment a packet lands and re-marks ``Pbp``.
    """
    colours = colours or default_colours()
    prios = colours.prio.symbols
    root = Page("harness")
    p, lw, k = Var("p"), Var("Lw"), Var("k")
    for port, arrivals in arrivals_per_port.items():
        toks = [(i, pkt, t) for i, (pkt, t) in enumerate(arrivals)]
        root.add_place("arrivals_" + port, _ticketed(colours),
                       initial=[TimedToken((i, pkt), t) for i, pkt, t in toks])
        root.add_place("ticket_" + port, colours.count, timed=False, initial=[0])
        qnames = []
        for r, pr in enumerate(prios):
            qn = "Q%d_%s" % (r + 1, port)
            root.add_place(qn, colours.packets, timed=False, initial=[NIL])
            qnames.append(qn)
            root.add_transition(
                "feed%d_%s" % (r + 1, port),
                inputs=[("arrivals_" + port, Tup(k, p)), ("ticket_" + port, k), (qn, lw)],
                outputs=[("ticket_" + port, k + 1), (qn, lw.concat(ListOf(p)))],
                guard=p[PRIO].eq(pr),
                priority=P_HIGH,
            )
        root.add_place("Pbp_" + port, colours.unit, initial=[UNIT])
        root.add_place("out_" + port, colours.packet)
        root.add_transition("sink_" + port, inputs=[("out_" + port, p)],
                            outputs=[("Pbp_" + port, _UNIT)])
        page = build_scheduler_page(policy, prios, transmit_delay, colours)
        mapping = {"Q%d" % (r + 1): qnames[r] for r in range(len(prios))}
        mapping.update({"Pbp": "Pbp_" + port, "out": "out_" + port})
        root.substitute("scheduler_" + port, page, mapping)
    return root


def harness_services(trace, ports: Sequence[str]) -> Dict[str, List[Service]]:
    """Recover (packet, start, finish) per port from a harness run."""
    starts: Dict[str, List[Tuple[Any, int]]] = {port: [] for port in ports}
    finish: Dict[Any, int] = {}
    for e in trace:
        head, _, local = e.transition.rpartition("/")
        if head.startswith("scheduler_") and local.startswith(("TS", "TH")):
            starts[head[len("scheduler_"):]].append((dict(e.binding)["p"], e.clock))
        elif e.transition.startswith("sink_"):
            finish[dict(e.binding)["p"]] = e.clock
    return {port: [Service(pkt, s, finish.get(pkt, -1)) for pkt, s in lst]
            for port, lst in starts.items()}


def _ticketed(colours: Colours) -> ProductSet:
    return ProductSet("TICKETxPACKET", (colours.count, colours.packet))
