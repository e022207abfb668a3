"""Trace checks for the scheduler and queueing guarantees of a switch run.

Each check returns a list of human-readable violations; an empty list
means the property held over the whole trace.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

from .kernel import Net, Seq, initial_marking
from .switch.assemble import line_place, queue_place
from .switch.colours import OUTP, PRIO
from .switch.scenario import WRR, Scenario


@dataclass(frozen=True)
class Transmission:
    port: str
    packet: tuple
    start: int
    lands: int
    released: int  # when Pbp came back (consumption), -1 if never


def _scheduler_of(tid: str):
    head, _, local = tid.rpartition("/")
    if head.startswith("switch/scheduler_"):
        return head[len("switch/scheduler_"):], local
    return None, None


def transmissions(trace) -> Dict[str, List[Transmission]]:
    """Per port, every transmission start with its landing and release time."""
    starts: Dict[str, List[Tuple[tuple, int, int]]] = {}
    released: Dict[tuple, int] = {}
    for e in trace:
        port, local = _scheduler_of(e.transition)
        if port is not None and local[:2] in ("TS", "TH"):
            land = [tok.timestamp for pid, tok in e.produced if pid.startswith("Ptr2")]
            starts.setdefault(port, []).append((dict(e.binding)["p"], e.clock, land[0]))
        elif e.transition.startswith("consumers/") and e.transition.endswith("/consume"):
            released[dict(e.binding)["p"]] = e.clock
    return {port: [Transmission(port, p, s, land, released.get(p, -1)) for p, s, land in lst]
            for port, lst in starts.items()}


def _markings(net: Net, trace) -> Iterator[Tuple[object, Dict[str, Counter]]]:
    """Yield (event, marking just before it). The marking object is live."""
    marking = {pid: Counter(ms) for pid, ms in initial_marking(net).items()}
    for e in trace:
        yield e, marking
        for pid, tok in e.consumed:
            marking[pid][tok] -= 1
            if not marking[pid][tok]:
                del marking[pid][tok]
        for pid, tok in e.produced:
            marking[pid][tok] += 1


def _queue_values(marking, place: str) -> tuple:
    (tok,) = marking[place]
    return tok.value.items


def non_preemption(scenario: Scenario, trace) -> List[str]:
    """Service intervals on a line never overlap and always run the full
    transmit delay."""
    tx = scenario.switch.stage_delays.transmit
    bad = []
    for port, lst in transmissions(trace).items():
        for a, b in zip(lst, lst[1:]):
            if a.released < 0 or b.start < a.released:
                bad.append("%s: %r starts at %d while %r holds the line" % (port, b.packet, b.start, a.packet))
        for t in lst:
            if t.lands != t.start + tx:
                bad.append("%s: %r truncated (%d -> %d)" % (port, t.packet, t.start, t.lands))
            if t.released >= 0 and t.released < t.lands:
                bad.append("%s: %r released before landing" % (port, t.packet))
    return bad


def work_conservation(scenario: Scenario, net: Net, trace, complete: bool = False) -> List[str]:
    """At the end of every instant, a free line implies empty queues.

    The final instant is skipped unless ``complete`` says the run was not
    cut short in the middle of it.
    """
    ports = scenario.switch.output_ports
    n = len(scenario.switch.priorities)
    bad = []
    pending = None
    marking = None
    for e, marking in _markings(net, trace):
        if pending is not None and e.clock != pending:
            bad += _idle_check(marking, ports, n, pending)
        pending = e.clock
    if complete and pending is not None:
        # the generator has applied the final event by now
        bad += _idle_check(marking, ports, n, pending)
    return bad


def _idle_check(marking, ports, n, clock) -> List[str]:
    bad = []
    for i, port in enumerate(ports):
        free = any(tok.timestamp <= clock for tok in marking[line_place(i)].elements())
        if not free:
            continue
        waiting = [k for k in range(1, n + 1) if _queue_values(marking, "switch/" + queue_place(k, port))]
        if waiting:
            bad.append("%s idle at %d with queues %s non-empty" % (port, clock, waiting))
    return bad


def priority_correctness(scenario: Scenario, net: Net, trace) -> List[str]:
    """At every static-priority service start no higher queue holds a packet."""
    prios = scenario.switch.priorities
    bad = []
    for e, marking in _markings(net, trace):
        port, local = _scheduler_of(e.transition)
        if port is None or not local.startswith("TS"):
            continue
        k = int(local[2:])
        for h in range(1, k):
            if _queue_values(marking, "switch/" + queue_place(h, port)):
                bad.append("%s at %d served %s while %s waited" % (port, e.clock, prios[k - 1], prios[h - 1]))
    return bad


def wrr_quantum_bound(scenario: Scenario, trace) -> List[str]:
    """Within one server visit to queue i, at most w_i transmissions."""
    if not isinstance(scenario.scheduler, WRR):
        return []
    w = scenario.scheduler.weights
    pos: Dict[str, int] = {}
    served: Dict[str, int] = {}
    bad = []
    for e in trace:
        port, local = _scheduler_of(e.transition)
        if port is None:
            continue
        pos.setdefault(port, 1)
        served.setdefault(port, 0)
        if local.startswith("TH"):
            k = int(local[2:])
            if k != pos[port]:
                bad.append("%s: TH%d fired while visiting %d" % (port, k, pos[port]))
            served[port] += 1
            if served[port] > w[k - 1]:
                bad.append("%s: visit to %d exceeded quantum %d at %d" % (port, k, w[k - 1], e.clock))
        elif local.startswith("LV"):
            i, j = (int(x) for x in local[2:].split("_"))
            if i != pos[port]:
                bad.append("%s: %s fired while visiting %d" % (port, local, pos[port]))
            pos[port], served[port] = j, 0
    return bad


def per_flow_fifo(trace) -> List[str]:
    """Per (port, priority): packets leave the shared FIFO, get transmitted
    and get consumed in one and the same order, and that order never puts a
    younger packet before an older one."""
    created: Dict[tuple, int] = {}
    leave: Dict[tuple, List[tuple]] = {}
    sent: Dict[tuple, List[tuple]] = {}
    used: Dict[tuple, List[tuple]] = {}
    for e in trace:
        tid = e.transition
        if tid.endswith("/emit"):
            for _, tok in e.produced:
                if isinstance(tok.value, tuple) and len(tok.value) == 4:
                    created[tok.value] = e.clock
        elif tid == "switch/fifo/dequeue":
            p = dict(e.binding)["p"]
            leave.setdefault((p[OUTP], p[PRIO]), []).append(p)
        elif _scheduler_of(tid)[1] and _scheduler_of(tid)[1][:2] in ("TS", "TH"):
            p = dict(e.binding)["p"]
            sent.setdefault((p[OUTP], p[PRIO]), []).append(p)
        elif tid.startswith("consumers/") and tid.endswith("/consume"):
            p = dict(e.binding)["p"]
            used.setdefault((p[OUTP], p[PRIO]), []).append(p)
    bad = []
    for flow, order in leave.items():
        for name, seen in (("transmitted", sent.get(flow, [])), ("consumed", used.get(flow, []))):
            if seen != order[:len(seen)]:
                bad.append("%s/%s %s out of FIFO order" % (flow + (name,)))
        times = [created[p] for p in order]
        if times != sorted(times):
            bad.append("%s/%s left the FIFO out of creation order" % flow)
    return bad


def _packets_in(value) -> List[tuple]:
    if isinstance(value, Seq):
        return [x for v in value.items for x in _packets_in(v)]
    if isinstance(value, tuple):
        if len(value) == 4 and isinstance(value[0], str):
            return [value]
        if len(value) == 2 and isinstance(value[1], tuple):
            return _packets_in(value[1])
    return []


def packet_partition(net: Net, trace) -> List[str]:
    """At the end of every instant each emitted packet sits in exactly one
    place, or has been consumed, and never both."""
    emitted = set()
    consumed = set()
    bad = []
    pending = None
    marking = None

    def check(m, clock):
        seen = Counter()
        for pid, ms in m.items():
            for tok, k in ms.items():
                for pkt in _packets_in(tok.value):
                    seen[pkt] += k
        for pkt in emitted:
            where = seen[pkt] + (pkt in consumed)
            if where != 1:
                bad.append("packet %r accounted %d times at %d" % (pkt, where, clock))
        for pkt in seen:
            if pkt not in emitted:
                bad.append("packet %r appeared from nowhere at %d" % (pkt, clock))

    for e, marking in _markings(net, trace):
        if pending is not None and e.clock != pending:
            check(marking, pending)
        pending = e.clock
        if e.transition.endswith("/emit"):
            for _, tok in e.produced:
                emitted.update(_packets_in(tok.value))
        elif e.transition.endswith("/consume"):
            consumed.add(dict(e.binding)["p"])
    if pending is not None:
        check(marking, pending)
    return bad


def counter_consistency(net: Net, trace) -> List[str]:
    """Every consumer's C1 counters match its consumption firings so far."""
    counts: Dict[Tuple[str, str], int] = Counter()
    bad = []
    marking = None
    for e, marking in _markings(net, trace):
        if e.transition.startswith("consumers/") and e.transition.endswith("/consume"):
            page = e.transition[:-len("/consume")]
            counts[(page, dict(e.binding)["p"][PRIO])] += 1
            # e is applied on the next iteration; check what it produces now
            for pid, tok in e.produced:
                if pid == page + "/C1":
                    pr, c = tok.value
                    if c != counts[(page, pr)]:
                        bad.append("%s counter %s=%d after %d consumptions"
                                   % (page, pr, c, counts[(page, pr)]))
    for pid, ms in (marking or {}).items():
        if pid.endswith("/C1"):
            page = pid[:-len("/C1")]
            for tok in ms:
                pr, c = tok.value
                if c != counts[(page, pr)]:
                    bad.append("%s final counter %s=%d, expected %d" % (page, pr, c, counts[(page, pr)]))
    return bad


def all_violations(scenario: Scenario, net: Net, trace) -> Dict[str, List[str]]:
    out = {
        "non_preemption": non_preemption(scenario, trace),
        "per_flow_fifo": per_flow_fifo(trace),
        "wrr_quantum_bound": wrr_quantum_bound(scenario, trace),
        "packet_partition": packet_partition(net, trace),
        "counter_consistency": counter_consistency(net, trace),
    }
    if not isinstance(scenario.scheduler, WRR):
        out["work_conservation"] = work_conservation(scenario, net, trace)
        out["priority_correctness"] = priority_correctness(scenario, net, trace)
    return out
