"""Trace export and independent replay validation.

Trace text format: one firing per line, tab-separated fields::

    step  clock  transition_id  binding  consumed  produced

``binding`` is ``name=value;name=value`` (sorted by name); ``consumed`` and
``produced`` are ``place:value@timestamp;...``. Values use the notation of
:func:`ethercpn.kernel.values.format_value`. The first line is a header
starting with ``#``.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, List, Sequence

from .engine import Event, Marking, evaluate_arc, initial_marking
from .expr import match
from .net import Net
from .values import format_value

HEADER = "#step\tclock\ttransition\tbinding\tconsumed\tproduced"


class ReplayError(AssertionError):
    pass


def _tokens(items) -> str:
    return ";".join("%s:%s@%d" % (pid, format_value(t.value), t.timestamp) for pid, t in items)


def format_event(e: Event) -> str:
    binding = ";".join("%s=%s" % (k, format_value(v)) for k, v in e.binding)
    return "\t".join((str(e.step), str(e.clock), e.transition, binding,
                      _tokens(e.consumed), _tokens(e.produced)))


def format_trace(events: Iterable[Event]) -> str:
    lines = [HEADER]
    lines.extend(format_event(e) for e in events)
    return "\n".join(lines) + "\n"


def replay(net: Net, trace: Sequence[Event], marking: Marking = None) -> Marking:
    """Re-execute a trace from the initial marking, checking every firing.

    Independent of the engine's enabling code: each consumed token is
    re-matched against its arc pattern, produced tokens are recomputed from
    the recorded binding, and per place ``after - before = produced -
    consumed`` is asserted. Returns the final marking.
    """
    m = {pid: Counter(c) for pid, c in (marking or initial_marking(net)).items()}
    clock = 0
    for i, e in enumerate(trace):
        if e.step != i + 1:
            raise ReplayError("step %d out of sequence at position %d" % (e.step, i))
        if e.clock < clock:
            raise ReplayError("clock went backwards at step %d (%d -> %d)" % (e.step, clock, e.clock))
        clock = e.clock
        t = net.transitions.get(e.transition)
        if t is None:
            raise ReplayError("unknown transition %s at step %d" % (e.transition, e.step))
        env = dict(e.binding)

        # each input arc consumes exactly one recorded token that matches it
        remaining = list(e.consumed)
        for arc in t.inputs:
            for j, (pid, tok) in enumerate(remaining):
                if pid == arc.place and match(arc.expr, tok.value, env) == env:
                    del remaining[j]
                    break
            else:
                raise ReplayError("step %d: no consumed token matches arc %s on %s"
                                  % (e.step, arc.expr, arc.place))
        if remaining:
            raise ReplayError("step %d: extra consumed tokens %s" % (e.step, remaining))
        if t.guard is not None and t.guard.eval(env) is not True:
            raise ReplayError("step %d: guard of %s false" % (e.step, t.id))

        expected = Counter()
        for arc in t.outputs:
            for tok, n in evaluate_arc(arc.expr, env, e.clock + t.delay).items():
                expected[(arc.place, tok)] += n
        if expected != Counter(e.produced):
            raise ReplayError("step %d: produced tokens differ from arc evaluation" % e.step)

        before = {pid: sum(m[pid].values()) for pid in m}
        consumed_n = Counter(pid for pid, _ in e.consumed)
        produced_n = Counter(pid for pid, _ in e.produced)
        for pid, tok in e.consumed:
            if m[pid][tok] <= 0:
                raise ReplayError("step %d: consumed token %s absent from %s" % (e.step, tok, pid))
            if net.places[pid].timed and tok.timestamp > e.clock:
                raise ReplayError("step %d: consumed token %s not yet available" % (e.step, tok))
            m[pid][tok] -= 1
            if m[pid][tok] == 0:
                del m[pid][tok]
        for pid, tok in e.produced:
            if tok.timestamp < e.clock:
                raise ReplayError("step %d: produced token %s stamped before clock" % (e.step, tok))
            m[pid][tok] += 1
        for pid in m:
            after = sum(m[pid].values())
            if after - before[pid] != produced_n[pid] - consumed_n[pid]:
                raise ReplayError("step %d: token count of %s not conserved" % (e.step, pid))
    return m


def markings_equal(a: Marking, b: Marking) -> bool:
    keys = set(a) | set(b)
    return all(+Counter(a.get(k, ())) == +Counter(b.get(k, ())) for k in keys)


def fired_transitions(trace: Iterable[Event]) -> List[str]:
    return [e.transition for e in trace]
