"""Timed interleaving simulator.

Semantics
---------
* A token is available when its timestamp is <= the clock; tokens in
  untimed places are always available.
* One transition fires per step. Among all enabled binding elements at the
  current clock, only those of the most urgent priority class (lowest
  ``Transition.priority``) are candidates; one candidate is drawn uniformly
  with ``random.Random(seed).randrange``. Candidates are listed in net
  order, then in binding-enumeration order, which is canonical for a given
  marking, so a seed fully determines a run.
* With nothing enabled, the clock jumps to the earliest future time at
  which some binding becomes enabled; with no such time the marking is dead.
* Produced tokens are stamped ``clock + transition delay + arc delay``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .errors import ColorSetError, FiringError, NetError
from .expr import Expr, lift, match, matchable, produce
from .net import Net, Transition
from .values import TimedToken

Marking = Dict[str, Counter]


@dataclass(frozen=True)
class Binding:
    """A binding element: variable assignment plus the tokens it consumes."""

    env: Tuple[Tuple[str, Any], ...]
    consumed: Tuple[Tuple[str, TimedToken], ...]

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.env)

    def __getitem__(self, name: str) -> Any:
        for k, v in self.env:
            if k == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class Event:
    step: int
    clock: int
    transition: str
    binding: Tuple[Tuple[str, Any], ...]
    consumed: Tuple[Tuple[str, TimedToken], ...]
    produced: Tuple[Tuple[str, TimedToken], ...]


@dataclass(frozen=True)
class Fired:
    event: Event


@dataclass(frozen=True)
class ClockAdvanced:
    to: int


@dataclass(frozen=True)
class Dead:
    pass


StepResult = Union[Fired, ClockAdvanced, Dead]


@dataclass
class RunResult:
    trace: List[Event]
    marking: Marking
    clock: int
    stop_reason: str  # "dead" | "max_steps" | "max_time"


def initial_marking(net: Net) -> Marking:
    return {pid: Counter(p.initial) for pid, p in net.places.items()}


def _token_order(tokens: Iterable[TimedToken]) -> List[TimedToken]:
    return sorted(tokens, key=TimedToken.sort_key)


def evaluate_arc(expr: Expr, binding: Mapping[str, Any], clock: int) -> Counter:
    """Tokens produced by an output-arc expression under a complete binding."""
    out: Counter = Counter()
    for value, delay in produce(lift(expr), dict(binding)):
        out[TimedToken(value, clock + delay)] += 1
    return out


def enabled_bindings(net: Net, marking: Marking, transition: Transition, clock: int,
                     _order_cache: Optional[Dict[str, List[TimedToken]]] = None) -> List[Binding]:
    """All binding elements of ``transition`` enabled in ``marking`` at ``clock``."""
    places = net.places

    def available(pid: str) -> List[TimedToken]:
        if _order_cache is not None and pid in _order_cache:
            ordered = _order_cache[pid]
        else:
            ordered = _token_order(marking[pid])
            if _order_cache is not None:
                _order_cache[pid] = ordered
        if not places[pid].timed:
            return ordered
        return [t for t in ordered if t.timestamp <= clock]

    guard = transition.guard
    guard_vars = guard.vars() if guard is not None else frozenset()
    results: List[Binding] = []
    seen = set()

    def check_guard(env) -> bool:
        v = guard.eval(env)
        if type(v) is not bool:
            raise NetError("guard of %s is not boolean: %r" % (transition.id, v))
        return v

    def rec(remaining, env, consumed, guard_done):
        if guard is not None and not guard_done and guard_vars <= env.keys():
            if not check_guard(env):
                return
            guard_done = True
        if not remaining:
            if guard is not None and not guard_done and not check_guard(env):
                return
            key = (tuple(sorted(env.items(), key=lambda kv: kv[0])),
                   tuple(sorted(consumed, key=lambda pt: (pt[0], pt[1].sort_key()))))
            if key not in seen:
                seen.add(key)
                results.append(Binding(key[0], key[1]))
            return
        bound = env.keys()
        for i, arc in enumerate(remaining):
            if matchable(arc.expr, frozenset(bound)):
                break
        else:
            raise NetError("transition %s: input arcs cannot be ordered for matching" % transition.id)
        rest = remaining[:i] + remaining[i + 1:]
        counts = marking[arc.place]
        for tok in available(arc.place):
            used = sum(1 for p, t in consumed if p == arc.place and t == tok)
            if used >= counts[tok]:
                continue
            env2 = match(arc.expr, tok.value, env)
            if env2 is None:
                continue
            rec(rest, env2, consumed + ((arc.place, tok),), guard_done)

    rec(transition.inputs, {}, (), False)
    return results


class Engine:
    """Mutable simulation state: marking, clock, rng, trace.

    The flat :class:`Net` is never modified and may be shared between
    engines.
    """

    def __init__(self, net: Net, seed: int = 0, marking: Optional[Marking] = None, clock: int = 0):
        net.validate()
        self.net = net
        self.seed = seed
        self.rng = random.Random(seed)
        self.marking: Marking = initial_marking(net) if marking is None else {
            pid: Counter(marking.get(pid, ())) for pid in net.places}
        self.clock = clock
        self.trace: List[Event] = []
        self._order: Dict[str, List[TimedToken]] = {}
        self._cache: Dict[str, List[Binding]] = {}
        self._consumers: Dict[str, List[str]] = {pid: [] for pid in net.places}
        self._timed_inputs: List[str] = []
        for t in net.transitions.values():
            for pid in {a.place for a in t.inputs}:
                self._consumers[pid].append(t.id)
            if any(net.places[a.place].timed for a in t.inputs):
                self._timed_inputs.append(t.id)

    @property
    def step_count(self) -> int:
        return len(self.trace)

    # -- enabling ----------------------------------------------------------

    def enabled_bindings(self, transition_id: str, clock: Optional[int] = None) -> List[Binding]:
        t = self.net.transitions[transition_id]
        if clock is None or clock == self.clock:
            cached = self._cache.get(transition_id)
            if cached is None:
                cached = enabled_bindings(self.net, self.marking, t, self.clock, self._order)
                self._cache[transition_id] = cached
            return cached
        return enabled_bindings(self.net, self.marking, t, clock, self._order)

    def candidates(self) -> List[Tuple[Transition, Binding]]:
        best = None
        out: List[Tuple[Transition, Binding]] = []
        for t in self.net.transitions.values():
            if best is not None and t.priority > best:
                continue
            bs = self.enabled_bindings(t.id)
            if not bs:
                continue
            if best is None or t.priority < best:
                best = t.priority
                out = []
            out.extend((t, b) for b in bs)
        return out

    def next_time(self) -> Optional[int]:
        """Earliest future clock value at which some binding becomes enabled."""
        times = set()
        for pid, counts in self.marking.items():
            if self.net.places[pid].timed and self._consumers[pid]:
                times.update(tok.timestamp for tok in counts if tok.timestamp > self.clock)
        for when in sorted(times):
            for tid in self._timed_inputs:
                if self.enabled_bindings(tid, when):
                    return when
        return None

    # -- state changes -----------------------------------------------------

    def _touch(self, pid: str) -> None:
        self._order.pop(pid, None)
        for tid in self._consumers[pid]:
            self._cache.pop(tid, None)

    def set_clock(self, when: int) -> None:
        if when < self.clock:
            raise ValueError("clock cannot move backwards (%d -> %d)" % (self.clock, when))
        if when != self.clock:
            self.clock = when
            for tid in self._timed_inputs:
                self._cache.pop(tid, None)

    def fire(self, transition_id: str, binding: Binding) -> Event:
        t = self.net.transitions[transition_id]
        if binding not in self.enabled_bindings(transition_id):
            raise FiringError("binding %s of %s is not enabled at clock %d"
                              % (dict(binding.env), transition_id, self.clock))
        env = dict(binding.env)
        produced = []
        for arc in t.outputs:
            place = self.net.places[arc.place]
            for value, delay in produce(arc.expr, env):
                if not place.colorset.contains(value):
                    raise ColorSetError("transition %s produced %r into %s (colour set %s)"
                                        % (t.id, value, place.id, place.colorset))
                produced.append((arc.place, TimedToken(value, self.clock + t.delay + delay)))
        for pid, tok in binding.consumed:
            counts = self.marking[pid]
            counts[tok] -= 1
            if counts[tok] == 0:
                del counts[tok]
            self._touch(pid)
        for pid, tok in produced:
            self.marking[pid][tok] += 1
            self._touch(pid)
        event = Event(len(self.trace) + 1, self.clock, t.id, binding.env,
                      binding.consumed, tuple(produced))
        self.trace.append(event)
        return event

    def step(self) -> StepResult:
        cands = self.candidates()
        if cands:
            t, b = cands[self.rng.randrange(len(cands))]
            return Fired(self.fire(t.id, b))
        when = self.next_time()
        if when is None:
            return Dead()
        self.set_clock(when)
        return ClockAdvanced(when)

    def run(self, max_steps: Optional[int] = None, max_time: Optional[int] = None) -> RunResult:
        while True:
            if max_steps is not None and self.step_count >= max_steps:
                reason = "max_steps"
                break
            cands = self.candidates()
            if cands:
                t, b = cands[self.rng.randrange(len(cands))]
                self.fire(t.id, b)
                continue
            when = self.next_time()
            if when is None:
                reason = "dead"
                break
            if max_time is not None and when > max_time:
                reason = "max_time"
                break
            self.set_clock(when)
        return RunResult(self.trace, self.marking, self.clock, reason)


def run(net: Net, max_steps: Optional[int] = None, max_time: Optional[int] = None,
        seed: int = 0) -> RunResult:
    return Engine(net, seed).run(max_steps, max_time)
