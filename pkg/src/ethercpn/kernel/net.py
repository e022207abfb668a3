"""Places, transitions, hierarchical pages and flattening."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Tuple

from .colorsets import ColorSet
from .errors import ColorSetError, HierarchyError, NetError
from .expr import Expr, lift, matchable, pattern_vars
from .values import TimedToken

# Transition priority classes; lower fires first among same-instant candidates.
P_HIGH = 100
P_NORMAL = 1000
P_LOW = 10000


@dataclass(frozen=True)
class Place:
    id: str
    colorset: ColorSet
    timed: bool = True
    initial: Tuple[TimedToken, ...] = ()

    def __post_init__(self):
        toks = tuple(t if isinstance(t, TimedToken) else TimedToken(t, 0) for t in self.initial)
        for tok in toks:
            if not self.colorset.contains(tok.value):
                raise ColorSetError("initial token %s not in colour set %s of place %s"
                                    % (tok, self.colorset, self.id))
        object.__setattr__(self, "initial", toks)


class Arc(NamedTuple):
    place: str
    expr: Expr


@dataclass(frozen=True)
class Transition:
    id: str
    inputs: Tuple[Arc, ...] = ()
    outputs: Tuple[Arc, ...] = ()
    guard: Optional[Expr] = None
    delay: int = 0
    priority: int = P_NORMAL

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(Arc(p, lift(e)) for p, e in self.inputs))
        object.__setattr__(self, "outputs", tuple(Arc(p, lift(e)) for p, e in self.outputs))
        if self.delay < 0:
            raise NetError("negative firing delay on %s" % self.id)

    def check_variables(self) -> None:
        """Every guard/output variable must be bound by some input pattern,
        and the input arcs must admit a matching order."""
        bound: frozenset = frozenset()
        pending = list(self.inputs)
        while pending:
            for i, arc in enumerate(pending):
                if matchable(arc.expr, bound):
                    bound = bound | pattern_vars(arc.expr)
                    del pending[i]
                    break
            else:
                raise NetError("transition %s: input arcs %s cannot be matched (unbound variables)"
                               % (self.id, ", ".join(str(a.expr) for a in pending)))
        used = set()
        if self.guard is not None:
            used |= self.guard.vars()
        for arc in self.outputs:
            used |= arc.expr.vars()
        missing = used - bound
        if missing:
            raise NetError("transition %s uses unbound variable(s) %s"
                           % (self.id, ", ".join(sorted(missing))))


@dataclass
class Substitution:
    name: str
    page: "Page"
    port_map: Dict[str, str]


class Page:
    """One page of a hierarchical net.

    ``ports`` lists the place ids that a parent fuses with its socket places
    through a substitution transition.
    """

    def __init__(self, name: str):
        self.name = name
        self.places: Dict[str, Place] = {}
        self.transitions: Dict[str, Transition] = {}
        self.ports: List[str] = []
        self.substitutions: List[Substitution] = []

    def add_place(self, place_id: str, colorset: ColorSet, timed: bool = True,
                  initial: Iterable[Any] = (), port: bool = False) -> Place:
        if place_id in self.places:
            raise NetError("duplicate place %s on page %s" % (place_id, self.name))
        p = Place(place_id, colorset, timed, tuple(initial))
        self.places[place_id] = p
        if port:
            self.ports.append(place_id)
        return p

    def add_transition(self, transition_id: str, inputs=(), outputs=(), guard=None,
                       delay: int = 0, priority: int = P_NORMAL) -> Transition:
        if transition_id in self.transitions or any(s.name == transition_id for s in self.substitutions):
            raise NetError("duplicate transition %s on page %s" % (transition_id, self.name))
        for place_id, _ in list(inputs) + list(outputs):
            if place_id not in self.places:
                raise NetError("transition %s refers to unknown place %s on page %s"
                               % (transition_id, place_id, self.name))
        t = Transition(transition_id, tuple(inputs), tuple(outputs),
                       None if guard is None else lift(guard), delay, priority)
        self.transitions[transition_id] = t
        return t

    def substitute(self, name: str, page: "Page", port_map: Mapping[str, str]) -> Substitution:
        if name in self.transitions or any(s.name == name for s in self.substitutions):
            raise NetError("duplicate transition %s on page %s" % (name, self.name))
        sub = Substitution(name, page, dict(port_map))
        self.substitutions.append(sub)
        return sub


@dataclass
class Net:
    """A flat net: the result of :func:`flatten`."""

    places: Dict[str, Place] = field(default_factory=dict)
    transitions: Dict[str, Transition] = field(default_factory=dict)

    def validate(self) -> None:
        for t in self.transitions.values():
            for arc in t.inputs + t.outputs:
                if arc.place not in self.places:
                    raise NetError("transition %s refers to unknown place %s" % (t.id, arc.place))
            t.check_variables()


def _rename_expr_places(t: Transition, new_id: str, rename: Mapping[str, str]) -> Transition:
    return replace(
        t,
        id=new_id,
        inputs=tuple(Arc(rename[a.place], a.expr) for a in t.inputs),
        outputs=tuple(Arc(rename[a.place], a.expr) for a in t.outputs),
    )


def flatten(root: Page) -> Net:
    """Replace substitution transitions by their sub-pages.

    Port places are fused with the parent's socket places (the flat place
    keeps the socket's id and initial marking); every other node gets the
    page path as an id prefix, e.g. ``switch/fifo/enqueue``.
    """
    net = Net()

    def visit(page: Page, path: str, rename: Dict[str, str], stack: Tuple[int, ...]) -> None:
        if id(page) in stack:
            raise HierarchyError("page %s contains itself" % page.name)
        stack = stack + (id(page),)
        for p in page.places.values():
            if p.id in rename:
                socket = net.places[rename[p.id]]
                if socket.colorset != p.colorset or socket.timed != p.timed:
                    raise ColorSetError("port %s%s (%s%s) does not match socket %s (%s%s)" % (
                        path, p.id, p.colorset, " timed" if p.timed else "",
                        socket.id, socket.colorset, " timed" if socket.timed else ""))
                continue
            new_id = path + p.id
            if new_id in net.places:
                raise HierarchyError("place id clash: %s" % new_id)
            net.places[new_id] = replace(p, id=new_id)
            rename[p.id] = new_id
        for t in page.transitions.values():
            new_id = path + t.id
            if new_id in net.transitions:
                raise HierarchyError("transition id clash: %s" % new_id)
            net.transitions[new_id] = _rename_expr_places(t, new_id, rename)
        for sub in page.substitutions:
            ports = set(sub.page.ports)
            if set(sub.port_map) != ports:
                raise HierarchyError("substitution %s%s: port map %s does not cover ports %s"
                                     % (path, sub.name, sorted(sub.port_map), sorted(ports)))
            sockets = list(sub.port_map.values())
            if len(set(sockets)) != len(sockets):
                raise HierarchyError("substitution %s%s: port map is not a bijection" % (path, sub.name))
            sub_rename = {}
            for port, socket in sub.port_map.items():
                if socket not in rename:
                    raise HierarchyError("substitution %s%s: unknown socket place %s"
                                         % (path, sub.name, socket))
                sub_rename[port] = rename[socket]
            visit(sub.page, path + sub.name + "/", sub_rename, stack)

    visit(root, "", {}, ())
    net.validate()
    return net
