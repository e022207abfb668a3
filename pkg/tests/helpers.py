"""Independent oracles shared by the unit tests and the acceptance suite."""

import itertools
import random

from ethercpn.kernel import (
    ColorSet,
    Const,
    IntSet,
    Page,
    ProductSet,
    SymbolSet,
    TimedToken,
    Tup,
    Var,
    Wild,
    flatten,
    run,
)
from ethercpn.schedulers import build_scheduler_harness, harness_services, oracle_schedule
from ethercpn.switch import default_colours

INT = IntSet("INT", 0)

# -- brute-force binding enumeration --------------------------------------------
# try every injective assignment of token instances to arcs, then check each
# arc with a separate tiny matcher


def _bf_match(pat, value, env):
    if isinstance(pat, Var):
        if pat.name in env:
            return env if env[pat.name] == value and type(env[pat.name]) is type(value) else None
        return {**env, pat.name: value}
    if isinstance(pat, Wild):
        return env
    if isinstance(pat, Const):
        return env if pat.value == value and type(pat.value) is type(value) else None
    if isinstance(pat, Tup):
        if not isinstance(value, tuple) or len(value) != len(pat.items):
            return None
        for sub, v in zip(pat.items, value):
            env = _bf_match(sub, v, env)
            if env is None:
                return None
        return env
    raise TypeError(pat)


def brute_force(net, transition, clock):
    instances = []
    for pid, place in net.places.items():
        for tok in place.initial:
            if not place.timed or tok.timestamp <= clock:
                instances.append((pid, tok))
    found = set()
    arcs = transition.inputs
    for choice in itertools.permutations(range(len(instances)), len(arcs)):
        if any(instances[i][0] != arc.place for i, arc in zip(choice, arcs)):
            continue
        # patterns may need later arcs' variables; retry in every arc order
        for order in itertools.permutations(range(len(arcs))):
            env = {}
            for k in order:
                env = _bf_match(arcs[k].expr, instances[choice[k]][1].value, env)
                if env is None:
                    break
            if env is not None:
                break
        if env is None:
            continue
        if transition.guard is not None and transition.guard.eval(env) is not True:
            continue
        consumed = tuple(sorted((instances[i][0], instances[i][1].sort_key()) for i in choice))
        found.add((tuple(sorted(env.items())), consumed))
    return found


def engine_keys(bindings):
    return {(tuple(sorted(b.env)), tuple(sorted((p, tok.sort_key()) for p, tok in b.consumed)))
            for b in bindings}


class Mixed(ColorSet):
    """Ints or (symbol, int) pairs."""

    name = "MIXED"
    _pairs = ProductSet("PAIR", (SymbolSet("X", ["I1", "O1"]), INT))

    def _ident(self):
        return ("MIXED",)

    def contains(self, v):
        return (type(v) is int and v >= 0) or self._pairs.contains(v)


MIXED = Mixed()
VALUE_POOL = [0, 1, 2, ("I1", 0), ("I1", 1), ("O1", 0)]
PATTERNS = [Var("x"), Var("y"), Var("z"), Const(1), Tup(Var("a"), Var("x")),
            Tup(Const("I1"), Var("y")), Wild()]


def small_net(n_places, tokens, timed, inputs, guard):
    """tokens: (place index, value, timestamp); inputs: (place index, pattern)."""
    page = Page("bf")
    for k in range(n_places):
        page.add_place("P%d" % k, MIXED, timed=timed[k],
                       initial=[TimedToken(v, ts) for i, v, ts in tokens if i == k])
    page.add_transition("T", inputs=[("P%d" % i, pat) for i, pat in inputs], guard=guard)
    return flatten(page)


def random_small_net(rng: random.Random):
    n_places = rng.randint(1, 3)
    tokens = [(rng.randrange(n_places), rng.choice(VALUE_POOL), rng.randint(0, 2))
              for _ in range(rng.randint(0, 4))]
    timed = [rng.random() < 0.5 for _ in range(n_places)]
    inputs = [(rng.randrange(n_places), rng.choice(PATTERNS)) for _ in range(rng.randint(1, 3))]
    bound = set()
    for _, pat in inputs:
        bound |= pat.vars()
    guard = None
    names = [v for v in ("x", "y", "z") if v in bound]
    if names and rng.random() < 0.5:
        guard = Var(rng.choice(names)).ne(rng.choice([0, 1, ("I1", 0)]))
    return small_net(n_places, tokens, timed, inputs, guard), rng.randint(0, 2)


# -- scheduler oracle equivalence -------------------------------------------------


def random_pattern(rng: random.Random):
    """At most 30 packets over one or two ports, three priorities."""
    ports = ["O1", "O2"][: rng.randint(1, 2)]
    n = rng.randint(1, 30)
    horizon = rng.choice([5, 20, 60])
    arrivals = {port: [] for port in ports}
    for i in range(n):
        port = rng.choice(ports)
        arrivals[port].append((("I1", port, rng.choice("HML"), i), rng.randint(0, horizon)))
    return {p: sorted(a, key=lambda x: x[1]) for p, a in arrivals.items()}, rng.randint(1, 6)


def equivalence_mismatches(policy, count=200, seed=2024):
    colours = default_colours()
    rng = random.Random(seed)
    bad = []
    for case in range(count):
        arrivals, tx = random_pattern(rng)
        net = flatten(build_scheduler_harness(policy, arrivals, tx, colours))
        r = run(net, seed=rng.randrange(2 ** 31))
        got = harness_services(r.trace, list(arrivals))
        for port, arr in arrivals.items():
            if got[port] != oracle_schedule(arr, policy, tx):
                bad.append((case, port))
    return bad
