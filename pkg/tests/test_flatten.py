"""Flattening: five two-level nets, each compared trace-for-trace with a
hand-flattened twin."""

import pytest

from ethercpn.kernel import (
    NIL,
    UNIT,
    ColorSetError,
    Const,
    HierarchyError,
    IntSet,
    ListOf,
    ListSet,
    Net,
    Page,
    Place,
    Transition,
    UnitSet,
    Var,
    flatten,
    format_trace,
    run,
)
from ethercpn.kernel.expr import Cons

INT = IntSet("INT", 0)
INTS = ListSet("INTS", INT)
E = UnitSet("E")
x, n, rest, lw = Var("x"), Var("n"), Var("rest"), Var("Lw")


def flat(places, transitions):
    return Net({p.id: p for p in places}, {t.id: t for t in transitions})


def mover(delay=1):
    page = Page("mover")
    page.add_place("in", INT, port=True)
    page.add_place("out", INT, port=True)
    page.add_transition("move", inputs=[("in", x)], outputs=[("out", (x + 1).at(delay))], guard=x.lt(30))
    return page


def net1():
    root = Page("root")
    root.add_place("A", INT, initial=[0, 1, 2])
    root.add_place("B", INT)
    root.add_transition("back", inputs=[("B", x)], outputs=[("A", x)])
    root.substitute("m", mover(), {"in": "A", "out": "B"})
    manual = flat(
        [Place("A", INT, initial=(0, 1, 2)), Place("B", INT)],
        [Transition("back", (("B", x),), (("A", x),)),
         Transition("m/move", (("A", x),), (("B", (x + 1).at(1)),), x.lt(30))])
    return root, manual


def net2():
    shared = mover(2)
    root = Page("root")
    root.add_place("A", INT, initial=[0, 5])
    root.add_place("B", INT)
    root.add_place("C", INT)
    root.add_transition("loop", inputs=[("C", x)], outputs=[("A", x)])
    root.substitute("first", shared, {"in": "A", "out": "B"})
    root.substitute("second", shared, {"in": "B", "out": "C"})
    manual = flat(
        [Place("A", INT, initial=(0, 5)), Place("B", INT), Place("C", INT)],
        [Transition("loop", (("C", x),), (("A", x),)),
         Transition("first/move", (("A", x),), (("B", (x + 1).at(2)),), x.lt(30)),
         Transition("second/move", (("B", x),), (("C", (x + 1).at(2)),), x.lt(30))])
    return root, manual


def net3():
    leaf = Page("leaf")
    leaf.add_place("q", INT, port=True)
    leaf.add_place("seen", INT, timed=False, initial=[0])
    leaf.add_transition("count", inputs=[("q", x), ("seen", n)], outputs=[("seen", n + 1)])
    mid = Page("mid")
    mid.add_place("p", INT, port=True)
    mid.add_place("buf", INT)
    mid.add_transition("pass", inputs=[("p", x)], outputs=[("buf", x.at(3))])
    mid.substitute("sink", leaf, {"q": "buf"})
    root = Page("root")
    root.add_place("A", INT, initial=[4, 4, 9])
    root.substitute("mid", mid, {"p": "A"})
    manual = flat(
        [Place("A", INT, initial=(4, 4, 9)), Place("mid/buf", INT),
         Place("mid/sink/seen", INT, timed=False, initial=(0,))],
        [Transition("mid/pass", (("A", x),), (("mid/buf", x.at(3)),)),
         Transition("mid/sink/count", (("mid/buf", x), ("mid/sink/seen", n)), (("mid/sink/seen", n + 1),))])
    return root, manual


def net4():
    # port used both as input and output: a self-looping ticker with a budget
    tick = Page("tick")
    tick.add_place("clk", E, port=True)
    tick.add_place("left", INT, timed=False, initial=[6])
    tick.add_transition("tick", inputs=[("clk", Const(UNIT)), ("left", n)],
                        outputs=[("clk", Const(UNIT).at(4)), ("left", n - 1)], guard=n.gt(0))
    root = Page("root")
    root.add_place("clock", E, initial=[UNIT, UNIT])
    root.substitute("t", tick, {"clk": "clock"})
    manual = flat(
        [Place("clock", E, initial=(UNIT, UNIT)), Place("t/left", INT, timed=False, initial=(6,))],
        [Transition("t/tick", (("clock", Const(UNIT)), ("t/left", n)),
                    (("clock", Const(UNIT).at(4)), ("t/left", n - 1)), n.gt(0))])
    return root, manual


def net5():
    fifo = Page("fifo")
    fifo.add_place("in", INT, port=True)
    fifo.add_place("L", INTS, timed=False, initial=[NIL])
    fifo.add_place("out", INT, port=True)
    fifo.add_transition("enq", inputs=[("in", x), ("L", lw)], outputs=[("L", lw.concat(ListOf(x)))])
    fifo.add_transition("deq", inputs=[("L", Cons(x, rest))], outputs=[("L", rest), ("out", x.at(1))])
    root = Page("root")
    root.add_place("src", INT, initial=[3, 1, 2, 7])
    root.add_place("dst", INT)
    root.substitute("q", fifo, {"in": "src", "out": "dst"})
    manual = flat(
        [Place("src", INT, initial=(3, 1, 2, 7)), Place("dst", INT),
         Place("q/L", INTS, timed=False, initial=(NIL,))],
        [Transition("q/enq", (("src", x), ("q/L", lw)), (("q/L", lw.concat(ListOf(x))),)),
         Transition("q/deq", (("q/L", Cons(x, rest)),), (("q/L", rest), ("dst", x.at(1))))])
    return root, manual


NETS = [net1, net2, net3, net4, net5]


@pytest.mark.parametrize("build", NETS, ids=[f.__name__ for f in NETS])
def test_flatten_equals_manual_flattening(build):
    root, manual = build()
    net = flatten(root)
    assert list(net.places) == list(manual.places)
    assert list(net.transitions) == list(manual.transitions)
    for seed in range(5):
        a = run(net, 300, 200, seed)
        b = run(manual, 300, 200, seed)
        assert a.trace, "net never fired"
        assert format_trace(a.trace) == format_trace(b.trace)


def test_flat_page_is_unchanged():
    page = Page("only")
    page.add_place("A", INT, initial=[1])
    page.add_transition("t", inputs=[("A", x)])
    net = flatten(page)
    assert list(net.places) == ["A"] and list(net.transitions) == ["t"]


def test_colour_mismatch_at_port_is_error():
    root = Page("root")
    root.add_place("A", E, initial=[UNIT])
    root.add_place("B", INT)
    root.substitute("m", mover(), {"in": "A", "out": "B"})
    with pytest.raises(ColorSetError):
        flatten(root)


def test_page_cycle_is_error():
    a = Page("a")
    a.add_place("p", INT, port=True)
    a.substitute("self", a, {"p": "p"})
    root = Page("root")
    root.add_place("A", INT)
    root.substitute("a", a, {"p": "A"})
    with pytest.raises(HierarchyError):
        flatten(root)


def test_port_map_must_cover_ports_and_be_bijective():
    root = Page("root")
    root.add_place("A", INT)
    root.substitute("m", mover(), {"in": "A"})
    with pytest.raises(HierarchyError):
        flatten(root)
    root = Page("root")
    root.add_place("A", INT)
    root.substitute("m", mover(), {"in": "A", "out": "A"})
    with pytest.raises(HierarchyError):
        flatten(root)
