"""Timed hierarchical coloured Petri net kernel."""

from .colorsets import ColorSet, IntSet, ListSet, ProductSet, SymbolSet, UnitSet
from .engine import (
    Binding,
    ClockAdvanced,
    Dead,
    Engine,
    Event,
    Fired,
    RunResult,
    enabled_bindings,
    evaluate_arc,
    initial_marking,
    run,
)
from .errors import ColorSetError, FiringError, HierarchyError, NetError, UnboundVariable
from .expr import (
    Bag,
    BinOp,
    Concat,
    Cons,
    Const,
    Delay,
    Expr,
    Field,
    Head,
    If,
    ListOf,
    Not,
    Tail,
    Tup,
    Var,
    Wild,
    lift,
)
from .net import P_HIGH, P_LOW, P_NORMAL, Arc, Net, Page, Place, Transition, flatten
from .trace import ReplayError, format_trace, markings_equal, replay
from .values import NIL, UNIT, Seq, TimedToken, format_value, value_key

__all__ = [name for name in dir() if not name.startswith("_")]
