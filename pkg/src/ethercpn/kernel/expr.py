"""Arc and guard expressions.

Expressions form a small tree language modelled on CPN ML: variables,
constants, tuples and field projection, list literals, ``hd``/``tl``,
``::`` and ``^^``, integer arithmetic and comparison, boolean connectives,
``if``, multiset sums (``++``) and the ``@+`` delay annotation.

On input arcs an expression is used as a *pattern*: variables, constants,
tuples, list literals and ``h::t`` bind against a token value; any other
sub-expression must be computable from variables already bound and is
compared for equality.

On output arcs an expression *produces* a multiset of (value, delay) pairs.
``If`` without an else-branch and a false condition produces nothing; this
is how conditional routing arcs are written.
"""

from __future__ import annotations

from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from .errors import NetError, UnboundVariable
from .values import UNIT, Seq, format_value

Env = Dict[str, Any]


class Expr:
    def eval(self, env: Env) -> Any:
        raise NotImplementedError

    def vars(self) -> FrozenSet[str]:
        return frozenset()

    # -- operator sugar -------------------------------------------------
    def __add__(self, other):
        return BinOp("+", self, lift(other))

    def __sub__(self, other):
        return BinOp("-", self, lift(other))

    def __mul__(self, other):
        return BinOp("*", self, lift(other))

    def __and__(self, other):
        return BinOp("andalso", self, lift(other))

    def __or__(self, other):
        return BinOp("orelse", self, lift(other))

    def __invert__(self):
        return Not(self)

    def eq(self, other):
        return BinOp("=", self, lift(other))

    def ne(self, other):
        return BinOp("<>", self, lift(other))

    def lt(self, other):
        return BinOp("<", self, lift(other))

    def le(self, other):
        return BinOp("<=", self, lift(other))

    def gt(self, other):
        return BinOp(">", self, lift(other))

    def ge(self, other):
        return BinOp(">=", self, lift(other))

    def at(self, delay):
        return Delay(self, lift(delay))

    def __getitem__(self, index: int):
        return Field(self, index)

    def concat(self, other):
        return Concat(self, lift(other))

    def __repr__(self) -> str:
        return "<%s %s>" % (type(self).__name__, self)


def lift(x: Any) -> Expr:
    return x if isinstance(x, Expr) else Const(x)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariable("unbound variable %r" % self.name) from None

    def vars(self):
        return frozenset((self.name,))

    def __str__(self):
        return self.name


class Wild(Expr):
    """``_`` -- matches anything, binds nothing. Pattern-only."""

    def eval(self, env):
        raise NetError("wildcard used outside a pattern")

    def __str__(self):
        return "_"


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Any):
        self.value = value

    def eval(self, env):
        return self.value

    def __str__(self):
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        return format_value(self.value)


class Tup(Expr):
    def __init__(self, *items):
        self.items = tuple(lift(i) for i in items)

    def eval(self, env):
        return tuple(i.eval(env) for i in self.items)

    def vars(self):
        return frozenset().union(*(i.vars() for i in self.items))

    def __str__(self):
        return "(" + ",".join(str(i) for i in self.items) + ")"


class Field(Expr):
    """Tuple projection, ``#i e`` (0-based)."""

    def __init__(self, expr, index: int):
        self.expr = lift(expr)
        self.index = index

    def eval(self, env):
        v = self.expr.eval(env)
        if type(v) is not tuple:
            raise NetError("projection #%d of non-tuple %r" % (self.index, v))
        return v[self.index]

    def vars(self):
        return self.expr.vars()

    def __str__(self):
        return "#%d %s" % (self.index, self.expr)


class ListOf(Expr):
    def __init__(self, *items):
        self.items = tuple(lift(i) for i in items)

    def eval(self, env):
        return Seq(i.eval(env) for i in self.items)

    def vars(self):
        return frozenset().union(*(i.vars() for i in self.items))

    def __str__(self):
        return "[" + ",".join(str(i) for i in self.items) + "]"


class Head(Expr):
    def __init__(self, expr):
        self.expr = lift(expr)

    def eval(self, env):
        return _seq(self.expr.eval(env)).head

    def vars(self):
        return self.expr.vars()

    def __str__(self):
        return "hd %s" % self.expr


class Tail(Expr):
    def __init__(self, expr):
        self.expr = lift(expr)

    def eval(self, env):
        return _seq(self.expr.eval(env)).tail

    def vars(self):
        return self.expr.vars()

    def __str__(self):
        return "tl %s" % self.expr


class Cons(Expr):
    def __init__(self, head, tail):
        self.head = lift(head)
        self.tail = lift(tail)

    def eval(self, env):
        return Seq((self.head.eval(env),) + _seq(self.tail.eval(env)).items)

    def vars(self):
        return self.head.vars() | self.tail.vars()

    def __str__(self):
        return "%s::%s" % (self.head, self.tail)


class Concat(Expr):
    def __init__(self, left, right):
        self.left = lift(left)
        self.right = lift(right)

    def eval(self, env):
        return _seq(self.left.eval(env)) + _seq(self.right.eval(env))

    def vars(self):
        return self.left.vars() | self.right.vars()

    def __str__(self):
        return "%s ^^ %s" % (self.left, self.right)


def _seq(v):
    if type(v) is not Seq:
        raise NetError("list operation on non-list %r" % (v,))
    return v


def _int(v):
    if type(v) is not int:
        raise NetError("arithmetic on non-integer %r" % (v,))
    return v


def _bool(v):
    if type(v) is not bool:
        raise NetError("boolean connective on non-boolean %r" % (v,))
    return v


_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "div": lambda a, b: a // b,
    "mod": lambda a, b: a % b,
}
_COMPARE = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class BinOp(Expr):
    def __init__(self, op: str, left, right):
        if op not in _ARITH and op not in _COMPARE and op not in ("=", "<>", "andalso", "orelse"):
            raise NetError("unknown operator %r" % op)
        self.op = op
        self.left = lift(left)
        self.right = lift(right)

    def eval(self, env):
        op = self.op
        if op == "andalso":
            return _bool(self.left.eval(env)) and _bool(self.right.eval(env))
        if op == "orelse":
            return _bool(self.left.eval(env)) or _bool(self.right.eval(env))
        a = self.left.eval(env)
        b = self.right.eval(env)
        if op == "=":
            return a == b and type(a) is type(b)
        if op == "<>":
            return not (a == b and type(a) is type(b))
        if op in _ARITH:
            return _ARITH[op](_int(a), _int(b))
        return _COMPARE[op](_int(a), _int(b))

    def vars(self):
        return self.left.vars() | self.right.vars()

    def __str__(self):
        return "(%s %s %s)" % (self.left, self.op, self.right)


class Not(Expr):
    def __init__(self, expr):
        self.expr = lift(expr)

    def eval(self, env):
        return not _bool(self.expr.eval(env))

    def vars(self):
        return self.expr.vars()

    def __str__(self):
        return "not %s" % self.expr


class If(Expr):
    """``if c then a [else b]``.

    Without ``else`` it is only meaningful on an output arc, where a false
    condition produces the empty multiset.
    """

    def __init__(self, cond, then, else_=None):
        self.cond = lift(cond)
        self.then = lift(then)
        self.else_ = None if else_ is None else lift(else_)

    def eval(self, env):
        if _bool(self.cond.eval(env)):
            return self.then.eval(env)
        if self.else_ is None:
            raise NetError("if-without-else evaluated as a value: %s" % self)
        return self.else_.eval(env)

    def vars(self):
        vs = self.cond.vars() | self.then.vars()
        return vs | self.else_.vars() if self.else_ is not None else vs

    def __str__(self):
        if self.else_ is None:
            return "if %s then %s" % (self.cond, self.then)
        return "if %s then %s else %s" % (self.cond, self.then, self.else_)


class Bag(Expr):
    """Multiset sum ``a ++ b ++ ...`` (output arcs only)."""

    def __init__(self, *items):
        self.items = tuple(lift(i) for i in items)

    def eval(self, env):
        raise NetError("multiset used as a single value: %s" % self)

    def vars(self):
        return frozenset().union(*(i.vars() for i in self.items))

    def __str__(self):
        if not self.items:
            return "empty"
        return " ++ ".join(str(i) for i in self.items)


class Delay(Expr):
    """``e @+ d`` -- produced tokens are stamped ``clock + d``."""

    def __init__(self, expr, delay):
        self.expr = lift(expr)
        self.delay = lift(delay)

    def eval(self, env):
        return self.expr.eval(env)

    def vars(self):
        return self.expr.vars() | self.delay.vars()

    def __str__(self):
        return "%s@+%s" % (self.expr, self.delay)


# -- output production --------------------------------------------------------


def produce(expr: Expr, env: Env) -> List[Tuple[Any, int]]:
    """Evaluate an output-arc expression to a list of (value, extra_delay)."""
    t = type(expr)
    if t is Delay:
        d = _int(expr.delay.eval(env))
        if d < 0:
            raise NetError("negative delay %d in %s" % (d, expr))
        return [(v, dd + d) for v, dd in produce(expr.expr, env)]
    if t is If:
        if _bool(expr.cond.eval(env)):
            return produce(expr.then, env)
        return produce(expr.else_, env) if expr.else_ is not None else []
    if t is Bag:
        out = []
        for item in expr.items:
            out.extend(produce(item, env))
        return out
    return [(expr.eval(env), 0)]


# -- pattern matching ---------------------------------------------------------


def pattern_vars(expr: Expr) -> FrozenSet[str]:
    """Variables an input-arc expression can bind by matching."""
    t = type(expr)
    if t is Var:
        return frozenset((expr.name,))
    if t in (Tup, ListOf):
        return frozenset().union(*(pattern_vars(i) for i in expr.items))
    if t is Cons:
        return pattern_vars(expr.head) | pattern_vars(expr.tail)
    return frozenset()


def matchable(expr: Expr, bound: FrozenSet[str]) -> bool:
    """Whether ``expr`` can be matched once ``bound`` variables are known."""
    t = type(expr)
    if t in (Var, Const, Wild):
        return True
    if t in (Tup, ListOf):
        return all(matchable(i, bound) for i in expr.items)
    if t is Cons:
        return matchable(expr.head, bound) and matchable(expr.tail, bound)
    return expr.vars() <= bound


def match(expr: Expr, value: Any, env: Env) -> Optional[Env]:
    """Match a token value; return the extended environment or None."""
    t = type(expr)
    if t is Var:
        name = expr.name
        if name in env:
            old = env[name]
            return env if (old == value and type(old) is type(value)) else None
        new = dict(env)
        new[name] = value
        return new
    if t is Const:
        c = expr.value
        return env if (c == value and type(c) is type(value)) else None
    if t is Wild:
        return env
    if t is Tup:
        if type(value) is not tuple or len(value) != len(expr.items):
            return None
        for item, v in zip(expr.items, value):
            env = match(item, v, env)
            if env is None:
                return None
        return env
    if t is ListOf:
        if type(value) is not Seq or len(value.items) != len(expr.items):
            return None
        for item, v in zip(expr.items, value.items):
            env = match(item, v, env)
            if env is None:
                return None
        return env
    if t is Cons:
        if type(value) is not Seq or not value.items:
            return None
        env = match(expr.head, value.items[0], env)
        if env is None:
            return None
        return match(expr.tail, Seq(value.items[1:]), env)
    v = expr.eval(env)
    return env if (v == value and type(v) is type(value)) else None


# -- convenience constructors -------------------------------------------------

NIL_E = Const(Seq())
UNIT_E = Const(UNIT)
TRUE = Const(True)
