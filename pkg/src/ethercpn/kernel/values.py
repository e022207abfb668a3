"""Colour values carried by tokens.

A colour value is one of:

* ``UNIT``      -- the single control token value ``()``
* ``str``       -- a symbol (port ids, priorities)
* ``int``       -- an integer (counters, sequence numbers)
* ``tuple``     -- a fixed-length product of colour values
* :class:`Seq`  -- an ordered list of colour values (FIFO list tokens)

Plain Python values are used wherever possible; only the unit value and
sequences get dedicated classes so that ``()``, ``(a,)`` and ``[a]`` stay
distinguishable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Union


class _Unit:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "()"

    def __reduce__(self):
        return (_Unit, ())


UNIT = _Unit()


class Seq:
    """Immutable list value; the colour of FIFO list tokens."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable[Any] = ()):
        self.items = tuple(items)
        self._hash = None

    def __eq__(self, other: object) -> bool:
        return type(other) is Seq and self.items == other.items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(("Seq", self.items))
        return self._hash

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self) -> bool:
        return bool(self.items)

    def __repr__(self) -> str:
        return "Seq(%r)" % (list(self.items),)

    def __reduce__(self):
        return (Seq, (self.items,))

    @property
    def head(self) -> Any:
        if not self.items:
            raise ValueError("head of empty list")
        return self.items[0]

    @property
    def tail(self) -> "Seq":
        if not self.items:
            raise ValueError("tail of empty list")
        return Seq(self.items[1:])

    def __add__(self, other: "Seq") -> "Seq":
        if type(other) is not Seq:
            return NotImplemented
        return Seq(self.items + other.items)


NIL = Seq()

ColorValue = Union[_Unit, str, int, tuple, Seq]


def is_value(v: Any) -> bool:
    """True if ``v`` is a well-formed (finite, acyclic) colour value."""
    if v is UNIT or type(v) is str:
        return True
    if type(v) is int:
        return True
    if type(v) is tuple:
        return all(is_value(x) for x in v)
    if type(v) is Seq:
        return all(is_value(x) for x in v.items)
    return False


_RANK = {_Unit: 0, int: 1, str: 2, tuple: 3, Seq: 4}


def value_key(v: Any) -> tuple:
    """Total-order sort key over colour values of any kind."""
    t = type(v)
    if t is int:
        return (1, v)
    if t is str:
        return (2, v)
    if t is tuple:
        return (3, len(v), tuple(value_key(x) for x in v))
    if t is Seq:
        return (4, len(v.items), tuple(value_key(x) for x in v.items))
    if v is UNIT:
        return (0,)
    raise TypeError("not a colour value: %r" % (v,))


def format_value(v: Any) -> str:
    """Render a value in the plain-text notation used by traces and dumps."""
    if v is UNIT:
        return "()"
    t = type(v)
    if t is str:
        return v
    if t is int:
        return str(v)
    if t is tuple:
        return "(" + ",".join(format_value(x) for x in v) + ")"
    if t is Seq:
        return "[" + ",".join(format_value(x) for x in v.items) + "]"
    raise TypeError("not a colour value: %r" % (v,))


@dataclass(frozen=True, order=False)
class TimedToken:
    value: Any
    timestamp: int = 0

    def __post_init__(self):
        if self.timestamp < 0:
            raise ValueError("negative timestamp %d" % self.timestamp)

    def sort_key(self) -> tuple:
        return (value_key(self.value), self.timestamp)

    def __str__(self) -> str:
        return "%s@%d" % (format_value(self.value), self.timestamp)
