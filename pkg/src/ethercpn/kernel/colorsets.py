"""Structural colour-set descriptors, checked when tokens enter a place."""

from __future__ import annotations

from typing import Any, Iterable, Optional

from .values import UNIT, Seq


class ColorSet:
    name: str = "?"

    def contains(self, v: Any) -> bool:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self._ident() == other._ident()

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._ident()))

    def _ident(self) -> tuple:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return "<ColorSet %s>" % self.name


class UnitSet(ColorSet):
    def __init__(self, name: str = "E"):
        self.name = name

    def contains(self, v):
        return v is UNIT

    def _ident(self):
        return (self.name,)


class SymbolSet(ColorSet):
    def __init__(self, name: str, symbols: Iterable[str]):
        self.name = name
        self.symbols = tuple(symbols)
        self._set = frozenset(self.symbols)

    def contains(self, v):
        return type(v) is str and v in self._set

    def _ident(self):
        return (self.name, self.symbols)


class IntSet(ColorSet):
    def __init__(self, name: str = "INT", lo: Optional[int] = None, hi: Optional[int] = None):
        self.name = name
        self.lo = lo
        self.hi = hi

    def contains(self, v):
        if type(v) is not int:
            return False
        if self.lo is not None and v < self.lo:
            return False
        if self.hi is not None and v > self.hi:
            return False
        return True

    def _ident(self):
        return (self.name, self.lo, self.hi)


class ProductSet(ColorSet):
    def __init__(self, name: str, components: Iterable[ColorSet]):
        self.name = name
        self.components = tuple(components)

    def contains(self, v):
        if type(v) is not tuple or len(v) != len(self.components):
            return False
        return all(c.contains(x) for c, x in zip(self.components, v))

    def _ident(self):
        return (self.name, self.components)


class ListSet(ColorSet):
    """Lists of a given element colour set.

    Element checks are memoised: queue lists are re-checked on every
    enqueue/dequeue and mostly contain elements already seen.
    """

    def __init__(self, name: str, element: ColorSet):
        self.name = name
        self.element = element
        self._seen: set = set()

    def contains(self, v):
        if type(v) is not Seq:
            return False
        seen = self._seen
        for x in v.items:
            if x in seen:
                continue
            if not self.element.contains(x):
                return False
            seen.add(x)
        return True

    def _ident(self):
        return (self.name, self.element)
