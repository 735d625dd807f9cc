"""Builtin values and functions: Map, print formatting and unique numbers."""

from __future__ import annotations

import math
from typing import Optional

from copri.errors import PrintError
from copri.runtime import VOID, ComplexReference, ConceptName, Handle, copy_value, values_equal


class BuiltinMap:
    """Association list keyed by value equality (references compare deeply)."""

    def __init__(self):
        self.entries: list[tuple[object, object]] = []

    def _find(self, key) -> Optional[int]:
        for i, (k, _) in enumerate(self.entries):
            if values_equal(k, key):
                return i
        return None

    def add(self, key, value) -> None:
        key, value = copy_value(key), copy_value(value)
        i = self._find(key)
        if i is None:
            self.entries.append((key, value))
        else:
            self.entries[i] = (key, value)

    def get(self, key):
        i = self._find(key)
        return None if i is None else copy_value(self.entries[i][1])

    def remove(self, key) -> None:
        i = self._find(key)
        if i is not None:
            del self.entries[i]

    def size(self) -> int:
        return len(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"Map({len(self.entries)} entries)"


def map_add(m: BuiltinMap, k, v) -> None:
    m.add(k, v)


def map_get(m: BuiltinMap, k):
    return m.get(k)


def map_remove(m: BuiltinMap, k) -> None:
    m.remove(k)


def format_number(v) -> str:
    """Integers print without a decimal point; so do integral doubles."""
    if isinstance(v, float):
        if math.isfinite(v) and v.is_integer():
            return str(int(v))
        return repr(v)
    return str(v)


def format_printable(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return format_number(v)
    if isinstance(v, str):
        return v
    if isinstance(v, ConceptName):
        return v.name
    kind = "null" if v is None else "void" if v is VOID else type(v).__name__
    raise PrintError(f"cannot print a value of kind {kind}")


def format_value(v) -> str:
    """Display form used by the REPL; covers every value kind."""
    if v is None:
        return "null"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, ComplexReference):
        return f"<ref {v}>"
    if isinstance(v, Handle):
        return f"<object {v!r}>"
    if isinstance(v, BuiltinMap):
        return repr(v)
    return format_printable(v)


def builtin_print(out, v) -> None:
    out.write(format_printable(v) + "\n")


class UniqueNumbers:
    """Deterministic identifiers ``ACC-0001``, ``ACC-0002``, ... per execution."""

    def __init__(self, prefix: str = "ACC"):
        self.prefix = prefix
        self.count = 0

    def __call__(self) -> str:
        self.count += 1
        return f"{self.prefix}-{self.count:04d}"
