"""Run-time values: object store, complex references and the context stack.

Value representation::

    double   -> float            int     -> int
    boolean  -> bool             String  -> str
    null     -> None             void    -> VOID
    Object   -> Handle           Map     -> BuiltinMap (shared, by handle)
    concept  -> ComplexReference (copied on every assignment)
    type operator results -> ConceptName
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from copri.errors import (
    DeadObjectError,
    EmptyStackError,
    MalformedReferenceError,
    StackOrderError,
    UnknownFieldError,
)
from copri.sema import ROOT, ConceptTable


class _Void:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "void"

    def __bool__(self) -> bool:
        return False


VOID = _Void()


@dataclass(frozen=True)
class Handle:
    """Primitive reference: opaque identifier of one object segment."""

    id: int

    def __repr__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True)
class ConceptName:
    name: str

    def __str__(self) -> str:
        return self.name


TYPE_DEFAULTS = {
    "double": 0.0,
    "int": 0,
    "boolean": False,
    "String": "",
    "char": "",
    "Object": None,
    "Map": None,
}


def type_default(type_name: str, is_builtin: bool = True):
    if not is_builtin:
        return None
    return TYPE_DEFAULTS.get(type_name)


# -- reference side --------------------------------------------------------


@dataclass
class Segment:
    concept: str
    fields: dict[str, object] = field(default_factory=dict)
    hidden_handle: Optional[Handle] = None
    has_hidden_slot: bool = False

    def copy(self) -> "Segment":
        return Segment(self.concept, copy_fields(self.fields), self.hidden_handle, self.has_hidden_slot)


@dataclass
class ComplexReference:
    """A by-value sequence of reference segments below a context concept."""

    context: str
    segments: list[Segment]

    @property
    def real_concept(self) -> str:
        return self.segments[-1].concept

    @property
    def concepts(self) -> list[str]:
        return [s.concept for s in self.segments]

    def copy(self) -> "ComplexReference":
        return ComplexReference(self.context, [s.copy() for s in self.segments])

    def __len__(self) -> int:
        return len(self.segments)

    def __str__(self) -> str:
        parts = []
        for s in self.segments:
            items = [f"{k}={format_field(v)}" for k, v in s.fields.items()]
            if s.has_hidden_slot:
                items.append(f"handle={s.hidden_handle!r}" if s.hidden_handle else "handle=none")
            parts.append(f"{s.concept}{{{', '.join(items)}}}")
        return f"{self.context}:[{' / '.join(parts)}]"


def format_field(v) -> str:
    if isinstance(v, str):
        return repr(v)
    if v is None:
        return "null"
    return str(v)


def copy_value(v):
    """Copy a value for by-value transfer; only references need it."""
    if isinstance(v, ComplexReference):
        return v.copy()
    return v


def copy_fields(fields: dict) -> dict:
    return {k: copy_value(v) for k, v in fields.items()}


def validate_reference(table: ConceptTable, ref: ComplexReference) -> ComplexReference:
    if not ref.segments:
        raise MalformedReferenceError("a reference needs at least one segment")
    expected_parent = ref.context
    for seg in ref.segments:
        if seg.concept not in table:
            raise MalformedReferenceError(f"unknown concept '{seg.concept}' in reference")
        if seg.concept == ROOT:
            raise MalformedReferenceError("Root cannot be a reference segment")
        parent = table.parent(seg.concept)
        if parent != expected_parent:
            raise MalformedReferenceError(
                f"segment '{seg.concept}' is not included in '{expected_parent}'"
            )
        expected_parent = seg.concept
    return ref


def make_reference(table: ConceptTable, context: str,
                   segments: Iterable[tuple[str, dict]]) -> ComplexReference:
    """Build and validate a complex reference from ``(concept, fields)`` pairs.

    Hidden-handle slots are set up from the table but left empty.
    """
    segs = []
    for concept, fields in segments:
        info = table.concepts.get(concept)
        segs.append(Segment(concept, dict(fields), None,
                            bool(info and info.has_hidden_slot)))
    return validate_reference(table, ComplexReference(context, segs))


def values_equal(a, b) -> bool:
    if isinstance(a, ComplexReference) or isinstance(b, ComplexReference):
        if not (isinstance(a, ComplexReference) and isinstance(b, ComplexReference)):
            return False
        return reference_equals(a, b)
    if isinstance(a, bool) or isinstance(b, bool):
        return type(a) is type(b) and a == b
    if a is None or b is None:
        return a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    return type(a) is type(b) and a == b


def reference_equals(a: ComplexReference, b: ComplexReference) -> bool:
    """Deep value equality, hidden handles included."""
    if a.context != b.context or len(a.segments) != len(b.segments):
        return False
    for x, y in zip(a.segments, b.segments):
        if x.concept != y.concept or x.hidden_handle != y.hidden_handle:
            return False
        if x.fields.keys() != y.fields.keys():
            return False
        if not all(values_equal(x.fields[k], y.fields[k]) for k in x.fields):
            return False
    return True


# -- object side -----------------------------------------------------------


@dataclass
class ObjectSegment:
    concept: str
    fields: dict[str, object]
    parent_handle: Optional[Handle] = None
    alive: bool = True


class ObjectStore:
    """Heap of object segments.  Handles are never reused within one store."""

    def __init__(self):
        self.slots: dict[Handle, ObjectSegment] = {}
        self.next_handle = 1

    def alloc(self, concept: str, fields: Optional[dict] = None,
              parent: Optional[Handle] = None) -> Handle:
        h = Handle(self.next_handle)
        self.next_handle += 1
        self.slots[h] = ObjectSegment(concept, dict(fields or {}), parent)
        return h

    def segment(self, h: Handle) -> ObjectSegment:
        seg = self.slots.get(h)
        if seg is None:
            raise DeadObjectError(f"unknown primitive reference {h!r}")
        if not seg.alive:
            raise DeadObjectError(f"object {h!r} of concept '{seg.concept}' has been deleted")
        return seg

    def free(self, h: Handle) -> None:
        self.segment(h).alive = False

    def get_field(self, h: Handle, name: str):
        seg = self.segment(h)
        if name not in seg.fields:
            raise UnknownFieldError(f"concept '{seg.concept}' has no object field '{name}'")
        return seg.fields[name]

    def set_field(self, h: Handle, name: str, value) -> None:
        seg = self.segment(h)
        if name not in seg.fields:
            raise UnknownFieldError(f"concept '{seg.concept}' has no object field '{name}'")
        seg.fields[name] = value

    def is_alive(self, h: Handle) -> bool:
        seg = self.slots.get(h)
        return seg is not None and seg.alive

    @property
    def alive_count(self) -> int:
        return sum(1 for s in self.slots.values() if s.alive)


def alloc_object_segment(store: ObjectStore, concept: str, parent: Optional[Handle] = None,
                         fields: Optional[dict] = None) -> Handle:
    return store.alloc(concept, fields, parent)


def free_object_segment(store: ObjectStore, h: Handle) -> None:
    store.free(h)


def get_field(store: ObjectStore, h: Handle, name: str):
    return store.get_field(h, name)


def set_field(store: ObjectStore, h: Handle, name: str, value) -> None:
    store.set_field(h, name, value)


# -- context stack ---------------------------------------------------------


class ContextStack:
    """Resolved handles of one access, indexed by segment position (1-based)."""

    def __init__(self, owner=None):
        self.entries: list[tuple[int, Handle]] = []
        self.owner = owner

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def depth(self) -> int:
        return len(self.entries)

    def push_entry(self, index: int, handle: Handle) -> None:
        if index != len(self.entries) + 1:
            raise StackOrderError(
                f"segment {index} resolved out of order (context stack depth {len(self.entries)})"
            )
        self.entries.append((index, handle))

    def top_handle(self) -> Handle:
        if not self.entries:
            raise EmptyStackError("context stack is empty")
        return self.entries[-1][1]

    def handle_at(self, index: int) -> Handle:
        if not 1 <= index <= len(self.entries):
            raise EmptyStackError(f"segment {index} is not on the context stack")
        return self.entries[index - 1][1]

    def has(self, index: int) -> bool:
        return 1 <= index <= len(self.entries)

    def pop_all(self) -> int:
        n = len(self.entries)
        self.entries.clear()
        return n


def push_entry(stack: ContextStack, index: int, handle: Handle) -> None:
    stack.push_entry(index, handle)


def top_handle(stack: ContextStack) -> Handle:
    return stack.top_handle()


def handle_at(stack: ContextStack, index: int) -> Handle:
    return stack.handle_at(index)


def pop_all(stack: ContextStack) -> int:
    return stack.pop_all()

