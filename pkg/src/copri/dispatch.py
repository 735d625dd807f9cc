"""The access engine.

An access (one method application on a complex reference) runs in four
phases: the reference chain top-down, the meta-transition that resolves
every segment into a handle through the continuation protocol, the object
chain bottom-up, and the unwinding back through the continues.

:class:`Dispatcher` is a mixin; the interpreter supplies statement
execution (``call_method``), field initialisation and the event sink.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from copri import syntax as ast
from copri.errors import (
    ArityError,
    DeadObjectError,
    IllegalQualifierError,
    ResolutionError,
    StackOrderError,
    UnknownMethodError,
)
from copri.runtime import VOID, ComplexReference, ContextStack, Handle, ObjectStore, Segment
from copri.sema import OBJECT, REFERENCE, ROOT, ConceptTable, lineage

REFERENCE_PHASE = "reference-phase"
TRANSITION = "transition"
OBJECT_PHASE = "object-phase"
UNWINDING = "unwinding"

ACCESS = "access"
CREATE = "create"
DELETE = "delete"


@dataclass
class AccessRequest:
    reference: ComplexReference
    method: str
    args: list
    mode: str = ACCESS
    phase: str = REFERENCE_PHASE
    ref_cursor: int = 0
    obj_cursor: Optional[str] = None
    context_stack: ContextStack = field(default_factory=ContextStack)
    return_slot: object = VOID
    target_result: object = VOID
    pending: Optional[Callable[[], object]] = None
    resolving: bool = False
    target_done: bool = False
    resolve_counts: Counter = field(default_factory=Counter)

    def __post_init__(self):
        self.context_stack.owner = self

    @property
    def size(self) -> int:
        return len(self.reference.segments)

    def concept_at(self, index: int) -> str:
        return self.reference.segments[index - 1].concept

    def segment_at(self, index: int) -> Segment:
        return self.reference.segments[index - 1]


class Dispatcher:
    """Access machinery shared by the interpreter.

    Subclasses provide ``table``, ``store``, ``accesses`` (the stack of
    in-flight requests), ``emit(kind, concept, side, method, depth)``,
    ``call_method(req, index, side, decl, args, special)`` and
    ``init_fields(concept, side)``.
    """

    table: ConceptTable
    store: ObjectStore
    accesses: list[AccessRequest]

    # -- helpers -----------------------------------------------------------

    def _begin(self, req: AccessRequest) -> None:
        self.accesses.append(req)

    def _end(self, req: AccessRequest) -> None:
        stack = req.context_stack
        if stack.depth:
            top = req.concept_at(stack.depth)
            self.emit("pop", top, REFERENCE, req.method, stack.depth)
            stack.pop_all()
        self.accesses.pop()

    def _push(self, req: AccessRequest, index: int, h: Handle) -> None:
        stack = req.context_stack
        if stack.has(index):
            if stack.handle_at(index) != h:
                raise StackOrderError(
                    f"segment {index} ({req.concept_at(index)}) is already resolved to another object"
                )
            return
        stack.push_entry(index, h)
        self.emit("push", req.concept_at(index), OBJECT, req.method, stack.depth)

    def _check_handle(self, req: AccessRequest, index: int, h) -> Handle:
        concept = req.concept_at(index)
        if h is None:
            raise ResolutionError(f"cannot resolve a segment of '{concept}' through a null primitive reference")
        if not isinstance(h, Handle):
            raise ResolutionError(f"segment of '{concept}' resolved to a non-handle value")
        seg = self.store.segment(h)
        if seg.concept != concept:
            raise ResolutionError(
                f"primitive reference {h!r} points to a '{seg.concept}' object, expected '{concept}'"
            )
        return h

    def method_exists(self, concepts, name: str) -> bool:
        return any(
            self.table[c].defines(REFERENCE, name) or self.table[c].defines(OBJECT, name)
            for c in concepts
        )

    def object_defines(self, req: AccessRequest, name: str) -> bool:
        return any(self.table[c].defines(OBJECT, name) for c in req.reference.concepts)

    def _pick(self, concept: str, side: str, name: str, nargs: int) -> Optional[ast.MethodDecl]:
        info = self.table[concept]
        if not info.defines(side, name):
            return None
        decl = info.method(side, name, nargs)
        if decl is None:
            expected = ", ".join(str(len(m.params)) for m in info.methods(side)[name])
            raise ArityError(
                f"{side} method '{concept}::{name}' takes {expected} argument(s), got {nargs}"
            )
        return decl

    # -- access ------------------------------------------------------------

    def apply_method(self, ref: ComplexReference, method: str, args: list):
        if method in ast.SPECIAL_METHODS:
            raise IllegalQualifierError(f"'{method}' cannot be applied as an ordinary method")
        if not self.method_exists(ref.concepts, method):
            raise UnknownMethodError(
                f"no concept of '{'/'.join(ref.concepts)}' defines a method '{method}'"
            )
        req = AccessRequest(ref, method, list(args))
        self._begin(req)
        try:
            req.return_slot = self.run_reference_chain(req, 1, method, req.args)
            return req.return_slot
        finally:
            self._end(req)

    def run_reference_chain(self, req: AccessRequest, index: int, method: str, args: list):
        """Run segment *index*'s reference method or the default pass-to-child."""
        while index <= req.size:
            req.ref_cursor = index
            decl = self._pick(req.concept_at(index), REFERENCE, method, len(args))
            if decl is not None:
                return self.call_method(req, index, REFERENCE, decl, args)
            index += 1
        return self.object_phase(req, method, args)

    def object_phase(self, req: AccessRequest, method: str, args: list):
        """`sub.m()` past the last segment: run the object chain, or do nothing."""
        if not self.object_defines(req, method):
            return VOID
        return self.object_access(req, lambda: self.run_object_chain(req, method, args))

    def object_access(self, req: AccessRequest, target: Callable[[], object]):
        """Run *target* with the context stack populated."""
        if req.target_done or req.resolving or req.mode != ACCESS:
            return target()
        return self.meta_transition(req, target)

    def meta_transition(self, req: AccessRequest, target: Callable[[], object]):
        req.phase = TRANSITION
        req.pending = target
        req.resolving = True
        try:
            self.run_continue(req, 1)
        finally:
            req.resolving = False
        if not req.target_done:
            raise ResolutionError(
                f"resolution of '{'/'.join(req.reference.concepts)}' finished without reaching the target"
            )
        req.phase = UNWINDING
        return req.target_result

    def run_pending(self, req: AccessRequest) -> None:
        if req.mode != ACCESS or req.pending is None or req.target_done:
            return
        if req.context_stack.depth != req.size:
            raise ResolutionError("target reached before every segment was resolved")
        req.target_done = True
        req.phase = OBJECT_PHASE
        self.emit("target", req.reference.real_concept, OBJECT, req.method, req.context_stack.depth)
        req.target_result = req.pending()
        req.phase = UNWINDING

    # -- continuation protocol --------------------------------------------

    def run_continue(self, req: AccessRequest, index: int) -> None:
        if index > req.size:
            return
        concept = req.concept_at(index)
        info = self.table[concept]
        req.resolve_counts[index] += 1
        self.emit("resolve", concept, REFERENCE, "continue", req.context_stack.depth)
        if info.has_ref_continue:
            decl = self._pick(concept, REFERENCE, "continue", 0)
            self.call_method(req, index, REFERENCE, decl, [], special="continue")
            if not req.context_stack.has(index):
                raise ResolutionError(f"continue of '{concept}' completed without resolving its segment")
        else:
            self.default_continue(req, index)

    def default_continue(self, req: AccessRequest, index: int) -> None:
        seg = req.segment_at(index)
        if seg.hidden_handle is None:
            raise ResolutionError(
                f"segment '{seg.concept}' carries no primitive reference (it was never created)"
            )
        try:
            self.handle_continue(req, index, seg.hidden_handle)
        except DeadObjectError as e:
            raise ResolutionError(f"segment '{seg.concept}' refers to a deleted object") from e
        self.run_continue(req, index + 1)

    def handle_continue(self, req: AccessRequest, index: int, h) -> None:
        """`h.continue()` inside a reference special method of segment *index*."""
        h = self._check_handle(req, index, h)
        self._push(req, index, h)
        concept = req.concept_at(index)
        if self.table[concept].has_obj_continue:
            decl = self._pick(concept, OBJECT, "continue", 0)
            self.call_method(req, index, OBJECT, decl, [], special="continue")
        else:
            self.bare_continue(req, index)

    def bare_continue(self, req: AccessRequest, index: int):
        if index == req.size:
            self.run_pending(req)
        return VOID

    def sub_continue(self, req: AccessRequest, index: int):
        if req.mode == ACCESS:
            self.run_continue(req, index + 1)
        return VOID

    # -- object chain ------------------------------------------------------

    def run_object_chain(self, req: AccessRequest, method: str, args: list):
        """Start at the lowest segment whose object class defines *method*."""
        for index in range(req.size, 0, -1):
            decl = self._pick(req.concept_at(index), OBJECT, method, len(args))
            if decl is not None:
                return self.call_method(req, index, OBJECT, decl, args)
        raise UnknownMethodError(f"no object class in '{'/'.join(req.reference.concepts)}' defines '{method}'")

    def super_object_call(self, req: AccessRequest, index: int, method: str, args: list):
        """Next ancestor definition above *index*, through the context stack."""
        for j in range(index - 1, 0, -1):
            decl = self._pick(req.concept_at(j), OBJECT, method, len(args))
            if decl is not None:
                return self.object_access(req, lambda: self.call_method(req, j, OBJECT, decl, args))
        return VOID

    # -- creation ----------------------------------------------------------

    def create_instance(self, decl_type: ast.TypeExpr, args: list) -> ComplexReference:
        context = decl_type.context or ROOT
        chain = lineage(self.table, decl_type.concept)
        segments = []
        for concept in chain[chain.index(context) + 1:]:
            info = self.table[concept]
            segments.append(Segment(concept, self.init_fields(concept, REFERENCE), None, info.has_hidden_slot))
        ref = ComplexReference(context, segments)
        req = AccessRequest(ref, "create", list(args), mode=CREATE)
        self._begin(req)
        try:
            self.run_create(req, 1, req.args)
        finally:
            self._end(req)
        return ref

    def run_create(self, req: AccessRequest, index: int, args: list):
        if index > req.size:
            return VOID
        concept = req.concept_at(index)
        decl = self._pick(concept, REFERENCE, "create", len(args))
        if decl is not None:
            self.call_method(req, index, REFERENCE, decl, args, special="create")
        else:
            self.default_create(req, index, args)
        return VOID

    def default_create(self, req: AccessRequest, index: int, args: list) -> None:
        h = self.handle_create(req, index, args)
        seg = req.segment_at(index)
        if seg.has_hidden_slot:
            seg.hidden_handle = h
        self.run_create(req, index + 1, args)

    def handle_create(self, req: AccessRequest, index: int, args: list) -> Handle:
        """`Object o.create(args)`: allocate segment *index*'s object and construct it."""
        concept = req.concept_at(index)
        stack = req.context_stack
        parent = stack.handle_at(index - 1) if stack.has(index - 1) else None
        h = self.store.alloc(concept, self.init_fields(concept, OBJECT), parent)
        self._push(req, index, h)
        info = self.table[concept]
        if info.has_obj_create:
            decl = info.method(OBJECT, "create", len(args)) or info.method(OBJECT, "create", 0)
            if decl is None:
                self._pick(concept, OBJECT, "create", len(args))  # raises ArityError
            call_args = args if len(decl.params) == len(args) else []
            self.call_method(req, index, OBJECT, decl, call_args, special="create")
        return h

    # -- deletion ----------------------------------------------------------

    def delete_instance(self, ref: ComplexReference) -> None:
        req = AccessRequest(ref, "delete", [], mode=DELETE)
        self._begin(req)
        try:
            self.run_delete(req, 1)
        finally:
            self._end(req)

    def run_delete(self, req: AccessRequest, index: int):
        if index > req.size:
            return VOID
        concept = req.concept_at(index)
        decl = self._pick(concept, REFERENCE, "delete", 0)
        if decl is not None:
            self.call_method(req, index, REFERENCE, decl, [], special="delete")
        else:
            self.default_delete(req, index)
        return VOID

    def default_delete(self, req: AccessRequest, index: int) -> None:
        """Children first, then this segment's object destructor and handle."""
        seg = req.segment_at(index)
        h = seg.hidden_handle
        if h is None:
            raise ResolutionError(f"segment '{seg.concept}' has no primitive reference to delete")
        if not self.store.is_alive(h):
            raise ResolutionError(f"segment '{seg.concept}' refers to an already deleted object")
        self._push(req, index, self._check_handle(req, index, h))
        self.run_delete(req, index + 1)
        self._destroy(req, index, h)

    def handle_delete(self, req: AccessRequest, index: int, h) -> None:
        """`o.delete()` inside a reference special method of segment *index*."""
        try:
            h = self._check_handle(req, index, h)
        except DeadObjectError as e:
            raise ResolutionError(f"segment '{req.concept_at(index)}' refers to an already deleted object") from e
        self._push(req, index, h)
        self._destroy(req, index, h)

    def _destroy(self, req: AccessRequest, index: int, h: Handle) -> None:
        concept = req.concept_at(index)
        if self.table[concept].has_obj_delete:
            decl = self._pick(concept, OBJECT, "delete", 0)
            self.call_method(req, index, OBJECT, decl, [], special="delete")
        self.store.free(h)
