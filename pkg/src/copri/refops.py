"""Reference algebra: type operators, concatenation, left and right casts.

All operations return fresh references and never mutate their operands.
"""

from __future__ import annotations

from typing import Iterable, Optional

from copri import syntax as ast
from copri.errors import (
    CastError,
    ConcatMismatchError,
    EmptyReferenceError,
    TypeMismatchError,
    TypeOperatorError,
    WideningUnavailableError,
)
from copri.runtime import ComplexReference, Segment, type_default, validate_reference
from copri.sema import ROOT, ConceptTable, is_included, is_strictly_included, lineage


def _require_ref(value, op: str) -> ComplexReference:
    if not isinstance(value, ComplexReference):
        what = "null" if value is None else type(value).__name__
        raise TypeOperatorError(f"{op}() needs a reference, got {what}")
    return value


def declared_concept(decl_type: Optional[ast.TypeExpr]) -> str:
    """``concept(var)`` / ``conceptof(var)``: the variable's declared concept."""
    if decl_type is None or decl_type.is_builtin:
        shown = "untyped" if decl_type is None else decl_type.concept
        raise TypeOperatorError(f"concept() needs a concept-typed variable, got {shown}")
    return decl_type.concept


def declared_context(decl_type: Optional[ast.TypeExpr]) -> str:
    """``context(var)``: the declared context, Root unless written as ``C : T``."""
    if decl_type is None or decl_type.is_builtin:
        shown = "untyped" if decl_type is None else decl_type.concept
        raise TypeOperatorError(f"context() needs a concept-typed variable, got {shown}")
    return decl_type.context or ROOT


def real_concept(ref) -> str:
    """``instanceof(x)``: concept of the last segment."""
    return _require_ref(ref, "instanceof").real_concept


def real_context(ref) -> str:
    """``contextof(x)``: parent concept of the first segment."""
    return _require_ref(ref, "contextof").context


def concat_references(lhs, rhs) -> ComplexReference:
    lhs = _require_ref(lhs, "concatenation")
    rhs = _require_ref(rhs, "concatenation")
    if rhs.context != lhs.real_concept:
        raise ConcatMismatchError(
            f"cannot attach a reference in context '{rhs.context}' "
            f"below a reference ending in '{lhs.real_concept}'"
        )
    return ComplexReference(lhs.context, [s.copy() for s in lhs.segments + rhs.segments])


def left_cast(table: ConceptTable, target_context: str, ref,
              enclosing: Iterable[ComplexReference] = ()) -> ComplexReference:
    """Return *ref* re-rooted so that its context is *target_context*.

    Narrowing drops leading segments.  Widening prepends the missing higher
    segments, copied from the first reference in *enclosing* (innermost
    access first) that carries them.
    """
    ref = _require_ref(ref, "left cast")
    real = ref.real_concept
    if target_context == real:
        raise EmptyReferenceError(f"left cast to '{target_context}' leaves no segments")
    if target_context not in table or not is_strictly_included(table, real, target_context):
        raise CastError(f"'{target_context}' is not a context of '{real}'")
    if target_context == ref.context:
        return ref.copy()
    if target_context in ref.concepts:
        idx = ref.concepts.index(target_context)
        return ComplexReference(target_context, [s.copy() for s in ref.segments[idx + 1:]])
    # widening: concepts strictly below target_context down to the current context
    chain = lineage(table, ref.context)
    needed = chain[chain.index(target_context) + 1:]
    for outer in enclosing:
        concepts = outer.concepts
        if needed[0] in concepts and needed[-1] in concepts:
            start = concepts.index(needed[0])
            end = concepts.index(needed[-1])
            prefix = [s.copy() for s in outer.segments[start:end + 1]]
            return ComplexReference(target_context, prefix + [s.copy() for s in ref.segments])
    raise WideningUnavailableError(
        f"no enclosing access supplies the segments {', '.join(needed)} "
        f"needed to widen into context '{target_context}'"
    )


def right_cast(table: ConceptTable, ref, target_type: str) -> ComplexReference:
    """Return *ref* with real type *target_type*.

    Truncation drops trailing segments; extension appends empty segments
    whose fields hold type defaults and whose hidden handles are absent.
    """
    ref = _require_ref(ref, "right cast")
    if target_type not in table:
        raise CastError(f"unknown concept '{target_type}'")
    if target_type in ref.concepts:
        idx = ref.concepts.index(target_type)
        return ComplexReference(ref.context, [s.copy() for s in ref.segments[: idx + 1]])
    real = ref.real_concept
    if is_strictly_included(table, target_type, real):
        chain = lineage(table, target_type)
        extra = []
        for concept in chain[chain.index(real) + 1:]:
            info = table[concept]
            fields = {f.name: type_default(f.type.concept, f.type.is_builtin) for f in info.ref_fields}
            extra.append(Segment(concept, fields, None, info.has_hidden_slot))
        return validate_reference(
            table, ComplexReference(ref.context, [s.copy() for s in ref.segments] + extra)
        )
    if is_included(table, ref.context, target_type):
        raise EmptyReferenceError(f"right cast to '{target_type}' leaves no segments")
    raise CastError(f"'{target_type}' is unrelated to '{real}'")


def check_assignable(table: ConceptTable, decl_type: ast.TypeExpr, value) -> None:
    """Enforce ``concept(var) >= instanceof(ref)`` and an exact context match."""
    if value is None:
        return
    if not isinstance(value, ComplexReference):
        raise TypeMismatchError(f"cannot store {type(value).__name__} in a {decl_type} slot")
    if not is_included(table, value.real_concept, decl_type.concept):
        raise TypeMismatchError(
            f"reference of concept '{value.real_concept}' does not fit declared type '{decl_type.concept}'"
        )
    expected = decl_type.context or ROOT
    if value.context != expected:
        raise TypeMismatchError(
            f"reference has context '{value.context}' but the slot is declared with context '{expected}'"
        )
