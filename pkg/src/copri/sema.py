"""Concept table construction and static checks.

The table is built once per program and treated as immutable afterwards.
:func:`analyze` additionally classifies every colon expression in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from copri import syntax as ast
from copri.errors import SemaError

ROOT = "Root"

REFERENCE = "reference"
OBJECT = "object"

TYPED_DECL = "typed-decl"
LEFT_CAST = "left-cast"
RIGHT_CAST = "right-cast"
CONCATENATION = "concatenation"


@dataclass
class ConceptInfo:
    name: str
    parent: Optional[str]
    ref_fields: list[ast.FieldDecl] = field(default_factory=list)
    obj_fields: list[ast.FieldDecl] = field(default_factory=list)
    ref_methods: dict[str, list[ast.MethodDecl]] = field(default_factory=dict)
    obj_methods: dict[str, list[ast.MethodDecl]] = field(default_factory=dict)
    decl: Optional[ast.ConceptDecl] = None

    def fields(self, side: str) -> list[ast.FieldDecl]:
        return self.ref_fields if side == REFERENCE else self.obj_fields

    def methods(self, side: str) -> dict[str, list[ast.MethodDecl]]:
        return self.ref_methods if side == REFERENCE else self.obj_methods

    def field(self, side: str, name: str) -> Optional[ast.FieldDecl]:
        for f in self.fields(side):
            if f.name == name:
                return f
        return None

    def method(self, side: str, name: str, arity: Optional[int] = None) -> Optional[ast.MethodDecl]:
        candidates = self.methods(side).get(name, ())
        for m in candidates:
            if arity is None or len(m.params) == arity:
                return m
        return None

    def defines(self, side: str, name: str) -> bool:
        return name in self.methods(side)

    has_ref_continue = property(lambda self: "continue" in self.ref_methods)
    has_ref_create = property(lambda self: "create" in self.ref_methods)
    has_ref_delete = property(lambda self: "delete" in self.ref_methods)
    has_obj_continue = property(lambda self: "continue" in self.obj_methods)
    has_obj_create = property(lambda self: "create" in self.obj_methods)
    has_obj_delete = property(lambda self: "delete" in self.obj_methods)

    @property
    def has_hidden_slot(self) -> bool:
        """Segments of concepts without a reference ``continue`` carry a system handle."""
        return not self.has_ref_continue


@dataclass
class ConceptTable:
    concepts: dict[str, ConceptInfo]
    warnings: list[str] = field(default_factory=list)
    root: str = ROOT

    def __contains__(self, name: str) -> bool:
        return name in self.concepts

    def __getitem__(self, name: str) -> ConceptInfo:
        return self.concepts[name]

    def parent(self, name: str) -> Optional[str]:
        return self.concepts[name].parent


def build_concept_table(program: ast.Program | Iterable[ast.ConceptDecl]) -> ConceptTable:
    """Register every concept declaration under the implicit ``Root`` concept."""
    decls = program.concepts if isinstance(program, ast.Program) else list(program)
    concepts = {ROOT: ConceptInfo(ROOT, None)}
    warnings: list[str] = []
    for d in decls:
        line, col = d.pos
        if d.name == ROOT:
            raise SemaError(f"concept name '{ROOT}' is reserved", line, col)
        if d.name in concepts:
            raise SemaError(f"duplicate concept '{d.name}'", line, col)
        info = ConceptInfo(d.name, d.parent or ROOT, decl=d)
        for side, body in ((REFERENCE, d.ref_body), (OBJECT, d.obj_body)):
            seen_fields = set()
            for f in body.fields:
                if f.name in seen_fields:
                    raise SemaError(f"duplicate {side} field '{f.name}' in concept '{d.name}'", *f.pos)
                seen_fields.add(f.name)
                info.fields(side).append(f)
            methods = info.methods(side)
            for m in body.methods:
                existing = methods.setdefault(m.name, [])
                clash = any(len(e.params) == len(m.params) for e in existing)
                if existing and (m.name != "create" or clash):
                    raise SemaError(f"duplicate {side} method '{m.name}' in concept '{d.name}'", *m.pos)
                existing.append(m)
        for name, ref_defs in info.ref_methods.items():
            obj_defs = info.obj_methods.get(name)
            if name == "create" or not obj_defs:
                continue
            if len(ref_defs[0].params) != len(obj_defs[0].params):
                warnings.append(
                    f"{ref_defs[0].pos[0]}:{ref_defs[0].pos[1]}: dual method '{name}' of "
                    f"'{d.name}' has differing parameter counts"
                )
        concepts[d.name] = info

    for d in decls:
        if d.parent is not None and d.parent not in concepts:
            raise SemaError(f"unknown parent concept '{d.parent}' of '{d.name}'", *d.pos)
    for d in decls:
        seen = {d.name}
        cur = concepts[d.name].parent
        while cur is not None:
            if cur in seen:
                raise SemaError(f"inclusion cycle through concept '{d.name}'", *d.pos)
            seen.add(cur)
            cur = concepts[cur].parent
    return ConceptTable(concepts, warnings)


def lineage(table: ConceptTable, c: str) -> list[str]:
    """Return ``[Root, ..., parent(c), c]``."""
    chain = []
    cur: Optional[str] = c
    while cur is not None:
        chain.append(cur)
        cur = table.concepts[cur].parent
    chain.reverse()
    return chain


def is_strictly_included(table: ConceptTable, child: str, ancestor: str) -> bool:
    """True iff *ancestor* is a proper ancestor of *child* (``child < ancestor``)."""
    if child == ancestor:
        return False
    return ancestor in lineage(table, child)


def is_included(table: ConceptTable, child: str, ancestor: str) -> bool:
    return child == ancestor or is_strictly_included(table, child, ancestor)


def lookup_member(table: ConceptTable, c: str, side: str, name: str, arity: Optional[int] = None):
    """Find *name* on one side of concept *c* only; no search through ancestors.

    Returns ``(c, decl)`` where decl is a MethodDecl or FieldDecl, or None.
    """
    info = table.concepts[c]
    m = info.method(side, name, arity)
    if m is not None:
        return c, m
    f = info.field(side, name)
    if f is not None:
        return c, f
    return None


# -- colon classification --------------------------------------------------


def _concept_valued(table: ConceptTable, env: Mapping[str, object], e) -> bool:
    if isinstance(e, ast.Name):
        return e.name in table and e.name not in env
    return isinstance(e, ast.TypeOp) and e.op in ("concept", "conceptof", "context")


def resolve_colon(table: ConceptTable, env_types: Mapping[str, object], expr: ast.Colon) -> str:
    """Classify a colon expression and record the result on the node.

    A name counts as a concept when the table knows it and no variable in
    *env_types* shadows it.  Runtime type operators (``instanceof``,
    ``contextof``) are treated as concept-valued too.
    """
    lhs_c = _concept_valued(table, env_types, expr.lhs) or _runtime_concept(expr.lhs)
    rhs_c = _concept_valued(table, env_types, expr.rhs) or _runtime_concept(expr.rhs)
    if lhs_c and rhs_c:
        if isinstance(expr.lhs, ast.Name) and isinstance(expr.rhs, ast.Name):
            kind = TYPED_DECL
        else:
            raise SemaError("colon between two concepts is not a value", *expr.pos)
    elif lhs_c:
        _require_value(expr.rhs, expr)
        kind = LEFT_CAST
    elif rhs_c:
        _require_value(expr.lhs, expr)
        kind = RIGHT_CAST
    else:
        _require_value(expr.lhs, expr)
        _require_value(expr.rhs, expr)
        kind = CONCATENATION
    expr.kind = kind
    return kind


def _runtime_concept(e) -> bool:
    return isinstance(e, ast.TypeOp) and e.op in ("instanceof", "contextof")


def _require_value(e, colon: ast.Colon) -> None:
    if isinstance(e, (ast.Literal, ast.Binary, ast.Unary)):
        raise SemaError(
            "colon operand is neither a concept name nor a reference-typed expression",
            *colon.pos,
        )


# -- whole-program analysis ------------------------------------------------


class _Scope(dict):
    def __init__(self, parent: Optional["_Scope"] = None):
        super().__init__()
        self.parent = parent

    def __contains__(self, name: object) -> bool:
        scope: Optional[_Scope] = self
        while scope is not None:
            if dict.__contains__(scope, name):
                return True
            scope = scope.parent
        return False


class _Checker:
    def __init__(self, table: ConceptTable):
        self.table = table

    def check_type(self, t: ast.TypeExpr) -> None:
        if t.is_builtin:
            return
        if t.concept not in self.table or t.concept == ROOT:
            raise SemaError(f"unknown type '{t.concept}'", *t.pos)
        if t.context is not None:
            if t.context not in self.table:
                raise SemaError(f"unknown context concept '{t.context}'", *t.pos)
            if not is_strictly_included(self.table, t.concept, t.context):
                raise SemaError(
                    f"context '{t.context}' is not a proper ancestor of '{t.concept}'", *t.pos
                )

    def expr(self, e, scope: _Scope, value: bool = True) -> None:
        if isinstance(e, ast.Colon):
            self.expr(e.lhs, scope, value=False)
            self.expr(e.rhs, scope, value=False)
            kind = resolve_colon(self.table, scope, e)
            if kind == TYPED_DECL:
                raise SemaError("a context type cannot be used as a value", *e.pos)
        elif isinstance(e, ast.Name):
            pass
        elif isinstance(e, ast.Member):
            self.expr(e.receiver, scope)
        elif isinstance(e, ast.MethodCall):
            self.expr(e.receiver, scope)
            for a in e.args:
                self.expr(a, scope)
        elif isinstance(e, ast.Call):
            for a in e.args:
                self.expr(a, scope)
        elif isinstance(e, ast.New):
            if not (e.type.is_builtin and e.type.concept == "Map"):
                self.check_type(e.type)
            for a in e.args:
                self.expr(a, scope)
        elif isinstance(e, ast.TypeOp):
            self.expr(e.operand, scope)
        elif isinstance(e, ast.Assign):
            self.expr(e.target, scope)
            self.expr(e.value, scope)
        elif isinstance(e, ast.Binary):
            self.expr(e.left, scope)
            self.expr(e.right, scope)
        elif isinstance(e, ast.Unary):
            self.expr(e.operand, scope)

    def stmt(self, s, scope: _Scope) -> None:
        if isinstance(s, ast.VarDecl):
            self.check_type(s.type)
            if s.init is not None:
                self.expr(s.init, scope)
            for a in s.create_args or ():
                self.expr(a, scope)
            scope[s.name] = s.type
        elif isinstance(s, ast.ExprStmt):
            self.expr(s.expr, scope)
        elif isinstance(s, ast.Block):
            inner = _Scope(scope)
            for x in s.body:
                self.stmt(x, inner)
        elif isinstance(s, ast.If):
            self.expr(s.cond, scope)
            self.stmt(s.then, _Scope(scope))
            if s.otherwise is not None:
                self.stmt(s.otherwise, _Scope(scope))
        elif isinstance(s, ast.While):
            self.expr(s.cond, scope)
            self.stmt(s.body, _Scope(scope))

    def callable_(self, m, scope: _Scope) -> None:
        if not (m.return_type.is_builtin and m.return_type.concept == "void"):
            self.check_type(m.return_type)
        inner = _Scope(scope)
        for p in m.params:
            self.check_type(p.type)
            inner[p.name] = p.type
        self.stmt(m.body, inner)


def analyze(program: ast.Program, table: Optional[ConceptTable] = None,
            global_names: Iterable[str] = ()) -> ConceptTable:
    """Build the concept table (unless given) and check the whole program.

    Raises :class:`SemaError` on the first problem.  Dual-method parameter
    count mismatches are collected in ``table.warnings`` instead.
    """
    if table is None:
        table = build_concept_table(program)
    checker = _Checker(table)
    globals_ = _Scope()
    for name in global_names:
        globals_[name] = None
    for item in program.items:
        if isinstance(item, ast.GlobalDecl):
            globals_[item.decl.name] = item.decl.type

    for decl in program.concepts:
        info = table[decl.name]
        for side in (REFERENCE, OBJECT):
            scope = _Scope(globals_)
            # fields of every concept on the lineage are reachable unqualified
            for c in lineage(table, decl.name):
                for f in table[c].fields(REFERENCE) + table[c].fields(OBJECT):
                    scope[f.name] = f.type
            for f in info.fields(side):
                checker.check_type(f.type)
                if f.init is not None:
                    checker.expr(f.init, globals_)
            for methods in info.methods(side).values():
                for m in methods:
                    checker.callable_(m, scope)

    main = _Scope(globals_)
    for item in program.items:
        if isinstance(item, ast.FunctionDecl):
            checker.callable_(item, globals_)
        elif isinstance(item, ast.GlobalDecl):
            checker.stmt(item.decl, globals_)
        else:
            checker.stmt(item, main)
    return table
