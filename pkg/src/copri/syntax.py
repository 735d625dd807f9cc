"""AST node definitions.

Every node carries a ``pos`` (line, column) that is excluded from equality,
so two trees parsed from differently formatted sources compare equal when
their structure matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Pos = tuple[int, int]


def _pos() -> Pos:
    return field(default=(0, 0), compare=False, repr=False)


# -- types -----------------------------------------------------------------


@dataclass
class TypeExpr:
    concept: str
    context: Optional[str] = None
    is_builtin: bool = False
    length: Optional[int] = None  # char[N]
    pos: Pos = _pos()

    def __str__(self) -> str:
        base = self.concept if self.length is None else f"{self.concept}[{self.length}]"
        return f"{self.context} : {base}" if self.context else base


# -- expressions -----------------------------------------------------------


@dataclass
class Literal:
    value: object  # int, float, str, bool or None (null)
    pos: Pos = _pos()


@dataclass
class Name:
    name: str
    pos: Pos = _pos()


@dataclass
class Qualifier:
    """One of this / reference / object / super / sub used as a receiver or value."""

    kind: str
    pos: Pos = _pos()


@dataclass
class ReturnVar:
    pos: Pos = _pos()


@dataclass
class Member:
    receiver: "Expr"
    name: str
    pos: Pos = _pos()


@dataclass
class MethodCall:
    receiver: "Expr"
    name: str
    args: list["Expr"]
    pos: Pos = _pos()


@dataclass
class Call:
    """Unqualified call ``name(args)``."""

    name: str
    args: list["Expr"]
    pos: Pos = _pos()


@dataclass
class BareContinue:
    pos: Pos = _pos()


@dataclass
class New:
    type: TypeExpr
    args: list["Expr"]
    pos: Pos = _pos()


@dataclass
class Colon:
    lhs: "Expr"
    rhs: "Expr"
    # filled by sema: typed-decl | left-cast | right-cast | concatenation
    kind: Optional[str] = field(default=None, compare=False)
    pos: Pos = _pos()


TYPE_OPERATORS = ("concept", "conceptof", "instanceof", "contextof", "context")


@dataclass
class TypeOp:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


@dataclass
class Assign:
    target: "Expr"
    value: "Expr"
    pos: Pos = _pos()


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()


@dataclass
class Unary:
    op: str
    operand: "Expr"
    pos: Pos = _pos()


Expr = Union[
    Literal, Name, Qualifier, ReturnVar, Member, MethodCall, Call, BareContinue,
    New, Colon, TypeOp, Assign, Binary, Unary,
]


# -- statements ------------------------------------------------------------


@dataclass
class VarDecl:
    type: TypeExpr
    name: str
    init: Optional[Expr] = None
    create_args: Optional[list[Expr]] = None  # `T v.create(args);`
    pos: Pos = _pos()


@dataclass
class ExprStmt:
    expr: Expr
    pos: Pos = _pos()


@dataclass
class If:
    cond: Expr
    then: "Stmt"
    otherwise: Optional["Stmt"] = None
    pos: Pos = _pos()


@dataclass
class While:
    cond: Expr
    body: "Stmt"
    pos: Pos = _pos()


@dataclass
class Block:
    body: list["Stmt"]
    pos: Pos = _pos()


Stmt = Union[VarDecl, ExprStmt, If, While, Block]


# -- declarations ----------------------------------------------------------


@dataclass
class Param:
    type: TypeExpr
    name: str
    pos: Pos = _pos()


@dataclass
class FieldDecl:
    type: TypeExpr
    name: str
    init: Optional[Expr] = None
    pos: Pos = _pos()


SPECIAL_METHODS = ("continue", "create", "delete")


@dataclass
class MethodDecl:
    return_type: TypeExpr
    name: str
    params: list[Param]
    body: Block
    pos: Pos = _pos()

    @property
    def is_special(self) -> bool:
        return self.name in SPECIAL_METHODS


@dataclass
class ClassBody:
    fields: list[FieldDecl] = field(default_factory=list)
    methods: list[MethodDecl] = field(default_factory=list)
    pos: Pos = _pos()


@dataclass
class ConceptDecl:
    name: str
    parent: Optional[str]
    ref_body: ClassBody = field(default_factory=ClassBody)
    obj_body: ClassBody = field(default_factory=ClassBody)
    pos: Pos = _pos()


@dataclass
class GlobalDecl:
    decl: VarDecl
    pos: Pos = _pos()


@dataclass
class FunctionDecl:
    return_type: TypeExpr
    name: str
    params: list[Param]
    body: Block
    pos: Pos = _pos()


TopItem = Union[GlobalDecl, FunctionDecl, VarDecl, ExprStmt, If, While, Block]


@dataclass
class Program:
    concepts: list[ConceptDecl] = field(default_factory=list)
    items: list[TopItem] = field(default_factory=list)
