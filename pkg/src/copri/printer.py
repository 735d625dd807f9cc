"""Canonical source printer for ASTs.

The output re-parses to a structurally equal tree.  Every compound
subexpression is parenthesized, so precedence never has to be reconstructed.
Dangling ``else`` needs no care: a parsed tree only nests an else-less ``if``
under an ``if`` with an ``else`` when the source used braces, which survive as
a Block node.
"""

from __future__ import annotations

from decimal import Decimal

from copri import syntax as ast

INDENT = "  "


def format_literal(value: object) -> str:
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        escaped = (
            value.replace("\\", "\\\\").replace('"', '\\"')
            .replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r").replace("\0", "\\0")
        )
        return f'"{escaped}"'
    if isinstance(value, float):
        text = format(Decimal(repr(value)), "f")
        return text if "." in text else text + ".0"
    return str(value)


def print_type(t: ast.TypeExpr) -> str:
    return str(t)


def print_expr(e, top: bool = False) -> str:
    if isinstance(e, ast.Literal):
        return format_literal(e.value)
    if isinstance(e, ast.Name):
        return e.name
    if isinstance(e, ast.Qualifier):
        return e.kind
    if isinstance(e, ast.ReturnVar):
        return "return"
    if isinstance(e, ast.BareContinue):
        return "continue()"
    if isinstance(e, ast.Member):
        return f"{print_expr(e.receiver)}.{e.name}"
    if isinstance(e, ast.MethodCall):
        return f"{print_expr(e.receiver)}.{e.name}({_args(e.args)})"
    if isinstance(e, ast.Call):
        return f"{e.name}({_args(e.args)})"
    if isinstance(e, ast.TypeOp):
        return f"{e.op}({print_expr(e.operand, top=True)})"
    if isinstance(e, ast.New):
        return f"new {print_type(e.type)}({_args(e.args)})"
    if isinstance(e, ast.Colon):
        text = f"{print_expr(e.lhs)} : {print_expr(e.rhs)}"
    elif isinstance(e, ast.Binary):
        text = f"{print_expr(e.left)} {e.op} {print_expr(e.right)}"
    elif isinstance(e, ast.Unary):
        text = f"{e.op}{print_expr(e.operand)}"
    elif isinstance(e, ast.Assign):
        text = f"{print_expr(e.target)} = {print_expr(e.value, top=True)}"
    else:
        raise TypeError(f"cannot print {type(e).__name__}")
    return text if top else f"({text})"


def _args(args) -> str:
    return ", ".join(print_expr(a, top=True) for a in args)


def _params(params) -> str:
    return ", ".join(f"{print_type(p.type)} {p.name}" for p in params)


def print_stmt(s, depth: int = 0) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, ast.VarDecl):
        head = f"{pad}{print_type(s.type)} {s.name}"
        if s.init is not None:
            return [f"{head} = {print_expr(s.init, top=True)};"]
        if s.create_args is not None:
            return [f"{head}.create({_args(s.create_args)});"]
        return [f"{head};"]
    if isinstance(s, ast.ExprStmt):
        return [f"{pad}{print_expr(s.expr, top=True)};"]
    if isinstance(s, ast.Block):
        lines = [f"{pad}{{"]
        for inner in s.body:
            lines.extend(print_stmt(inner, depth + 1))
        lines.append(f"{pad}}}")
        return lines
    if isinstance(s, ast.If):
        lines = [f"{pad}if ({print_expr(s.cond, top=True)})"]
        lines.extend(print_stmt(s.then, depth))
        if s.otherwise is not None:
            lines.append(f"{pad}else")
            lines.extend(print_stmt(s.otherwise, depth))
        return lines
    if isinstance(s, ast.While):
        lines = [f"{pad}while ({print_expr(s.cond, top=True)})"]
        lines.extend(print_stmt(s.body, depth))
        return lines
    raise TypeError(f"cannot print {type(s).__name__}")


def _method(m, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = [f"{pad}{print_type(m.return_type)} {m.name}({_params(m.params)})"]
    lines.extend(print_stmt(m.body, depth))
    return lines


def _class(side: str, body: ast.ClassBody, depth: int) -> list[str]:
    pad = INDENT * depth
    lines = [f"{pad}{side} {{"]
    for f in body.fields:
        init = f" = {print_expr(f.init, top=True)}" if f.init is not None else ""
        lines.append(f"{pad}{INDENT}{print_type(f.type)} {f.name}{init};")
    for m in body.methods:
        lines.extend(_method(m, depth + 1))
    lines.append(f"{pad}}}")
    return lines


def print_program(program: ast.Program) -> str:
    lines: list[str] = []
    for c in program.concepts:
        head = f"concept {c.name}" + (f" in {c.parent}" if c.parent else "")
        lines.append(head)
        lines.extend(_class("reference", c.ref_body, 1))
        lines.extend(_class("object", c.obj_body, 1))
    for item in program.items:
        if isinstance(item, ast.GlobalDecl):
            (line,) = print_stmt(item.decl)
            lines.append(f"static {line}")
        elif isinstance(item, ast.FunctionDecl):
            lines.extend(_method(item, 0))
        else:
            lines.extend(print_stmt(item))
    return "\n".join(lines) + "\n"
