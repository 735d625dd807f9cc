"""Recursive-descent parser producing :mod:`copri.syntax` trees.

Operator precedence, tightest first::

    .  call        postfix
    -  !           unary
    *  /
    +  -
    == != < > <= >=
    &&
    ||
    :              right-associative
    =              right-associative

Colon expressions are left unclassified; :mod:`copri.sema` decides whether
each one is a cast or a concatenation.
"""

from __future__ import annotations

from copri import syntax as ast
from copri.errors import ParseError
from copri.lexer import BUILTIN_TYPES, EOF, IDENTIFIER, KEYWORD, LITERAL, PUNCT, Token, tokenize

_QUALIFIERS = ("this", "reference", "object", "super", "sub")
_MEMBER_KEYWORDS = ("continue", "create", "delete")
_COMPARISONS = ("==", "!=", "<", ">", "<=", ">=")


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token helpers -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        j = min(self.i + offset, len(self.tokens) - 1)
        return self.tokens[j]

    def at(self, lexeme: str, offset: int = 0) -> bool:
        return self.peek(offset).is_(lexeme)

    def at_kind(self, kind: str, offset: int = 0) -> bool:
        return self.peek(offset).kind == kind

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind != EOF:
            self.i += 1
        return tok

    def error(self, expected: str) -> ParseError:
        tok = self.peek()
        return ParseError(tok.line, tok.column, expected, tok.describe())

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            raise self.error(repr(lexeme))
        return self.advance()

    def accept(self, lexeme: str) -> bool:
        if self.at(lexeme):
            self.advance()
            return True
        return False

    def expect_ident(self, what: str = "identifier") -> Token:
        if not self.at_kind(IDENTIFIER):
            raise self.error(what)
        return self.advance()

    @staticmethod
    def pos(tok: Token) -> ast.Pos:
        return (tok.line, tok.column)

    # -- program -----------------------------------------------------------

    def parse_program(self) -> ast.Program:
        program = ast.Program()
        while not self.at_kind(EOF):
            if self.at("concept"):
                program.concepts.append(self.concept_decl())
            else:
                program.items.append(self.top_item())
        return program

    def concept_decl(self) -> ast.ConceptDecl:
        start = self.expect("concept")
        name = self.expect_ident("concept name").lexeme
        parent = None
        if self.accept("in"):
            parent = self.expect_ident("parent concept name").lexeme
        decl = ast.ConceptDecl(name, parent, pos=self.pos(start))
        seen = set()
        while self.at("reference") or self.at("object"):
            side_tok = self.peek()
            side = side_tok.lexeme
            # `reference` / `object` not followed by '{' is an expression, not a class
            if not self.at("{", 1):
                break
            if side in seen:
                raise ParseError(side_tok.line, side_tok.column,
                                 "at most one class per side", repr(side))
            self.advance()
            seen.add(side)
            body = self.class_body()
            if side == "reference":
                decl.ref_body = body
            else:
                decl.obj_body = body
        return decl

    def class_body(self) -> ast.ClassBody:
        start = self.expect("{")
        body = ast.ClassBody(pos=self.pos(start))
        while not self.at("}"):
            if self.at_kind(EOF):
                raise self.error("'}'")
            if self.accept("..."):
                continue
            if self.at("static"):
                raise self.error("member declaration ('static' is only allowed at top level)")
            type_ = self.type_expr(allow_void=True)
            name_tok = self.peek()
            if name_tok.kind == IDENTIFIER or (
                name_tok.kind == KEYWORD and name_tok.lexeme in _MEMBER_KEYWORDS
            ):
                self.advance()
            else:
                raise self.error("member name")
            if self.at("("):
                params = self.params()
                block = self.block()
                body.methods.append(
                    ast.MethodDecl(type_, name_tok.lexeme, params, block, pos=self.pos(name_tok))
                )
            else:
                if type_.concept == "void" or name_tok.kind == KEYWORD:
                    raise self.error("'('")
                init = self.expression() if self.accept("=") else None
                self.expect(";")
                body.fields.append(ast.FieldDecl(type_, name_tok.lexeme, init, pos=self.pos(name_tok)))
        self.expect("}")
        return body

    def params(self) -> list[ast.Param]:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                type_ = self.type_expr()
                name = self.expect_ident("parameter name")
                params.append(ast.Param(type_, name.lexeme, pos=self.pos(name)))
                if not self.accept(","):
                    break
        self.expect(")")
        return params

    def top_item(self):
        tok = self.peek()
        if self.accept("static"):
            decl = self.var_decl(self.type_expr(), allow_create=False)
            return ast.GlobalDecl(decl, pos=self.pos(tok))
        if self.at("void") or self.at_decl():
            save = self.i
            type_ = self.type_expr(allow_void=True)
            if self.at_kind(IDENTIFIER) and self.at("(", 1):
                name = self.advance()
                params = self.params()
                body = self.block()
                return ast.FunctionDecl(type_, name.lexeme, params, body, pos=self.pos(name))
            if type_.concept == "void":
                raise self.error("function name followed by '('")
            self.i = save
        return self.statement()

    # -- types -------------------------------------------------------------

    def at_decl(self) -> bool:
        t0 = self.peek()
        if t0.kind == KEYWORD and t0.lexeme in BUILTIN_TYPES and t0.lexeme != "void":
            return True
        if t0.kind != IDENTIFIER:
            return False
        if self.at_kind(IDENTIFIER, 1):
            return True
        return self.at(":", 1) and self.at_kind(IDENTIFIER, 2) and self.at_kind(IDENTIFIER, 3)

    def type_expr(self, allow_void: bool = False) -> ast.TypeExpr:
        tok = self.peek()
        if tok.kind == KEYWORD and tok.lexeme in BUILTIN_TYPES:
            if tok.lexeme == "void" and not allow_void:
                raise self.error("type")
            self.advance()
            length = None
            if tok.lexeme == "char" and self.accept("["):
                size = self.peek()
                if size.kind != LITERAL or not isinstance(size.value, int):
                    raise self.error("array length")
                self.advance()
                length = size.value
                self.expect("]")
            return ast.TypeExpr(tok.lexeme, is_builtin=True, length=length, pos=self.pos(tok))
        name = self.expect_ident("type")
        if self.at(":") and self.at_kind(IDENTIFIER, 1):
            self.advance()
            inner = self.advance()
            return ast.TypeExpr(inner.lexeme, context=name.lexeme, pos=self.pos(name))
        return ast.TypeExpr(name.lexeme, pos=self.pos(name))

    # -- statements --------------------------------------------------------

    def block(self) -> ast.Block:
        start = self.expect("{")
        body = []
        while not self.at("}"):
            if self.at_kind(EOF):
                raise self.error("'}'")
            body.append(self.statement())
        self.expect("}")
        return ast.Block(body, pos=self.pos(start))

    def statement(self):
        tok = self.peek()
        if self.at("{"):
            return self.block()
        if self.accept("if"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            then = self.statement()
            otherwise = self.statement() if self.accept("else") else None
            return ast.If(cond, then, otherwise, pos=self.pos(tok))
        if self.accept("while"):
            self.expect("(")
            cond = self.expression()
            self.expect(")")
            return ast.While(cond, self.statement(), pos=self.pos(tok))
        if self.at_decl():
            return self.var_decl(self.type_expr())
        expr = self.expression()
        self.expect(";")
        return ast.ExprStmt(expr, pos=self.pos(tok))

    def var_decl(self, type_: ast.TypeExpr, allow_create: bool = True) -> ast.VarDecl:
        name = self.expect_ident("variable name")
        decl = ast.VarDecl(type_, name.lexeme, pos=self.pos(name))
        if self.accept("="):
            decl.init = self.expression()
        elif allow_create and self.at(".") and self.at("create", 1):
            self.advance()
            self.advance()
            decl.create_args = self.args()
        self.expect(";")
        return decl

    # -- expressions -------------------------------------------------------

    def expression(self):
        return self.assignment()

    def assignment(self):
        tok = self.peek()
        target = self.colon()
        if self.at("="):
            eq = self.advance()
            if not isinstance(target, (ast.Name, ast.Member, ast.ReturnVar)):
                raise ParseError(eq.line, eq.column, "assignable expression before '='", "'='")
            value = self.assignment()
            return ast.Assign(target, value, pos=self.pos(tok))
        return target

    def colon(self):
        tok = self.peek()
        lhs = self.logic_or()
        if self.accept(":"):
            rhs = self.colon()
            return ast.Colon(lhs, rhs, pos=self.pos(tok))
        return lhs

    def logic_or(self):
        left = self.logic_and()
        while self.at("||"):
            op = self.advance()
            left = ast.Binary("||", left, self.logic_and(), pos=self.pos(op))
        return left

    def logic_and(self):
        left = self.comparison()
        while self.at("&&"):
            op = self.advance()
            left = ast.Binary("&&", left, self.comparison(), pos=self.pos(op))
        return left

    def comparison(self):
        left = self.additive()
        while self.peek().kind == PUNCT and self.peek().lexeme in _COMPARISONS:
            op = self.advance()
            left = ast.Binary(op.lexeme, left, self.additive(), pos=self.pos(op))
        return left

    def additive(self):
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.advance()
            left = ast.Binary(op.lexeme, left, self.multiplicative(), pos=self.pos(op))
        return left

    def multiplicative(self):
        left = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            left = ast.Binary(op.lexeme, left, self.unary(), pos=self.pos(op))
        return left

    def unary(self):
        if self.at("-") or self.at("!"):
            op = self.advance()
            return ast.Unary(op.lexeme, self.unary(), pos=self.pos(op))
        return self.postfix()

    def postfix(self):
        expr = self.primary()
        while self.at("."):
            self.advance()
            name_tok = self.peek()
            if name_tok.kind == IDENTIFIER or (
                name_tok.kind == KEYWORD and name_tok.lexeme in _MEMBER_KEYWORDS
            ):
                self.advance()
            else:
                raise self.error("member name")
            if self.at("("):
                expr = ast.MethodCall(expr, name_tok.lexeme, self.args(), pos=self.pos(name_tok))
            else:
                if name_tok.kind == KEYWORD:
                    raise self.error("'('")
                expr = ast.Member(expr, name_tok.lexeme, pos=self.pos(name_tok))
        return expr

    def args(self) -> list:
        self.expect("(")
        args = []
        if not self.at(")"):
            while True:
                args.append(self.expression())
                if not self.accept(","):
                    break
        self.expect(")")
        return args

    def primary(self):
        tok = self.peek()
        pos = self.pos(tok)
        if tok.kind == LITERAL:
            self.advance()
            return ast.Literal(tok.value, pos=pos)
        if tok.kind == IDENTIFIER:
            self.advance()
            if self.at("("):
                args = self.args()
                if tok.lexeme in ast.TYPE_OPERATORS:
                    if len(args) != 1:
                        raise ParseError(tok.line, tok.column, "exactly one operand",
                                         f"{len(args)} operands")
                    return ast.TypeOp(tok.lexeme, args[0], pos=pos)
                return ast.Call(tok.lexeme, args, pos=pos)
            return ast.Name(tok.lexeme, pos=pos)
        if tok.kind == KEYWORD:
            word = tok.lexeme
            if word in ("true", "false", "null"):
                self.advance()
                return ast.Literal({"true": True, "false": False, "null": None}[word], pos=pos)
            if word in _QUALIFIERS:
                self.advance()
                return ast.Qualifier(word, pos=pos)
            if word == "return":
                self.advance()
                return ast.ReturnVar(pos=pos)
            if word == "continue":
                self.advance()
                self.expect("(")
                self.expect(")")
                return ast.BareContinue(pos=pos)
            if word == "concept":
                self.advance()
                args = self.args()
                if len(args) != 1:
                    raise ParseError(tok.line, tok.column, "exactly one operand", f"{len(args)} operands")
                return ast.TypeOp("concept", args[0], pos=pos)
            if word == "new":
                self.advance()
                type_ = self.type_expr()
                return ast.New(type_, self.args(), pos=pos)
        if self.accept("("):
            expr = self.expression()
            self.expect(")")
            return expr
        raise self.error("expression")


def parse_program(tokens: list[Token]) -> ast.Program:
    """Parse a token list produced by :func:`copri.lexer.tokenize`."""
    return Parser(tokens).parse_program()


def parse_source(source: str) -> ast.Program:
    return parse_program(tokenize(source))


def parse_expression(source: str):
    """Parse a single expression (an optional trailing ``;`` is allowed)."""
    parser = Parser(tokenize(source))
    expr = parser.expression()
    parser.accept(";")
    if not parser.at_kind(EOF):
        raise parser.error("end of input")
    return expr
