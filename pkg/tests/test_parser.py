import pytest

from copri import syntax as ast
from copri.errors import ParseError
from copri.parser import parse_expression, parse_source
from copri.printer import print_expr, print_program

CONCEPT_BASICS = """
concept Account
  reference {
    char[10] accNo;
    ...
  }
  object {
    double balance;
    ...
  }
"""


def test_concept_basics():
    prog = parse_source(CONCEPT_BASICS)
    (c,) = prog.concepts
    assert c.name == "Account" and c.parent is None
    assert [f.name for f in c.ref_body.fields] == ["accNo"]
    assert c.ref_body.fields[0].type.length == 10
    assert [f.name for f in c.obj_body.fields] == ["balance"]


def test_empty_bodies():
    (c,) = parse_source("concept A reference {} object {}").concepts
    assert c.ref_body == ast.ClassBody() and c.obj_body == ast.ClassBody()


def test_missing_body_is_empty():
    (c,) = parse_source("concept A in B object { int x; }").concepts
    assert c.parent == "B" and c.ref_body.fields == []


def test_new_initializer():
    prog = parse_source("SavingsAccount acc = new SavingsAccount();")
    (decl,) = prog.items
    assert isinstance(decl, ast.VarDecl) and isinstance(decl.init, ast.New)
    assert decl.init.type.concept == "SavingsAccount"


def test_create_declaration():
    (decl,) = parse_source("Account account.create(1, 2);").items
    assert decl.create_args == [ast.Literal(1), ast.Literal(2)]


def test_special_methods_flagged():
    prog = parse_source("concept A reference { void continue() { } void create(int x) { } } object { }")
    assert all(m.is_special for m in prog.concepts[0].ref_body.methods)


def test_return_assignment_and_bare_continue():
    prog = parse_source("concept A reference { } object { void continue() { continue(); } double f() { return = 1; } }")
    cont, f = prog.concepts[0].obj_body.methods
    assert isinstance(cont.body.body[0].expr, ast.BareContinue)
    assign = f.body.body[0].expr
    assert isinstance(assign, ast.Assign) and isinstance(assign.target, ast.ReturnVar)


def test_static_global_and_function():
    prog = parse_source("static Map map = new Map();\nint f(int a) { return = a; }")
    g, f = prog.items
    assert isinstance(g, ast.GlobalDecl) and g.decl.name == "map"
    assert isinstance(f, ast.FunctionDecl) and [p.name for p in f.params] == ["a"]


def test_static_inside_class_rejected():
    with pytest.raises(ParseError):
        parse_source("concept A reference { static int x; } object { }")


def test_context_typed_declaration():
    (decl,) = parse_source("Bank : Account account = getAccount();").items
    assert decl.type.context == "Bank" and decl.type.concept == "Account"


def test_colon_expressions_stay_unclassified():
    e = parse_expression("bank : account")
    assert isinstance(e, ast.Colon) and e.kind is None


def test_null_literal():
    assert parse_expression("null") == ast.Literal(None)


def test_parenthesized_colon_call():
    e = parse_expression("(bank : account).getBalance()")
    assert isinstance(e, ast.MethodCall) and isinstance(e.receiver, ast.Colon)


def test_colon_is_right_associative_and_loose():
    e = parse_expression("a : b : c")
    assert isinstance(e.rhs, ast.Colon)
    e = parse_expression("x = a + b : c")
    assert isinstance(e, ast.Assign) and isinstance(e.value, ast.Colon)
    assert isinstance(e.value.lhs, ast.Binary)


def test_precedence():
    e = parse_expression("1 + 2 * 3 == 7 && !false")
    assert e.op == "&&" and e.left.op == "==" and e.left.left.op == "+"


def test_type_operators():
    e = parse_expression("account : conceptof(account)")
    assert e.rhs == ast.TypeOp("conceptof", ast.Name("account"))


def test_qualified_access():
    e = parse_expression("super.map.get(this.subAccNo)")
    assert e.receiver == ast.Member(ast.Qualifier("super"), "map")
    assert e.args == [ast.Member(ast.Qualifier("this"), "subAccNo")]


@pytest.mark.parametrize("src,line,col", [
    ("concept A reference { int x } object {}", 1, 29),
    ("int x = 1;\n\nx = ;", 3, 5),
    ("concept A\n  reference {}\n  reference {}", 3, 3),
    ("if (x) {", 1, 9),
])
def test_parse_error_positions(src, line, col):
    with pytest.raises(ParseError) as e:
        parse_source(src)
    assert (e.value.line, e.value.column) == (line, col)


def test_round_trip_corpus(corpus_dir):
    files = sorted(corpus_dir.glob("*.cop"))
    assert files
    for path in files:
        tree = parse_source(path.read_text())
        printed = print_program(tree)
        assert parse_source(printed) == tree, path.name
        assert print_program(parse_source(printed)) == printed


@pytest.mark.parametrize("src", [
    "a = b = 1", "-(1 - 2) * 3", "x.f(1, \"s\\\"q\", null, true)", "(a : B) : c",
    "instanceof(x) == C", "!(a || b) && c", "0.5 / 2",
])
def test_expression_round_trip(src):
    e = parse_expression(src)
    assert parse_expression(print_expr(e, top=True)) == e
