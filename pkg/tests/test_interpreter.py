import pytest

from copri.errors import (
    EvalError, PrintError, TypeMismatchError, TypeOperatorError, UndefinedNameError,
    WideningUnavailableError,
)

from conftest import run


@pytest.mark.parametrize("expr,shown", [
    ("7 / 2", "3"),
    ("-7 / 2", "-3"),
    ("7.0 / 2", "3.5"),
    ("1 + 2 * 3", "7"),
    ("(1 + 2) * 3", "9"),
    ('"a" + 1', "a1"),
    ('"s" + 2.5', "s2.5"),
    ("true && false", "false"),
    ("1 < 2 || false", "true"),
    ("!true", "false"),
    ("3 == 3.0", "true"),
    ('"a" == "a"', "true"),
    ("0.1 + 0.2", "0.30000000000000004"),
    ("2.0 * 5", "10"),
])
def test_expressions(expr, shown):
    assert run(f"print({expr});") == shown + "\n"


def test_variables_and_loops():
    src = """
int i = 0;
int total = 0;
while (i < 4) { total = total + i; i = i + 1; }
if (total > 5) print("big " + total); else print("small");
"""
    assert run(src) == "big 6\n"


def test_defaults():
    assert run("int i; double d; boolean b; String s; print(i); print(d); print(b); print(s + \"|\");") == "0\n0\nfalse\n|\n"


def test_int_widens_to_double():
    assert run("double d = 1; d = d / 2; print(d);") == "0.5\n"


def test_functions_and_recursion():
    src = "int fact(int n) { if (n < 2) return = 1; else return = n * fact(n - 1); }\nprint(fact(10));"
    assert run(src) == "3628800\n"


def test_static_globals_visible_in_methods():
    src = """
static int count = 0;
concept A reference { } object { void m() { count = count + 1; } }
A a = new A();
a.m(); a.m();
print(count);
"""
    assert run(src) == "2\n"


@pytest.mark.parametrize("src,err", [
    ("if (1) print(1);", TypeMismatchError),
    ("print(null);", PrintError),
    ("print(y);", UndefinedNameError),
    ("print(1 / 0);", EvalError),
    ('int x = "a";', TypeMismatchError),
])
def test_runtime_errors(src, err):
    with pytest.raises(err):
        run(src)


def test_error_positions_point_at_statement():
    with pytest.raises(UndefinedNameError, match=r"<input>:2:7"):
        run("print(1);\nprint(zz);")


def test_type_operators_in_language():
    src = """
concept Bank reference { } object { }
concept Account in Bank reference { } object { }
Bank b = new Bank();
Account a = new Account();
Bank asBank = a:Bank;
print(conceptof(asBank));
print(instanceof(a));
print(contextof(a));
Bank : Account local = Bank:a;
print(context(local));
print(contextof(local));
print(instanceof(a) == Account);
"""
    assert run(src) == "Bank\nAccount\nRoot\nBank\nBank\ntrue\n"


def test_type_operator_needs_reference():
    with pytest.raises(TypeOperatorError):
        run("int x = 1; print(instanceof(x));")


def test_widening_needs_enclosing_access():
    src = """
concept Bank reference { } object { }
concept Account in Bank reference { } object { }
Account a = new Account();
Bank : Account local = Bank:a;
Account g = Root:local;
"""
    with pytest.raises(WideningUnavailableError):
        run(src)


def test_assigning_wrong_concept_fails():
    src = """
concept A reference { } object { }
concept B reference { } object { }
A a = new A();
B b = a;
"""
    with pytest.raises(TypeMismatchError):
        run(src)


def test_reference_equality_with_null_is_rejected():
    src = "concept A reference { } object { }\nA a = new A();\nprint(a == null);"
    with pytest.raises(EvalError):
        run(src)


def test_corpus_references_golden(corpus_dir):
    src = (corpus_dir / "references.cop").read_text()
    assert run(src) == (corpus_dir / "references.expected").read_text()
