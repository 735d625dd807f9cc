"""Access pipeline: reference interception, meta-transition, object chain."""

import pytest

from copri.errors import (
    ArityError, SemaError, StackOrderError, IllegalQualifierError, ResolutionError, UnknownMethodError,
)

from conftest import run, run_with_events
from oracles import run_access

THREE = """
concept A
  reference { void m() { print("A ref in"); sub.m(); print("A ref out"); } }
  object { void m() { print("A obj in"); super.m(); print("A obj out"); } }
concept B in A
  reference { void m() { print("B ref in"); sub.m(); print("B ref out"); } }
  object { void m() { print("B obj in"); super.m(); print("B obj out"); } }
concept C in B
  reference { void m() { print("C ref in"); sub.m(); print("C ref out"); } }
  object { void m() { print("C obj in"); super.m(); print("C obj out"); } }
"""


def test_dual_method_full_pipeline():
    out = run(THREE + "C c = new C();\nc.m();\n")
    assert out.splitlines() == [
        "A ref in", "B ref in", "C ref in",
        "C obj in", "B obj in", "A obj in", "A obj out", "B obj out", "C obj out",
        "C ref out", "B ref out", "A ref out",
    ]


def test_parent_reference_method_intercepts_even_when_declared_as_parent():
    out = run(THREE + "C c = new C();\nA a = c;\na.m();\n")
    assert out.splitlines()[0] == "A ref in"
    assert out.splitlines()[3] == "C obj in"


def test_reference_method_can_skip_child():
    src = """
concept A
  reference { void m() { print("blocked"); } }
  object { void m() { print("A obj"); } }
concept B in A
  reference { void m() { print("B ref"); sub.m(); } }
  object { void m() { print("B obj"); } }
"""
    events, out, _ = run_access(src, "B")
    assert out == "blocked\n"
    assert not [e for e in events if e[0] in ("resolve", "push", "target")]


def test_missing_reference_methods_pass_through():
    src = """
concept A reference { } object { void m() { print("A obj"); } }
concept B in A reference { void m() { print("B ref"); sub.m(); } } object { }
B b = new B();
b.m();
"""
    assert run(src) == "B ref\nA obj\n"


def test_reference_only_method_never_resolves():
    src = """
concept A reference { int n; int get() { return = n + 1; } } object { }
"""
    events, out, _ = run_access(src, "A", "print(v.get());")
    assert out == "1\n"
    assert [e[0] for e in events] == ["ref-enter", "ref-exit"]


def test_return_values_flow_back():
    src = """
concept A
  reference { int m() { return = sub.m() * 10; } }
  object { int m() { return = 4; } }
A a = new A();
print(a.m());
"""
    assert run(src) == "40\n"


def test_object_method_sees_this_object_fields():
    src = """
concept A reference { } object { int x = 1; void bump() { x = x + 1; } int get() { return = x; } }
A a = new A();
a.bump(); a.bump();
print(a.get());
A b = a;
b.bump();
print(a.get());
"""
    assert run(src) == "3\n4\n"


def test_user_continue_is_called_once_per_segment():
    src = """
static int n = 0;
concept A
  reference { Object h; void create() { h.create(); sub.create(); }
              void continue() { n = n + 1; h.continue(); sub.continue(); } }
  object { void m() { print("m"); } void f() { } }
concept B in A reference { } object { void m() { super.m(); super.f(); this.f(); } }
B b = new B();
n = 0;
b.m();
print(n);
"""
    assert run(src) == "m\n1\n"


def test_continue_brackets_the_target():
    src = """
concept A
  reference {
    Object h;
    void create() { h.create(); sub.create(); }
    void continue() { print("before"); h.continue(); sub.continue(); print("after"); }
  }
  object { void m() { print("target"); } }
A a = new A();
a.m();
"""
    assert run(src) == "before\ntarget\nafter\n"


def test_continue_that_never_resolves_is_an_error():
    src = """
concept A
  reference { Object h; void create() { h.create(); sub.create(); } void continue() { } }
  object { void m() { print("target"); } }
A a = new A();
a.m();
"""
    with pytest.raises(ResolutionError):
        run(src)


def test_unresolved_extension_segment_fails():
    src = """
concept A reference { } object { void m() { print("m"); } }
concept B in A reference { } object { }
A a = new A();
B b = a:B;
b.m();
"""
    with pytest.raises(ResolutionError):
        run(src)


def test_unknown_method():
    with pytest.raises(UnknownMethodError):
        run("concept A reference { } object { }\nA a = new A();\na.nope();\n")


def test_special_methods_are_not_directly_callable():
    with pytest.raises(IllegalQualifierError):
        run("concept A reference { } object { }\nA a = new A();\na.continue();\n")


def test_arity_mismatch():
    src = "concept A reference { } object { void m(int x) { } }\nA a = new A();\na.m();\n"
    with pytest.raises(ArityError):
        run(src)


def test_same_side_overloads_rejected():
    src = """
concept A reference { } object {
  void m() { print("zero"); }
  void m(int x) { print("one " + x); }
}
"""
    with pytest.raises(SemaError):
        run(src)


def test_context_stack_is_empty_after_each_access():
    out, events, interp = run_with_events(THREE + "C c = new C();\nc.m();\nc.m();\n")
    assert [e for e in events if e.kind == "pop"]
    assert not interp.accesses


def test_context_stack_cleared_after_error():
    src = """
concept A reference { } object { void m() { print(1 / 0); } void ok() { print("ok"); } }
A a = new A();
a.m();
"""
    from copri.interpreter import load_program, Interpreter
    program, table = load_program(src)
    interp = Interpreter(program, table, None)
    with pytest.raises(Exception):
        interp.run()
    assert not interp.accesses


def test_nested_access_inside_object_method():
    src = """
concept Log reference { } object { void say(String s) { print("log " + s); } }
static Log log = new Log();
concept A reference { } object { void m() { log.say("from A"); print("A done"); } }
A a = new A();
a.m();
"""
    assert run(src) == "log from A\nA done\n"


# -- lifecycle -----------------------------------------------------------------

LIFE = """
concept P
  reference { }
  object { void create() { print("P obj create"); } void delete() { print("P obj delete"); } }
concept Q in P
  reference { }
  object { int v; void create(int x) { v = x; print("Q obj create " + x); } void delete() { print("Q obj delete"); } }
"""


def test_default_create_runs_parent_first_and_passes_args():
    out = run(LIFE + "Q q = new Q(5);\n")
    assert out.splitlines() == ["P obj create", "Q obj create 5"]


def test_create_without_allocation_cannot_resolve_child():
    src = """
concept P reference { void create() { sub.create(); } } object { }
concept Q in P reference { } object { }
Q q = new Q();
"""
    with pytest.raises(StackOrderError):
        run(src)


def test_default_delete_children_first():
    out, _, interp = run_with_events(LIFE + "Q q = new Q(5);\nq.delete();\n")
    lines = out.splitlines()
    assert lines[-2:] == ["Q obj delete", "P obj delete"]
    assert interp.store.alive_count == 0


def test_create_delete_restores_alive_count():
    src = LIFE + "Q q;\n" + "q = new Q(1);\nq.delete();\n" * 20
    _, _, interp = run_with_events(src)
    assert interp.store.alive_count == 0


def test_create_arity_error():
    src = "concept A reference { } object { void create(int a, int b) { } }\nA a = new A(1);\n"
    with pytest.raises(ArityError):
        run(src)


def test_access_after_delete_fails():
    src = "concept A reference { } object { void m() { } }\nA a = new A();\na.delete();\na.m();\n"
    with pytest.raises(ResolutionError, match="deleted"):
        run(src)


def test_lifecycle_golden(corpus_dir):
    out_lines = (corpus_dir / "lifecycle.expected").read_text().splitlines()
    assert out_lines[:4] == [
        "=> Account: Create reference", "-> Account: Create object",
        "<- Account: Create object", "<= Account: Create reference",
    ]
    assert out_lines[4:] == [
        "=> Account: Delete reference", "-> Account: Delete object",
        "<- Account: Delete object", "<= Account: Delete reference",
    ]


def test_local_reference_to_nested_instance():
    src = """
concept Bank reference { } object { String name = "bank"; }
concept Account in Bank reference { } object { String who() { return = "acc of " + name; } }
Account a = new Account();
print(a.who());
"""
    assert run(src) == "acc of bank\n"


def test_trace_event_shape():
    out, events, _ = run_with_events(THREE + "C c = new C();\nc.m();\n")
    last = events[-1]
    assert last.format().startswith("EVT ")
    assert len(last.format().split()) == 6
