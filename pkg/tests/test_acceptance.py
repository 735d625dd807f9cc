"""Acceptance criteria 1-11.

Each test prints one ``criterion N: PASS|FAIL ...`` line to the terminal,
even when pytest captures output.  Run this file directly with
``python tests/test_acceptance.py`` for the same report without pytest.
"""

import io
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from copri import syntax as ast  # noqa: E402
from copri.host import EXIT_OK, EXIT_RUNTIME, execute  # noqa: E402
from copri.interpreter import Interpreter, load_program  # noqa: E402
from copri.refops import (  # noqa: E402
    check_assignable, concat_references, left_cast, real_concept, real_context, right_cast,
)
from copri.runtime import reference_equals  # noqa: E402
from copri.sema import is_included, is_strictly_included, lineage  # noqa: E402

from oracles import (  # noqa: E402
    Sides, check_resolve_once, concepts_of, expected_access_trace, hierarchies, oop_to_cop,
    oop_to_python, ordering_program, path_to, random_oop_program, random_reference,
    random_table, run_access, run_python_oracle,
)

from conftest import run  # noqa: E402

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    capman = getattr(report, "capman", None)
    if capman is not None:
        with capman.global_and_fixture_disabled():
            print("\n" + line)
    else:
        print(line)


@pytest.fixture(autouse=True)
def _uncaptured(request):
    report.capman = request.config.pluginmanager.getplugin("capturemanager")
    yield
    report.capman = None


def run_golden(name: str):
    source = (CORPUS / f"{name}.cop").read_text()
    out, err = io.StringIO(), io.StringIO()
    start = time.perf_counter()
    code = execute(source, f"{name}.cop", out, err)
    return out.getvalue(), code, time.perf_counter() - start


def expected(name: str) -> str:
    return (CORPUS / f"{name}.expected").read_text()


def golden_criterion(number: int, name: str, lines: int) -> None:
    out, code, elapsed = run_golden(name)
    want = expected(name)
    ok = out == want and code == EXIT_OK and len(want.splitlines()) == lines
    report(number, ok, f"{name}: {len(out.splitlines())}/{lines} lines byte-exact, {elapsed:.3f}s")
    assert ok


# -- 1-7: goldens --------------------------------------------------------------

def test_criterion_01_reference_precedence():
    out, code, elapsed = run_golden("reference_precedence")
    ok = out == "=== Account::getBalance reference method\n" and code == EXIT_OK and elapsed < 1.0
    report(1, ok, f"output {out!r}, {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_02_dual_methods():
    golden_criterion(2, "dual_methods", 4)


def test_criterion_03_reference_intercept():
    golden_criterion(3, "reference_intercept", 6)


def test_criterion_04_object_override():
    golden_criterion(4, "object_override", 6)


def test_criterion_05_intercept_and_override():
    golden_criterion(5, "intercept_and_override", 12)


def test_criterion_06_polymorphism_values():
    program, table = load_program((CORPUS / "polymorphism.cop").read_text())
    interp = Interpreter(program, table, io.StringIO())
    seen = []
    for item in program.items:
        interp.run_items([item])
        if isinstance(item, ast.ExprStmt) and isinstance(item.expr, ast.Assign):
            target = item.expr.target
            if isinstance(target, ast.Name) and target.name == "balance":
                seen.append(interp.eval(ast.Name("balance"), interp.main_frame))
    ok = seen == [10.0, 20.0]
    report(6, ok, f"getBalance values {seen}, expected [10.0, 20.0]")
    assert ok


def test_criterion_07_lifecycle():
    out, code, _ = run_golden("lifecycle")
    lines = out.splitlines()
    create_ok = lines[:4] == [
        "=> Account: Create reference", "-> Account: Create object",
        "<- Account: Create object", "<= Account: Create reference",
    ]
    delete_ok = lines[4:] == [
        "=> Account: Delete reference", "-> Account: Delete object",
        "<- Account: Delete object", "<= Account: Delete reference",
    ]
    ok = create_ok and delete_ok and out == expected("lifecycle") and code == EXIT_RUNTIME
    report(7, ok, f"create trace {create_ok}, delete trace {delete_ok}, post-delete exit code {code}")
    assert ok


# -- 8: cast algebra -----------------------------------------------------------

def cast_algebra_failures(seed: int) -> list[str]:
    rng = random.Random(seed)
    table, _ = random_table(rng, max_depth=5)
    concept = rng.choice(concepts_of(table))
    ref = random_reference(rng, table, concept)
    outer = random_reference(rng, table, concept, "Root")
    fails = []

    def observe(r, what):
        # contextof > instanceof, and some declared type >= instanceof accepts it
        if not is_strictly_included(table, real_concept(r), real_context(r)):
            fails.append(f"{what}: contextof not above instanceof")
        chain = lineage(table, real_concept(r))
        start = chain.index(real_context(r)) + 1
        declared = rng.choice(chain[start:])
        decl = ast.TypeExpr(declared, None if real_context(r) == "Root" else real_context(r), False)
        check_assignable(table, decl, r)
        if not is_included(table, real_concept(r), declared):
            fails.append(f"{what}: concept below instanceof")

    observe(ref, "original")
    chain = lineage(table, concept)
    for L in chain[:-1]:
        out = left_cast(table, L, ref, [outer])
        observe(out, f"left cast {L}")
        if real_context(out) != L:
            fails.append(f"left cast {L}: context {real_context(out)}")
    for R in chain[chain.index(ref.context) + 1:]:
        out = right_cast(table, ref, R)
        observe(out, f"right cast {R}")
        if real_concept(out) != R:
            fails.append(f"right cast {R}: concept {real_concept(out)}")
    if not reference_equals(left_cast(table, real_context(ref), ref), ref):
        fails.append("identity left cast")
    if not reference_equals(right_cast(table, ref, real_concept(ref)), ref):
        fails.append("identity right cast")
    for cut in ref.concepts[:-1]:
        joined = concat_references(right_cast(table, ref, cut), left_cast(table, cut, ref))
        observe(joined, f"concat at {cut}")
        if not reference_equals(joined, ref):
            fails.append(f"concat round trip at {cut}")
    return [f"seed {seed}: {f}" for f in fails]


def test_criterion_08_cast_algebra():
    n = 1000
    fails = [f for seed in range(n) for f in cast_algebra_failures(seed)]
    report(8, not fails, f"{n} random hierarchies, {len(fails)} failures" + (f" ({fails[0]})" if fails else ""))
    assert not fails


# -- 9: resolve once -----------------------------------------------------------

def test_criterion_09_resolve_once():
    runs, fails = 0, []
    for parents in hierarchies(max_nodes=5, max_depth=4):
        for target in parents:
            for k in range(6):
                runs += 1
                fails += [f"{parents} {target} k={k}: {p}" for p in check_resolve_once(parents, target, k)]
    report(9, not fails, f"{runs} accesses (k = 0..5), {len(fails)} failures" + (f" ({fails[0]})" if fails else ""))
    assert not fails


# -- 10: ordering oracle -------------------------------------------------------

def test_criterion_10_ordering_oracle():
    start = time.perf_counter()
    cases, mismatches = 0, []
    for parents in hierarchies(max_nodes=5, max_depth=4):
        sides = {c: Sides(True, True) for c in parents}
        source = ordering_program(parents, sides)
        for target in parents:
            cases += 1
            events, _, _ = run_access(source, target)
            if events != expected_access_trace(path_to(parents, target), sides):
                mismatches.append((parents, target))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30
    report(10, ok, f"{cases} hierarchy/target cases, {len(mismatches)} mismatches, {elapsed:.1f}s (< 30s)")
    assert ok


# -- 11: OOP degeneration ------------------------------------------------------

def test_criterion_11_oop_degeneration():
    mismatches = []
    for seed in range(50):
        classes, calls = random_oop_program(random.Random(seed))
        got = run(oop_to_cop(classes, calls))
        if got != run_python_oracle(oop_to_python(classes, calls)):
            mismatches.append(seed)
    report(11, not mismatches, f"50 generated programs, {len(mismatches)} mismatches")
    assert not mismatches


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
