"""Golden-output harness: ``NAME.cop`` runs and must print ``NAME.expected`` exactly.

An optional ``NAME.exit`` file holds the expected exit code (default 0).
Every case runs in its own interpreter with its own output buffer, so cases
may execute in parallel threads.
"""

from __future__ import annotations

import difflib
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from copri.host import execute


@dataclass
class GoldenCase:
    name: str
    program_path: Path
    expected_output: Optional[str]
    expected_exit: int = 0


@dataclass
class CaseResult:
    case: GoldenCase
    passed: bool
    output: str
    exit_code: int
    message: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.case.name}"
        return f"{text}: {self.message}" if self.message else text


def _read_text(path: Path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


def discover(directory) -> list[GoldenCase]:
    directory = Path(directory)
    cases = []
    for program in sorted(directory.glob("*.cop")):
        expected = program.with_suffix(".expected")
        exit_file = program.with_suffix(".exit")
        cases.append(GoldenCase(
            name=program.stem,
            program_path=program,
            expected_output=_read_text(expected) if expected.exists() else None,
            expected_exit=int(_read_text(exit_file).strip()) if exit_file.exists() else 0,
        ))
    return cases


def run_case(case: GoldenCase) -> CaseResult:
    out, err = io.StringIO(), io.StringIO()
    code = execute(_read_text(case.program_path), str(case.program_path), out, err)
    output = out.getvalue()
    if case.expected_output is None:
        return CaseResult(case, False, output, code, f"missing {case.program_path.with_suffix('.expected').name}")
    if code != case.expected_exit:
        detail = err.getvalue().strip().splitlines()
        why = f" ({detail[-1]})" if detail else ""
        return CaseResult(case, False, output, code, f"exit code {code}, expected {case.expected_exit}{why}")
    if output != case.expected_output:
        diff = difflib.unified_diff(
            case.expected_output.splitlines(), output.splitlines(), "expected", "actual", lineterm=""
        )
        return CaseResult(case, False, output, code, "output differs\n" + "\n".join(diff))
    return CaseResult(case, True, output, code)


def run_corpus(directory, jobs: int = 1) -> list[CaseResult]:
    cases = discover(directory)
    if jobs > 1 and len(cases) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run_case, cases))
    return [run_case(c) for c in cases]


def summary(results: list[CaseResult]) -> str:
    passed = sum(r.passed for r in results)
    return f"{len(results)} cases: {passed} passed, {len(results) - passed} failed"
