"""Interactive session with a persistent concept table and environment.

Input is buffered until brackets balance.  An entry starting with
``concept`` is buffered until a blank line, so both class bodies can be
typed on separate lines.  A failing entry leaves the session as it was.
"""

from __future__ import annotations

import copy
import sys
from typing import Optional, TextIO

from copri import syntax as ast
from copri.builtins import format_value
from copri.errors import CopError, Diagnostic, ParseError
from copri.interpreter import Interpreter
from copri.parser import parse_expression, parse_source
from copri.runtime import VOID
from copri.sema import analyze, build_concept_table

PROMPT = "cop> "
CONTINUATION = "...> "


def bracket_depth(text: str) -> int:
    depth = 0
    quote: Optional[str] = None
    i = 0
    while i < len(text):
        ch = text[i]
        if quote:
            if ch == "\\":
                i += 1
            elif ch == quote:
                quote = None
        elif ch in "\"'":
            quote = ch
        elif text.startswith("//", i):
            nl = text.find("\n", i)
            if nl < 0:
                break
            i = nl
        elif ch in "({[":
            depth += 1
        elif ch in ")}]":
            depth -= 1
        i += 1
    return depth


class Session:
    def __init__(self, out: TextIO, err: TextIO):
        self.out = out
        self.err = err
        self.concepts: list[ast.ConceptDecl] = []
        self.interp = Interpreter(ast.Program(), out=out)

    # state kept across entries, snapshotted so a failing entry can be undone
    def _snapshot(self):
        i = self.interp
        return copy.deepcopy((i.store, i.globals, i.main_frame, i.unique_no)), dict(i.functions), \
            i.table, list(self.concepts)

    def _restore(self, snap) -> None:
        (store, globals_, main_frame, unique_no), functions, table, concepts = snap
        i = self.interp
        i.store, i.globals, i.main_frame, i.unique_no = store, globals_, main_frame, unique_no
        i.functions, i.table, i.accesses = functions, table, []
        self.concepts = concepts

    def known_names(self) -> list[str]:
        names = list(self.interp.globals)
        for scope in self.interp.main_frame.scopes:
            names.extend(scope)
        return names

    def _parse(self, text: str):
        """Return ``(program, expression)``; exactly one of them is set."""
        try:
            return parse_source(text), None
        except ParseError as program_error:
            try:
                return None, parse_expression(text)
            except ParseError:
                raise program_error from None

    def feed(self, text: str) -> bool:
        """Evaluate one complete entry; returns False if it failed."""
        snap = self._snapshot()
        try:
            program, expr = self._parse(text)
            if expr is not None:
                program = ast.Program(items=[ast.ExprStmt(expr, pos=expr.pos)])
            concepts = self.concepts + program.concepts
            full = ast.Program(concepts, program.items)
            table = analyze(full, build_concept_table(full), self.known_names())
            self.interp.table = table
            self.concepts = concepts
            items = program.items
            show = (
                len(items) == 1 and isinstance(items[0], ast.ExprStmt)
                and not isinstance(items[0].expr, ast.Assign)
            )
            if show:
                value = self.interp.eval(items[0].expr, self.interp.main_frame)
                if value is not VOID:
                    self.out.write(format_value(value) + "\n")
            else:
                self.interp.run_items(items)
            return True
        except CopError as e:
            self._restore(snap)
            self.err.write(e.format("<repl>") + "\n")
            return False

    @staticmethod
    def complete(buffer: str) -> bool:
        if bracket_depth(buffer) > 0:
            return False
        if buffer.lstrip().startswith("concept") and not buffer.endswith("\n\n"):
            return False
        return True


def repl(stdin: TextIO = sys.stdin, out: TextIO = sys.stdout, err: TextIO = sys.stderr,
         prompt: bool = True) -> int:
    session = Session(out, err)
    buffer = ""
    while True:
        if prompt:
            out.write(CONTINUATION if buffer else PROMPT)
            out.flush()
        line = stdin.readline()
        if not line:
            if buffer.strip():
                session.feed(buffer)
            if prompt:
                out.write("\n")
            return 0
        if not buffer and line.strip() in (":quit", ":q", ":exit"):
            return 0
        if not buffer and not line.strip():
            continue
        buffer += line if line.endswith("\n") else line + "\n"
        if session.complete(buffer):
            if buffer.strip():
                session.feed(buffer)
            buffer = ""
