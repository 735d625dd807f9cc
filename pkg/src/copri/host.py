"""Whole-program execution with exit-code mapping, shared by the CLI and the harness."""

from __future__ import annotations

import sys
from typing import TextIO

from copri.errors import Diagnostic, RuntimeFault
from copri.interpreter import Event, Interpreter
from copri.parser import parse_source
from copri.sema import analyze

EXIT_OK = 0
EXIT_DIAGNOSTIC = 1
EXIT_RUNTIME = 2

RECURSION_LIMIT = 20000


def trace_writer(stream: TextIO):
    def listener(ev: Event) -> None:
        stream.write(ev.format() + "\n")
    return listener


def check_source(source: str, filename: str, err: TextIO) -> int:
    """Front end and static checks only."""
    try:
        program = parse_source(source)
        table = analyze(program)
    except Diagnostic as e:
        err.write(e.format(filename) + "\n")
        return EXIT_DIAGNOSTIC
    for w in table.warnings:
        err.write(f"{filename}:{w} (warning)\n")
    return EXIT_OK


def execute(source: str, filename: str, out: TextIO, err: TextIO, trace: bool = False) -> int:
    """Parse, check and run *source*; returns the process exit code."""
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)
    try:
        program = parse_source(source)
        table = analyze(program)
    except Diagnostic as e:
        err.write(e.format(filename) + "\n")
        return EXIT_DIAGNOSTIC
    listeners = [trace_writer(err)] if trace else []
    try:
        Interpreter(program, table, out, listeners).run()
    except RuntimeFault as e:
        err.write(e.format(filename) + "\n")
        return EXIT_RUNTIME
    return EXIT_OK
