"""copri: an interpreter for a small concept-oriented programming language."""

from copri.errors import (
    CopError,
    Diagnostic,
    LexError,
    ParseError,
    SemaError,
    RuntimeFault,
)
from copri.lexer import tokenize
from copri.parser import parse_program, parse_expression, parse_source
from copri.sema import build_concept_table, analyze
from copri.interpreter import Interpreter, run_source

__version__ = "0.1.0"

__all__ = [
    "CopError",
    "Diagnostic",
    "LexError",
    "ParseError",
    "SemaError",
    "RuntimeFault",
    "tokenize",
    "parse_program",
    "parse_expression",
    "parse_source",
    "build_concept_table",
    "analyze",
    "Interpreter",
    "run_source",
]
