import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from copri.interpreter import Interpreter, run_source  # noqa: E402
from copri.parser import parse_source  # noqa: E402
from copri.sema import analyze  # noqa: E402

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def run(source: str) -> str:
    return run_source(source)


def run_with_events(source: str):
    program = parse_source(source)
    events = []
    out = io.StringIO()
    interp = Interpreter(program, analyze(program), out, [events.append])
    interp.run()
    return out.getvalue(), events, interp


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS
