import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ptt.checker import Definitions, check_decl
from ptt.surface import parse_file_text, parse_term, read_sexprs

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def parse1(src: str, env=None):
    (sx,) = read_sexprs(src)
    return parse_term(sx, env)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


def load_defs(*paths: str) -> Definitions:
    """Check corpus files in order, returning the accumulated definitions."""
    defs = Definitions()
    for p in paths:
        for d in parse_file_text((CORPUS / p).read_text()):
            r = check_decl(defs, d)
            assert r.ok, f"{p}:{r.name}: {r.message}"
    return defs
