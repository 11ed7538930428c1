import functools
from pathlib import Path

import pytest

from cycind.logic.defs import load_defs
from cycind.proofs.fileformat import load_proof

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
CYCLIC = sorted(p.stem for p in CORPUS.glob("*.cp"))


@functools.lru_cache(maxsize=None)
def nat_defs():
    return load_defs(CORPUS / "nat.defs")


def corpus_proof(name):
    return load_proof(CORPUS / f"{name}.cp", nat_defs())


@functools.lru_cache(maxsize=None)
def compiled(name):
    """Compile once per session; several test modules inspect the same outputs."""
    from cycind.compiler.buds import compile_proof

    return compile_proof(corpus_proof(name), nat_defs())


@pytest.fixture
def defs():
    return nat_defs()


_CRITERIA = {}


def record_criterion(n, ok, detail):
    _CRITERIA[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
