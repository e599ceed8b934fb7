from __future__ import annotations

from pathlib import Path

import pytest

from scjcircus.parser import parse_program

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def redundancy_text() -> str:
    return (DATA / "redundancy.scjc").read_text()


@pytest.fixture(scope="session")
def redundancy_program(redundancy_text):
    program, diagnostics = parse_program(redundancy_text)
    assert program is not None, diagnostics
    return program
