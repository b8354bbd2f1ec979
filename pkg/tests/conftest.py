from pathlib import Path

import pytest

PROGRAMS = Path(__file__).parent / "programs"


@pytest.fixture(scope="session")
def load():
    """Return a loader for the example programs under tests/programs."""

    def _load(name: str) -> str:
        return (PROGRAMS / name).read_text(encoding="utf-8")

    return _load


@pytest.fixture(scope="session")
def program_path():
    def _path(name: str) -> str:
        return str(PROGRAMS / name)

    return _path
