import pytest
from hypothesis import settings
from hypothesis import strategies as st

from treefree.cli import bundled_presentation
from treefree.hnn import HnnWord, MultipleHnnPresentation, parse_presentation
from treefree.words import Alphabet, Word

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []

GAMMA = parse_presentation(bundled_presentation("gamma.txt"))
FREE3 = MultipleHnnPresentation.free(["x", "y", "z"])


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gamma():
    return GAMMA


@pytest.fixture(scope="session")
def free3():
    return FREE3


@pytest.fixture(scope="session")
def F():
    return Alphabet(["x", "y", "z"])


def codes(rank, max_size=12):
    letters = st.integers(1, rank).flatmap(lambda g: st.sampled_from([g, -g]))
    return st.lists(letters, max_size=max_size)


def words(rank=3, max_size=12):
    return codes(rank, max_size).map(Word)


def hnn_words(p, max_size=10):
    total = p.rank + len(p.stable)
    return codes(total, max_size).map(lambda c: HnnWord.from_combined_codes(c, p.rank))
