import pytest

from debate_forge.corpus import TokenizerConfig, build_corpus
from debate_forge.grammar import get_strategy

from helpers import ACCEPTANCE_RESULTS, build_f1


@pytest.fixture
def f1_tree():
    return build_f1()


@pytest.fixture
def f1_corpus(f1_tree):
    """All F1 MultiTurn pairs in the training split, nothing filtered."""
    return build_corpus(
        [f1_tree],
        get_strategy("multiturn"),
        TokenizerConfig(),
        min_count=1,
        ratios=(1.0, 0.0, 0.0),
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}")
