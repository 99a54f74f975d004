import hypothesis
import hypothesis.strategies as st
import pytest

from eqrank.graph import WeightedDigraph

hypothesis.settings.register_profile("default", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


@st.composite
def digraphs(draw, max_n=12, acyclic=False, max_weight=4):
    n = draw(st.integers(0, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and (not acyclic or i < j)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    weights = draw(st.lists(st.integers(0, max_weight), min_size=len(chosen), max_size=len(chosen)))
    return WeightedDigraph.from_edges(n, chosen, [float(w) for w in weights])


def make(n, wd):
    """Graph from a ``{(x, y): w}`` dict."""
    edges = list(wd)
    return WeightedDigraph.from_edges(n, edges, [float(wd[e]) for e in edges])


# weights chosen so that hub roots are {5} and {6}: two modern themes
SEVEN = {(2, 0): 3, (3, 0): 1, (2, 1): 1, (3, 1): 2, (4, 2): 2, (5, 4): 1, (5, 3): 1, (6, 3): 2}

EIGHT = {
    (1, 0): 2, (2, 0): 1, (2, 1): 1, (3, 1): 3, (3, 0): 3, (4, 2): 1,
    (5, 2): 2, (5, 3): 1, (6, 3): 1, (6, 4): 1, (7, 5): 4, (7, 6): 2,
}

SIX_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)]


@pytest.fixture
def seven():
    return make(7, SEVEN)


@pytest.fixture
def eight():
    return make(8, EIGHT)


@pytest.fixture
def six():
    return WeightedDigraph.from_edges(6, SIX_EDGES)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
