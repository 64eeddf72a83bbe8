import pytest

from posalg.algebra import OrderedAlgebra, algebra_from_functions, models_up_to
from posalg.poset import chain, make_poset
from posalg.terms import Presentation, Signature
from posalg.text import load_corpus


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture(scope="session")
def sl_ws(corpus):
    return corpus["semilattice"]


@pytest.fixture(scope="session")
def SL(sl_ws):
    return sl_ws.presentations["SL"]


@pytest.fixture(scope="session")
def sl_sig(sl_ws):
    return sl_ws.signatures["SL"]


@pytest.fixture(scope="session")
def sl_models(SL):
    return models_up_to(SL, 3)


def min_chain(n, sig):
    return algebra_from_functions(sig, chain(n), {"meet": min})


def diamond(sig):
    """Four-element Boolean lattice 0 < a, b < 1 with meet."""
    P = make_poset(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")])
    meet = {}
    for x in P:
        for y in P:
            lower = [z for z in P if P.le(z, x) and P.le(z, y)]
            meet[(x, y)] = next(z for z in lower if all(P.le(w, z) for w in lower))
    return OrderedAlgebra(sig, P, {"meet": meet})


@pytest.fixture
def min2(sl_sig):
    return min_chain(2, sl_sig)


@pytest.fixture
def min3(sl_sig):
    return min_chain(3, sl_sig)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
