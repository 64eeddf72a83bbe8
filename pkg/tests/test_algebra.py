import itertools
import random
from functools import lru_cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posalg.algebra import (
    AlgebraError,
    Homomorphism,
    NonMonotoneOperation,
    OrderedAlgebra,
    all_algebras,
    coinserter_alg,
    eval_term,
    factor_alg,
    find_algebra_isomorphism,
    homomorphisms,
    hsp_membership,
    iso_over_alg,
    is_homomorphism,
    one_point_algebra,
    precongruence,
    prekernel_pair_alg,
    product_alg,
    satisfies,
    subalgebra_generated,
    verify_coinserter_alg,
)
from posalg.poset import antichain, chain, make_poset
from posalg.terms import App, Inequation, Signature, Var, parse_term

from conftest import diamond, min_chain

UNARY = Signature((("s", 1),))


def swap_algebra():
    D = antichain(["a", "b"])
    return OrderedAlgebra(UNARY, D, {"s": {("a",): "b", ("b",): "a"}})


def Q_of(pre):
    return pre.quotient()[0]


def naive_precongruence(A, pairs):
    rel = set(A.carrier.leq) | set(pairs)
    while True:
        more = {(a, d) for a, b in rel for c, d in rel if b == c}
        for op, arity in A.sig.ops:
            for xs in itertools.product(A.carrier.elements, repeat=arity):
                for ys in itertools.product(A.carrier.elements, repeat=arity):
                    if all((x, y) in rel for x, y in zip(xs, ys)):
                        more.add((A.tables[op][xs], A.tables[op][ys]))
        if more <= rel:
            return rel
        rel |= more


# -- validation and evaluation --------------------------------------------------


def test_validate_examples(sl_sig):
    assert len(min_chain(2, sl_sig)) == 2
    with pytest.raises(NonMonotoneOperation):
        OrderedAlgebra(UNARY, chain(2), {"s": {(0,): 1, (1,): 0}})
    assert swap_algebra().tables["s"][("a",)] == "b"
    with pytest.raises(AlgebraError):
        OrderedAlgebra(UNARY, chain(2), {"s": {(0,): 0}})


def test_constants_forbid_empty_carrier():
    sig = Signature((("e", 0),))
    with pytest.raises(AlgebraError):
        OrderedAlgebra(sig, make_poset([]), {"e": {}})
    assert len(OrderedAlgebra(UNARY, make_poset([]), {"s": {}})) == 0


def test_eval_examples(min2):
    assert eval_term(min2, {"x": 1, "y": 0}, parse_term("meet(x,y)")) == 0
    assert eval_term(min2, {"x": 1, "y": 1}, parse_term("meet(meet(x,x),y)")) == 1
    sig = Signature((("e", 0),))
    A = OrderedAlgebra(sig, chain(2), {"e": {(): 1}})
    assert eval_term(A, {}, App("e")) == 1


def test_satisfies_examples(sl_ws, min2):
    ax = Inequation.of(parse_term("meet(x,y)"), Var("x"))
    assert satisfies(min2, ax)
    v = satisfies(sl_ws.algebras["MAXCHAIN"], ax)
    assert not v and v.witness == {"x": "0", "y": "1"}
    assert satisfies(swap_algebra(), Inequation.of(Var("x"), Var("x")))


# -- products and subalgebras ------------------------------------------------------


def test_product_examples(sl_sig, min2):
    P, projs = product_alg([min2, one_point_algebra(sl_sig)])
    assert find_algebra_isomorphism(P, min2) is not None
    sq, _ = product_alg([min2, min2])
    assert len(sq) == 4
    for x, y in itertools.product(sq.carrier, sq.carrier):
        assert sq.tables["meet"][(x, y)] == (min(x[0], y[0]), min(x[1], y[1]))
    empty, _ = product_alg([], sl_sig)
    assert len(empty) == 1
    assert all(is_homomorphism(sq, min2, p.map.table) for p in _)


def test_subalgebra_generated(min3):
    assert subalgebra_generated(min3, [0, 1, 2]).map.is_isomorphism()
    assert list(subalgebra_generated(min3, [2]).dom.carrier) == [2]
    assert list(subalgebra_generated(min3, [0, 2]).dom.carrier) == [0, 2]


# -- coinserters and factorization ---------------------------------------------------


def test_coinserter_examples(min2):
    idh = Homomorphism.identity(min2)
    Q, c = coinserter_alg(idh, idh)
    assert c.map.is_isomorphism()

    point = one_point_algebra(min2.sig)
    force = lambda a, b: (Homomorphism.from_table(point, min2, {"*": a}), Homomorphism.from_table(point, min2, {"*": b}))
    Q, _ = coinserter_alg(*force(1, 0))
    assert len(Q) == 1

    # forcing a <= b in the swap algebra forces s(a) <= s(b), i.e. b <= a
    S = swap_algebra()
    assert len(Q_of(precongruence(S, [("a", "b")]))) == 1


FG = Signature((("f", 1), ("g", 2)))
SMALL = [chain(3), antichain([0, 1, 2]), make_poset([0, 1, 2], [(0, 1)])]


@lru_cache(maxsize=None)
def monotone_tables(P, arity):
    return [A.tables["h"] for A in all_algebras(Signature((("h", arity),)), P)]


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_precongruence_matches_naive(seed):
    rng = random.Random(seed)
    P = rng.choice(SMALL)
    A = OrderedAlgebra(FG, P, {"f": rng.choice(monotone_tables(P, 1)), "g": rng.choice(monotone_tables(P, 2))})
    pairs = [(rng.choice(P.elements), rng.choice(P.elements)) for _ in range(rng.randint(0, 2))]
    assert set(precongruence(A, pairs).rel) == naive_precongruence(A, pairs)


def test_factor_alg_examples(min2, min3):
    collapse = Homomorphism.from_table(min3, min2, {0: 0, 1: 1, 2: 1})
    c, m = factor_alg(collapse)
    assert iso_over_alg(c, collapse) is not None
    assert m.map.is_isomorphism()
    emb = Homomorphism.from_table(min2, min3, {0: 0, 1: 2})
    c, m = factor_alg(emb)
    assert c.map.is_isomorphism() and m.map.is_embedding()


def test_surjection_is_coinserter_of_prekernel(sl_models):
    for A in sl_models:
        for B in sl_models:
            for f in homomorphisms(A, B):
                if not f.map.is_surjective():
                    continue
                pk = prekernel_pair_alg(f)
                _, c = coinserter_alg(pk.p0, pk.p1)
                assert iso_over_alg(c, f) is not None


def test_verify_coinserter_alg(min2, sl_models):
    point = one_point_algebra(min2.sig)
    u0 = Homomorphism.from_table(point, min2, {"*": 1})
    u1 = Homomorphism.from_table(point, min2, {"*": 0})
    Q, c = coinserter_alg(u0, u1)
    assert verify_coinserter_alg(u0, u1, c, sl_models)
    v = verify_coinserter_alg(u0, u1, Homomorphism.identity(min2), sl_models)
    assert not v and v.witness[0] == "inequality"


# -- Birkhoff closure ---------------------------------------------------------------------


def test_hsp_examples(sl_ws, min2):
    assert hsp_membership(min2, [min2]).status == "member"
    assert hsp_membership(one_point_algebra(min2.sig), [min2]).status == "member"
    v = hsp_membership(sl_ws.algebras["MAXCHAIN"], [min2])
    assert v.status == "refuted"
    assert satisfies(min2, v.witness) and not satisfies(sl_ws.algebras["MAXCHAIN"], v.witness)


def test_hsp_diamond_is_member(sl_sig, min2):
    v = hsp_membership(diamond(sl_sig), [min2])
    assert v.status == "member"
    w = v.witness
    assert w.quotient.map.is_surjective()
