import itertools

import pytest

from posalg.algebra import coinserter_alg, iso_over_alg, one_point_algebra
from posalg.colimits import (
    NotComputable,
    ParallelPair,
    canonical_presentation,
    coequalizer_direct,
    coequalizer_pos,
    explore_non_reflexive,
    is_reflexive_pair,
    reflexive_pairs,
    sifted_commutation_check,
    split_coequalizer,
    verify_canonical_presentation,
)
from posalg.poset import (
    MonotoneMap,
    antichain,
    chain,
    comparable_pairs,
    compose,
    constant_map,
    is_isomorphic,
    iso_over,
    make_poset,
    monotone_maps,
    posets_up_to,
)

from conftest import min_chain


def test_reflexive_pair_examples():
    C = chain(2)
    idc = MonotoneMap.identity(C)
    v = is_reflexive_pair(ParallelPair(idc, idc))
    assert v and v.witness == idc
    P = make_poset(["a", "b", "c"], [("a", "b")])
    cp = comparable_pairs(P)
    v = is_reflexive_pair(ParallelPair(cp.pi0, cp.pi1))
    assert v and v.witness == cp.diagonal
    f = MonotoneMap(chain(1), C, {0: 0})
    assert not is_reflexive_pair(ParallelPair(f, f))


# -- split coequalizers ----------------------------------------------------------------------


def test_split_identity_data():
    C = chain(2)
    i = MonotoneMap.identity(C)
    v = split_coequalizer(i, i, i, i)
    assert v and v.witness == i
    assert split_coequalizer(i, i, i, i, i)


def test_split_violation_and_not_computable():
    C = chain(2)
    i = MonotoneMap.identity(C)
    z = constant_map(C, C, 0)
    v = split_coequalizer(i, i, i, z, i)
    assert not v and v.witness[0] == "d0.t = id"
    # e not surjective and s not given
    e = MonotoneMap(C, chain(3), {0: 0, 1: 1})
    with pytest.raises(NotComputable):
        split_coequalizer(i, i, e, i)


def test_split_fixture_from_corpus(corpus):
    ws = corpus["posets"]
    m = ws.maps
    v = split_coequalizer(m["ID2"], m["Z"], m["E"], m["ID2"])
    assert v and v.witness == m["S"]
    res = coequalizer_pos(m["ID2"], m["Z"])
    assert iso_over(res.map, m["E"]) is not None


# -- coequalizers ------------------------------------------------------------------------------


def test_coequalizer_examples():
    C = chain(3)
    f = MonotoneMap(C, C, {0: 0, 1: 1, 2: 1})
    assert coequalizer_pos(f, f).map.is_isomorphism()
    one = chain(1)
    D = antichain(["a", "b"])
    res = coequalizer_pos(MonotoneMap(one, D, {0: "a"}), MonotoneMap(one, D, {0: "b"}))
    assert len(res.quotient) == 1


def test_coequalizer_constructions_agree():
    posets = posets_up_to(3)
    for U, X in itertools.product(posets, posets):
        maps = list(monotone_maps(U, X))
        for f, g in itertools.product(maps, maps):
            a, b = coequalizer_pos(f, g), coequalizer_direct(f, g)
            assert iso_over(a.map, b.map) is not None


# -- canonical presentations ----------------------------------------------------------------


def _instances(corpus, sl_models):
    SL = corpus["semilattice"].presentations["SL"]
    out = [(A, SL) for A in sl_models if len(A)]
    out.append((corpus["pointed"].algebras["BOT2"], corpus["pointed"].presentations["PTUP"]))
    return out


def test_canonical_presentation_examples(SL, sl_sig, corpus):
    for A in [one_point_algebra(sl_sig), min_chain(2, sl_sig)]:
        cp = canonical_presentation(A, SL)
        assert verify_canonical_presentation(cp)
    cp = canonical_presentation(min_chain(2, sl_sig), SL)
    assert is_isomorphic(cp.FUA.classes, chain(2))
    ws = corpus["pointed"]
    cp = canonical_presentation(ws.algebras["BOT2"], ws.presentations["PTUP"])
    assert len(cp.FUA) == 3 and verify_canonical_presentation(cp, derive_s=True)


def test_canonical_presentation_is_a_coequalizer(corpus, sl_models):
    for A, pres in _instances(corpus, sl_models):
        cp = canonical_presentation(A, pres)
        d0, d1 = cp.d0.map, cp.d1.map
        # the reflexive splitting
        assert compose(d0, cp.reflexive) == MonotoneMap.identity(d0.cod)
        assert compose(d1, cp.reflexive) == MonotoneMap.identity(d0.cod)
        assert iso_over(coequalizer_pos(d0, d1).map, cp.e.map) is not None
        # e factors through the algebra coinserter of the pair
        Q, c = coinserter_alg(cp.d0, cp.d1)
        assert len(Q) >= len(A)


def test_split_chain_with_derived_s(corpus, sl_models):
    for A, pres in _instances(corpus, sl_models):
        cp = canonical_presentation(A, pres)
        v = split_coequalizer(cp.d0, cp.d1, cp.e, cp.t)
        assert v and v.witness == cp.s
        d0, d1, t, e, s = cp.d0.map, cp.d1.map, cp.t, cp.e.map, v.witness
        chain_ = [compose(d1, t, d1), compose(s, e, d1), compose(s, e, d0), compose(d1, t, d0)]
        assert all(f == chain_[0] for f in chain_)


# -- sifted commutation ------------------------------------------------------------------------


def test_sifted_examples():
    X = make_poset(["a", "b", "c"], [("a", "b"), ("a", "c")])
    f = MonotoneMap(chain(2), X, {0: "a", 1: "b"})
    g = MonotoneMap(chain(2), X, {0: "a", 1: "c"})
    i = MonotoneMap.identity(chain(2))
    assert sifted_commutation_check(ParallelPair(f, g), ParallelPair(i, i))
    cp = comparable_pairs(chain(2))
    p = ParallelPair(cp.pi0, cp.pi1)
    v = sifted_commutation_check(p, p)
    assert v and len(v.witness.cod) == 4


def test_sifted_non_reflexive_counterexample(corpus):
    m = corpus["posets"].maps
    p = ParallelPair(m["U0"], m["U1"])
    v = sifted_commutation_check(p, p)
    assert not v and v.detail == "reflexive=False"
    assert not explore_non_reflexive(1, samples=10).ok


def test_sifted_reflexive_sweep_small():
    pairs = list(reflexive_pairs(2))
    assert pairs
    for p, q in itertools.product(pairs, pairs):
        assert sifted_commutation_check(p, q)
