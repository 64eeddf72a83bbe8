import itertools

import pytest

from posalg.algebra import OrderedAlgebra, eval_term, find_algebra_isomorphism, one_point_algebra
from posalg.free import (
    ArityOutOfRange,
    FreeAlgebra,
    PreconditionFailed,
    TOTAL,
    Truncated,
    algebra_of_model,
    arity_generators,
    canonical_morphism,
    free_algebra,
    model_of_algebra,
    perfectly_presentable_check,
    theory_of,
    universal_property_check,
)
from posalg.poset import antichain, chain, is_isomorphic, make_poset
from posalg.terms import App, Gen, Presentation, Signature

from conftest import diamond, min_chain


@pytest.fixture(scope="module")
def T_SL(SL):
    return theory_of(SL, 2)


def test_empty_signature_free_is_generators():
    P = make_poset(["a", "b", "c"], [("a", "b")])
    F = free_algebra(Presentation(Signature(()), ()), P, 1)
    assert F.is_total and F.depth == 1
    assert F.unit.is_isomorphism()


def test_free_semilattice_on_antichain(SL):
    F = free_algebra(SL, antichain(["a", "b"]), 2)
    assert F.status == TOTAL and len(F) == 3
    ab = App("meet", (Gen("a"), Gen("b")))
    assert set(F.classes.covers()) == {(ab, Gen("a")), (ab, Gen("b"))}


def test_free_semilattice_on_chain(SL):
    F = free_algebra(SL, make_poset(["a", "b"], [("a", "b")]), 2)
    assert F.is_total and len(F) == 2
    assert is_isomorphic(F.classes, chain(2))
    assert F.class_of_term(App("meet", (Gen("a"), Gen("b")))) == Gen("a")


def test_monoid_truncates(corpus):
    F = free_algebra(corpus["monoid"].presentations["MON"], antichain(["x"]), 1)
    assert F.status == "truncated"
    x = Gen("x")
    xx = App("mul", (x, x))
    assert set(F.classes) == {App("e"), x, xx, App("mul", (xx, x))}
    assert F.classes.is_discrete()
    with pytest.raises(Truncated):
        F.algebra


def test_universal_property(SL, sl_models, min2):
    F = free_algebra(SL, antichain(["a", "b"]), 2)
    v = universal_property_check(F, min2)
    assert v and v.detail.startswith("4 maps")
    for A in sl_models:
        assert universal_property_check(F, A)


def test_universal_property_empty_signature():
    sig = Signature(())
    pres = Presentation(sig, ())
    F = free_algebra(pres, antichain(["a", "b"]), 1)
    A = OrderedAlgebra(sig, chain(3), {})
    assert universal_property_check(F, A)


def test_universal_property_detects_a_collapsed_class(SL, min2):
    # the free algebra on the chain a < b, passed off as free on the antichain
    good = free_algebra(SL, make_poset(["a", "b"], [("a", "b")]), 2)
    D = antichain(["a", "b"])
    from posalg.poset import MonotoneMap

    fake = FreeAlgebra(SL, D, good.classes, good.tables, MonotoneMap(D, good.classes, good.unit.table), TOTAL, 2)
    assert not universal_property_check(fake, min2)


def test_canonical_morphism_examples(SL, sl_sig, min2):
    c = canonical_morphism(SL, one_point_algebra(sl_sig))
    assert c.map.is_surjective()
    assert canonical_morphism(SL, min2).map.is_isomorphism()
    c = canonical_morphism(SL, diamond(sl_sig))
    assert c.map.is_surjective() and not c.map.is_injective()
    with pytest.raises(PreconditionFailed):
        canonical_morphism(SL, OrderedAlgebra(sl_sig, chain(2), {"meet": {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}}))


# -- theories and models -----------------------------------------------------------------


def test_theory_sizes(T_SL):
    assert [len(T_SL.homs[n]) for n in range(3)] == [0, 1, 3]
    assert T_SL.check_laws()


def test_theory_composition_is_commutative(T_SL):
    x0, x1 = T_SL.projection(2, 0), T_SL.projection(2, 1)
    m = App("meet", (x0, x1))
    assert m in T_SL.homs[2].classes
    assert T_SL.compose(m, (x1, x0), 2) == m
    assert T_SL.compose(m, (x0, x0), 2) == x0


def test_theory_power_and_tupling(T_SL):
    assert len(T_SL.hom(2, 3)) == 27
    for gs in itertools.product(T_SL.homs[2].classes, repeat=2):
        for i in range(2):
            assert T_SL.compose(T_SL.projection(2, i), gs, 2) == gs[i]


def test_model_of_min_chain(T_SL, min2):
    M = model_of_algebra(min2, T_SL)
    x0, x1 = T_SL.projection(2, 0), T_SL.projection(2, 1)
    meet = M.action[(2, App("meet", (x0, x1)))]
    for a, b in itertools.product(min2.carrier, min2.carrier):
        assert meet((a, b)) == min(a, b)
        assert M.action[(2, x0)]((a, b)) == a
        assert M.act(2, T_SL.compose(App("meet", (x0, x1)), (x0, x0), 2), (a, b)) == a


@pytest.mark.parametrize("make", [lambda s: min_chain(2, s), one_point_algebra, diamond])
def test_model_round_trip(T_SL, sl_sig, make):
    A = make(sl_sig)
    B = algebra_of_model(model_of_algebra(A, T_SL))
    assert B.carrier == A.carrier and B.tables == A.tables
    assert find_algebra_isomorphism(A, B) is not None


def test_algebra_of_model_needs_arities(SL, min2):
    T1 = theory_of(SL, 1)
    M = model_of_algebra(min2, T1)
    with pytest.raises(ArityOutOfRange):
        algebra_of_model(M)


def test_constant_free_theory_has_empty_T0(SL):
    assert len(theory_of(SL, 0).homs[0]) == 0
    assert len(arity_generators(0)) == 0


# -- retracts -----------------------------------------------------------------------------


def test_free_algebra_is_its_own_retract(SL):
    F = free_algebra(SL, arity_generators(2), 2)
    v = perfectly_presentable_check(F.algebra, SL, 2)
    assert v and v.witness.n == 2


def test_point_is_retract_of_free_on_one(SL, sl_sig):
    v = perfectly_presentable_check(one_point_algebra(sl_sig), SL, 3)
    assert v and v.witness.n == 1


def test_three_chain_is_a_retract(SL, min3):
    v = perfectly_presentable_check(min3, SL, 3)
    assert v
    w = v.witness
    assert all(w.retraction(w.section(a)) == a for a in min3.carrier)
