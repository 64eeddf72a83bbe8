"""Reflexive pairs, split coequalizers, coequalizers and sifted commutation."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator

from .algebra import Homomorphism, OrderedAlgebra, is_model
from .free import FreeAlgebra, PreconditionFailed, Truncated, free_algebra
from .poset import (
    CoinserterResult,
    MonotoneMap,
    Poset,
    PosetError,
    Preorder,
    compose,
    coinserter_pos,
    coproduct,
    iso_over,
    monotone_maps,
    posets_up_to,
    product,
)
from .verdict import Verdict


class NotComputable(ValueError):
    pass


def _underlying(f):
    return f.map if isinstance(f, Homomorphism) else f


@dataclass(frozen=True)
class ParallelPair:
    u0: MonotoneMap
    u1: MonotoneMap

    def __post_init__(self):
        a, b = _underlying(self.u0), _underlying(self.u1)
        if a.dom != b.dom or a.cod != b.cod:
            raise PosetError("pair is not parallel")

    @property
    def dom(self) -> Poset:
        return _underlying(self.u0).dom

    @property
    def cod(self) -> Poset:
        return _underlying(self.u0).cod


def is_reflexive_pair(p: ParallelPair) -> Verdict:
    """First common splitting d (u0.d = u1.d = id), in enumeration order."""
    u0, u1 = p.u0, p.u1
    if isinstance(u0, Homomorphism):
        from .algebra import homomorphisms

        candidates = (d.map for d in homomorphisms(u0.cod, u0.dom))
    else:
        candidates = monotone_maps(u0.cod, u0.dom)
    f0, f1 = _underlying(u0), _underlying(u1)
    for d in candidates:
        if all(f0(d(x)) == x and f1(d(x)) == x for x in f0.cod):
            return Verdict(True, "reflexive", witness=d)
    return Verdict(False, "not")


# -- split coequalizers ----------------------------------------------------------------


@dataclass(frozen=True)
class SplitCoequalizerData:
    d0: MonotoneMap
    d1: MonotoneMap
    e: MonotoneMap
    t: MonotoneMap
    s: MonotoneMap


def split_coequalizer(d0, d1, e, t, s=None) -> Verdict:
    """Check d0, d1: A -> B, e: B -> C split by t: B -> A and s: C -> B.

    With ``s`` omitted it is derived from s.e = d1.t, which requires e to be
    surjective.
    """
    d0, d1, e, t = map(_underlying, (d0, d1, e, t))
    A, B, C = d0.dom, d0.cod, e.cod
    if d1.dom != A or d1.cod != B or e.dom != B or t.dom != B or t.cod != A:
        raise PosetError("maps do not have the shape of a split coequalizer")
    id_b = MonotoneMap.identity(B)
    if s is None:
        if compose(d0, t) != id_b:
            return Verdict(False, "violation", witness=("d0.t = id", _diff(compose(d0, t), id_b)))
        if compose(d1, t, d0) != compose(d1, t, d1):
            return Verdict(
                False, "violation", witness=("d1.t.d0 = d1.t.d1", _diff(compose(d1, t, d0), compose(d1, t, d1)))
            )
        if not e.is_surjective():
            raise NotComputable("e is not surjective, s cannot be read off pointwise")
        d1t = compose(d1, t)
        table = {}
        for b in B:
            c = e(b)
            if c in table and table[c] != d1t(b):
                return Verdict(False, "violation", witness=("s.e = d1.t", (c, table[c], d1t(b))))
            table[c] = d1t(b)
        try:
            s = MonotoneMap(C, B, table)
        except PosetError:
            return Verdict(False, "violation", witness=("s monotone", table))
    s = _underlying(s)
    checks = [
        ("e.d0 = e.d1", compose(e, d0), compose(e, d1)),
        ("e.s = id", compose(e, s), MonotoneMap.identity(C)),
        ("d0.t = id", compose(d0, t), id_b),
        ("d1.t = s.e", compose(d1, t), compose(s, e)),
        ("d1.t.d1 = d1.t.d0", compose(d1, t, d1), compose(d1, t, d0)),
    ]
    for name, left, right in checks:
        if left != right:
            return Verdict(False, "violation", witness=(name, _diff(left, right)))
    return Verdict(True, "verified", witness=s)


def _diff(f: MonotoneMap, g: MonotoneMap):
    for x in f.dom:
        if f(x) != g(x):
            return (x, f(x), g(x))
    return None


# -- coequalizers via reflexive coinserters ------------------------------------------


def coequalizer_pos(f: MonotoneMap, g: MonotoneMap) -> CoinserterResult:
    """Coequalizer of f, g: A -> B as the coinserter of [f,g,id], [g,f,id]: A+A+B -> B."""
    if f.dom != g.dom or f.cod != g.cod:
        raise PosetError("maps are not parallel")
    A, B = f.dom, f.cod
    X, (i0, i1, i2) = coproduct(A, A, B)
    left = MonotoneMap(X, B, {x: (f, g, None)[x[0]](x[1]) if x[0] < 2 else x[1] for x in X})
    right = MonotoneMap(X, B, {x: (g, f, None)[x[0]](x[1]) if x[0] < 2 else x[1] for x in X})
    return coinserter_pos(left, right)


def coequalizer_direct(f: MonotoneMap, g: MonotoneMap) -> CoinserterResult:
    """Quotient of B by the least preorder containing its order and f(a) ~ g(a) both ways."""
    B = f.cod
    pairs = list(B.leq)
    for a in f.dom:
        pairs += [(f(a), g(a)), (g(a), f(a))]
    Q, class_of = Preorder.generated(B.elements, pairs).quotient()
    return CoinserterResult(Q, MonotoneMap(B, Q, class_of), class_of)


# -- canonical presentation ------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalPresentation:
    A: OrderedAlgebra
    FUA: FreeAlgebra
    FUFUA: FreeAlgebra
    d0: Homomorphism  # counit at FUA
    d1: Homomorphism  # F U (counit at A)
    e: Homomorphism  # counit at A
    t: MonotoneMap  # unit at U F U A
    s: MonotoneMap  # unit at U A
    reflexive: MonotoneMap  # U F (unit at U A), a common splitting of d0, d1

    @property
    def data(self) -> SplitCoequalizerData:
        return SplitCoequalizerData(self.d0.map, self.d1.map, self.e.map, self.t, self.s)


def canonical_presentation(A: OrderedAlgebra, pres, depth: int = 3) -> CanonicalPresentation:
    """FUFUA => FUA -> A built from units and counits of the free/forgetful adjunction."""
    if not is_model(A, pres):
        raise PreconditionFailed("algebra does not satisfy the presentation")
    FUA = free_algebra(pres, A.carrier, depth)
    if not FUA.is_total:
        raise Truncated("F(UA) did not stabilize", depth=depth)
    FUFUA = free_algebra(pres, FUA.classes, depth)
    if not FUFUA.is_total:
        raise Truncated("F(UF(UA)) did not stabilize", depth=depth)
    e = FUA.extend(A, {a: a for a in A.carrier})
    d0 = FUFUA.extend(FUA.algebra, {c: c for c in FUA.classes})
    d1 = FUFUA.extend(FUA.algebra, {c: FUA.unit(e(c)) for c in FUA.classes})
    t = MonotoneMap(FUA.classes, FUFUA.classes, {c: FUFUA.unit(c) for c in FUA.classes})
    s = MonotoneMap(A.carrier, FUA.classes, {a: FUA.unit(a) for a in A.carrier})
    refl = FUA.extend(FUFUA.algebra, {a: FUFUA.unit(FUA.unit(a)) for a in A.carrier})
    return CanonicalPresentation(A, FUA, FUFUA, d0, d1, e, t, s, refl.map)


def verify_canonical_presentation(cp: CanonicalPresentation, derive_s: bool = False) -> Verdict:
    if derive_s:
        v = split_coequalizer(cp.d0, cp.d1, cp.e, cp.t)
        if v and v.witness != cp.s:
            return Verdict(False, "violation", witness=("derived s differs from the unit", v.witness))
        return v
    return split_coequalizer(cp.d0, cp.d1, cp.e, cp.t, cp.s)


# -- sifted commutation ----------------------------------------------------------------


def _product_map(f: MonotoneMap, g: MonotoneMap, dom: Poset, cod: Poset) -> MonotoneMap:
    return MonotoneMap(dom, cod, {(x, y): (f(x), g(y)) for x, y in dom})


def sifted_commutation_check(p: ParallelPair, q: ParallelPair) -> Verdict:
    """Is colim(D1 x D2) -> colim D1 x colim D2 an isomorphism for coinserters?"""
    u0, u1 = _underlying(p.u0), _underlying(p.u1)
    v0, v1 = _underlying(q.u0), _underlying(q.u1)
    dom, _ = product(u0.dom, v0.dom)
    cod, _ = product(u0.cod, v0.cod)
    w0 = _product_map(u0, v0, dom, cod)
    w1 = _product_map(u1, v1, dom, cod)
    joint = coinserter_pos(w0, w1)
    cp = coinserter_pos(u0, u1)
    cq = coinserter_pos(v0, v1)
    target, _ = product(cp.quotient, cq.quotient)
    comparison = MonotoneMap(
        joint.quotient, target, {z: (cp.map(z[0]), cq.map(z[1])) for z in joint.quotient}
    )
    reflexive = bool(is_reflexive_pair(p)) and bool(is_reflexive_pair(q))
    if comparison.is_isomorphism():
        return Verdict(True, "commutes", witness=comparison, detail=f"reflexive={reflexive}")
    return Verdict(
        False,
        "counterexample",
        witness={"comparison": comparison, "joint": joint.quotient, "product": target},
        detail=f"reflexive={reflexive}",
    )


def reflexive_pairs(max_size: int) -> Iterator[ParallelPair]:
    """Every reflexive pair of monotone maps between posets with <= max_size elements."""
    posets = posets_up_to(max_size)
    for U in posets:
        for X in posets:
            if len(X) > len(U):
                continue
            maps = list(monotone_maps(U, X))
            splits = list(monotone_maps(X, U))
            for u0, u1 in itertools.product(maps, maps):
                if any(all(u0(d(x)) == x and u1(d(x)) == x for x in X) for d in splits):
                    yield ParallelPair(u0, u1)


def explore_non_reflexive(max_size: int = 2, samples: int = 2000, seed: int = 0) -> Verdict:
    """Best-effort search for a non-commuting pair of (not necessarily reflexive) pairs."""
    rng = random.Random(seed)
    posets = posets_up_to(max_size)
    pairs = []
    for U in posets:
        for X in posets:
            maps = list(monotone_maps(U, X))
            pairs += [ParallelPair(a, b) for a, b in itertools.product(maps, maps)]
    if not pairs:
        return Verdict(False, "notfound")
    for _ in range(samples):
        p, q = rng.choice(pairs), rng.choice(pairs)
        v = sifted_commutation_check(p, q)
        if not v:
            return Verdict(True, "counterexample", witness=(p, q, v.witness))
    return Verdict(False, "notfound", detail=f"{samples} samples")
