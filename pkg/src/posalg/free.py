"""Free ordered algebras, discrete Lawvere theories and their models.

A free algebra on a finite poset is computed by growing a term universe in
rounds and saturating it.  Each round adds every operation applied to the
current class representatives, plus every axiom instance whose variables
range over those representatives.  The result is declared total once the
representatives are closed under the operations inside the universe and the
resulting quotient satisfies every axiom; the quotient is then provably the
free algebra (it is a model generated by the poset, and its order is exactly
the derivable one).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .algebra import (
    AlgebraError,
    Homomorphism,
    OrderedAlgebra,
    eval_term,
    factor_alg,
    homomorphisms,
    is_model,
    iso_over_alg,
    satisfies_all,
)
from .deduction import DEFAULT_CAP, Saturation, TermUniverse, saturate
from .poset import MonotoneMap, Poset, make_poset, monotone_maps, product
from .terms import App, Gen, Presentation, Term, substitute, variables
from .verdict import Verdict


class PreconditionFailed(ValueError):
    pass


class Truncated(RuntimeError):
    def __init__(self, message: str, depth: int | None = None, arity: int | None = None):
        super().__init__(message)
        self.depth = depth
        self.arity = arity


class ArityOutOfRange(ValueError):
    pass


TOTAL = "total"
TRUNCATED = "truncated"


@dataclass(frozen=True, eq=False)
class FreeAlgebra:
    pres: Presentation
    generators: Poset
    classes: Poset  # elements are representative terms
    tables: Mapping  # op -> {tuple of representatives: representative}; partial when truncated
    unit: MonotoneMap  # generators -> classes
    status: str
    depth: int
    class_of: Mapping = field(repr=False, default=None)  # universe term -> representative
    saturation: Saturation | None = field(repr=False, default=None)

    @property
    def is_total(self) -> bool:
        return self.status == TOTAL

    def __len__(self) -> int:
        return len(self.classes)

    @property
    def algebra(self) -> OrderedAlgebra:
        if not self.is_total:
            raise Truncated("free algebra did not stabilize", depth=self.depth)
        alg = self.__dict__.get("_algebra")
        if alg is None:
            alg = OrderedAlgebra(self.pres.sig, self.classes, self.tables)
            object.__setattr__(self, "_algebra", alg)
        return alg

    def class_of_term(self, t: Term) -> Term:
        """Representative of a ground term over the generators."""
        if self.class_of is not None and t in self.class_of:
            return self.class_of[t]
        return eval_term(self.algebra, {a: self.unit(a) for a in self.generators}, t)

    def extend(self, A: OrderedAlgebra, h: Mapping) -> Homomorphism:
        """The homomorphism F -> A extending a monotone map on generators."""
        table = {c: eval_term(A, h, c) for c in self.classes}
        return Homomorphism.from_table(self.algebra, A, table)


def _instance_terms(pres: Presentation, reps: Sequence[Term]) -> list[Term]:
    out = []
    for op, arity in pres.sig.ops:
        for args in itertools.product(reps, repeat=arity):
            out.append(App(op, args))
    for ax in pres.axioms:
        names = variables(ax.lhs)
        names += [v for v in variables(ax.rhs) if v not in names]
        for values in itertools.product(reps, repeat=len(names)):
            sub = dict(zip(names, values))
            out.append(substitute(ax.lhs, sub))
            out.append(substitute(ax.rhs, sub))
    return out


def _quotient(pres, generators, sat: Saturation):
    classes, class_of = sat.classes()
    reps = classes.elements
    tables = {}
    closed = True
    for op, arity in pres.sig.ops:
        table = {}
        for args in itertools.product(reps, repeat=arity):
            t = App(op, args)
            if t in class_of:
                table[args] = class_of[t]
            else:
                closed = False
        tables[op] = table
    unit = MonotoneMap(generators, classes, {a: class_of[Gen(a)] for a in generators})
    return classes, class_of, tables, unit, closed


def free_algebra(pres: Presentation, P: Poset, depth: int = 3, cap: int = DEFAULT_CAP) -> FreeAlgebra:
    """Free algebra on ``P``, growing the universe for at most ``depth`` rounds."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    universe = TermUniverse(pres.sig, P, cap=cap)
    reps = [Gen(a) for a in P]
    for rnd in range(1, depth + 1):
        universe = universe.extended(_instance_terms(pres, reps))
        sat = saturate(pres, universe)
        classes, class_of, tables, unit, closed = _quotient(pres, P, sat)
        reps = list(classes.elements)
        if closed:
            try:
                candidate = OrderedAlgebra(pres.sig, classes, tables)
            except AlgebraError:
                candidate = None
            if candidate is not None and is_model(candidate, pres):
                free = FreeAlgebra(pres, P, classes, tables, unit, TOTAL, rnd, class_of, sat)
                object.__setattr__(free, "_algebra", candidate)
                return free
    return FreeAlgebra(pres, P, classes, tables, unit, TRUNCATED, depth, class_of, sat)


def universal_property_check(F: FreeAlgebra, A: OrderedAlgebra) -> Verdict:
    """Brute-force check of the tensor bijection between monotone maps and homomorphisms.

    For every monotone h: generators -> |A| there must be exactly one
    homomorphism extending it along the unit, and h <= h' iff the
    extensions are pointwise ordered.
    """
    if not F.is_total:
        raise PreconditionFailed("free algebra is truncated")
    if not is_model(A, F.pres):
        raise PreconditionFailed("target algebra does not satisfy the presentation")
    alg = OrderedAlgebra(F.pres.sig, F.classes, F.tables)
    by_restriction: dict[tuple, list[Homomorphism]] = {}
    for g in homomorphisms(alg, A):
        key = tuple(g(F.unit(a)) for a in F.generators)
        by_restriction.setdefault(key, []).append(g)
    maps = list(monotone_maps(F.generators, A.carrier))
    ext = {}
    for h in maps:
        key = h.values()
        found = by_restriction.get(key, [])
        if len(found) != 1:
            return Verdict(
                False,
                "fail",
                witness=h.table,
                detail=f"{len(found)} homomorphisms extend this map",
            )
        ext[key] = found[0]
    if len(by_restriction) != len(maps):
        return Verdict(False, "fail", detail="a homomorphism restricts to a non-monotone map")
    for h in maps:
        for k in maps:
            if h.le(k) != ext[h.values()].map.le(ext[k.values()].map):
                return Verdict(False, "fail", witness=(h.table, k.table), detail="not an order isomorphism")
    return Verdict(True, "pass", detail=f"{len(maps)} maps, {len(maps)} homomorphisms")


# -- canonical morphism --------------------------------------------------------------


def one_generator_homs(pres: Presentation, X: OrderedAlgebra, depth: int = 3) -> Verdict:
    """The hom-poset from the free algebra on one generator to X is |X|."""
    G = free_algebra(pres, make_poset(["g"]), depth)
    if not G.is_total:
        raise Truncated("free algebra on one generator did not stabilize", depth=depth)
    homs = list(homomorphisms(G.algebra, X))
    at = {h(G.unit("g")): h for h in homs}
    if len(at) != len(homs) or set(at) != set(X.carrier.elements):
        return Verdict(False, "fail", detail="homomorphisms out of G do not match elements")
    for a in X.carrier:
        for b in X.carrier:
            if at[a].map.le(at[b].map) != X.carrier.le(a, b):
                return Verdict(False, "fail", witness=(a, b), detail="hom order differs from carrier order")
    return Verdict(True, "pass")


def canonical_morphism(pres: Presentation, X: OrderedAlgebra, depth: int = 3) -> Homomorphism:
    """c_X: the free algebra on |X| -> X extending the identity on generators."""
    if not is_model(X, pres):
        raise PreconditionFailed("algebra does not satisfy the presentation")
    if not one_generator_homs(pres, X, depth):
        raise AssertionError("hom-poset out of the free algebra on one generator is not |X|")
    F = free_algebra(pres, X.carrier, depth)
    if not F.is_total:
        raise Truncated("free algebra on the carrier did not stabilize", depth=depth)
    c = F.extend(X, {a: a for a in X.carrier})
    if not c.map.is_surjective():
        raise AssertionError("canonical morphism is not surjective")
    coins, _ = factor_alg(c)
    if iso_over_alg(coins, c) is None:
        raise AssertionError("canonical morphism is not the coinserter of its prekernel pair")
    return c


# -- discrete Lawvere theories -----------------------------------------------------


def arity_generators(n: int) -> Poset:
    return make_poset([f"x{i}" for i in range(n)])


@dataclass(frozen=True, eq=False)
class DiscreteLawvereTheory:
    pres: Presentation
    max_arity: int
    homs: Mapping  # n -> FreeAlgebra on discrete n, for n <= max_arity
    _memo: dict = field(default_factory=dict, repr=False)

    def hom(self, n: int, k: int = 1) -> Poset:
        """T(n, k) as the k-fold power of T(n, 1)."""
        base = self.homs[n].classes
        if k == 1:
            return base
        return product(*([base] * k))[0]

    def projection(self, n: int, i: int) -> Term:
        return self.homs[n].unit(f"x{i}")

    def identity(self, n: int) -> tuple:
        return tuple(self.projection(n, i) for i in range(n))

    def compose(self, f: Term, gs: Sequence[Term], m: int) -> Term:
        """f . <g_0, ..., g_{k-1}> for f in T(k, 1) and g_i in T(m, 1)."""
        key = (f, tuple(gs), m)
        out = self._memo.get(key)
        if out is None:
            F = self.homs[m]
            out = eval_term(F.algebra, {f"x{i}": g for i, g in enumerate(gs)}, f)
            self._memo[key] = out
        return out

    def compose_tuple(self, fs: Sequence[Term], gs: Sequence[Term], m: int) -> tuple:
        return tuple(self.compose(f, gs, m) for f in fs)

    def arity_of(self, f: Term) -> int:
        for n, F in self.homs.items():
            if f in F.classes:
                return n
        raise KeyError(f)

    def check_laws(self, max_arity: int | None = None) -> Verdict:
        """Associativity, projection and identity laws, monotonicity; exhaustive."""
        top = self.max_arity if max_arity is None else max_arity
        ar = range(top + 1)
        for n in ar:
            # strict product preservation: T(n, k) is literally the k-fold power
            for k in ar:
                power = self.hom(n, k)
                if len(power) != len(self.homs[n].classes) ** k:
                    return Verdict(False, "fail", witness=(n, k), detail="T(n,k) is not a power")
        for k in ar:
            for f in self.homs[k].classes:
                if self.compose(f, self.identity(k), k) != f:
                    return Verdict(False, "fail", witness=f, detail="f . id != f")
        for k, m in itertools.product(ar, ar):
            for gs in itertools.product(self.homs[m].classes, repeat=k):
                for i in range(k):
                    if self.compose(self.projection(k, i), gs, m) != gs[i]:
                        return Verdict(False, "fail", witness=(k, i, gs), detail="pi_i . <g> != g_i")
        for k, m, n in itertools.product(ar, ar, ar):
            Tm = self.homs[m].classes.elements
            Tn = self.homs[n].classes.elements
            for gs in itertools.product(Tm, repeat=k):
                for hs in itertools.product(Tn, repeat=m):
                    gh = self.compose_tuple(gs, hs, n)
                    for f in self.homs[k].classes:
                        fg = self.compose(f, gs, m)
                        if self.compose(fg, hs, n) != self.compose(f, gh, n):
                            return Verdict(False, "fail", witness=(f, gs, hs), detail="not associative")
        for k, m in itertools.product(ar, ar):
            Tk = self.homs[k].classes
            Tm = self.homs[m].classes
            gtuples = list(itertools.product(Tm.elements, repeat=k))
            for f, f2 in Tk.leq:
                for gs in gtuples:
                    if not Tm.le(self.compose(f, gs, m), self.compose(f2, gs, m)):
                        return Verdict(False, "fail", witness=(f, f2, gs), detail="not monotone in f")
            for gs in gtuples:
                for gs2 in gtuples:
                    if all(Tm.le(a, b) for a, b in zip(gs, gs2)):
                        for f in Tk:
                            if not Tm.le(self.compose(f, gs, m), self.compose(f, gs2, m)):
                                return Verdict(False, "fail", witness=(f, gs, gs2), detail="not monotone in g")
        return Verdict(True, "pass")


def theory_of(pres: Presentation, max_arity: int = 3, depth: int = 3, cap: int = DEFAULT_CAP) -> DiscreteLawvereTheory:
    homs = {}
    for n in range(max_arity + 1):
        F = free_algebra(pres, arity_generators(n), depth, cap)
        if not F.is_total:
            raise Truncated(f"T({n},1) did not stabilize within depth {depth}", depth=depth, arity=n)
        homs[n] = F
    return DiscreteLawvereTheory(pres, max_arity, homs)


# -- models ------------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Model:
    theory: DiscreteLawvereTheory
    base: Poset
    action: Mapping  # (n, class) -> MonotoneMap base^n -> base

    def power(self, n: int) -> Poset:
        return _power(self.base, n)

    def act(self, n: int, f: Term, values: Sequence):
        return self.action[(n, f)](tuple(values))

    def validate(self) -> Verdict:
        T = self.theory
        ar = range(T.max_arity + 1)
        for n in ar:
            Tn = T.homs[n].classes
            for f, f2 in Tn.leq:
                if not self.action[(n, f)].le(self.action[(n, f2)]):
                    return Verdict(False, "fail", witness=(n, f, f2), detail="action not monotone in f")
            for i in range(n):
                pi = T.projection(n, i)
                if any(self.action[(n, pi)](h) != h[i] for h in self.power(n)):
                    return Verdict(False, "fail", witness=(n, i), detail="projection not preserved")
        for k, m in itertools.product(ar, ar):
            Pm = list(self.power(m))
            for gs in itertools.product(T.homs[m].classes.elements, repeat=k):
                inner = [tuple(self.action[(m, g)](h) for g in gs) for h in Pm]
                for f in T.homs[k].classes:
                    comp = self.action[(m, T.compose(f, gs, m))]
                    outer = self.action[(k, f)]
                    for h, vals in zip(Pm, inner):
                        if comp(h) != outer(vals):
                            return Verdict(False, "fail", witness=(f, gs, h), detail="composition not preserved")
        return Verdict(True, "pass")


_power_cache: dict = {}


def _power(P: Poset, n: int) -> Poset:
    key = (P, n)
    if key not in _power_cache:
        _power_cache[key] = product(*([P] * n))[0]
    return _power_cache[key]


def model_of_algebra(A: OrderedAlgebra, T: DiscreteLawvereTheory, validate: bool = True) -> Model:
    """The model sending f in T(n,1) to h |-> h#(f), evaluated on representatives."""
    if not is_model(A, T.pres):
        raise PreconditionFailed("algebra does not satisfy the theory's presentation")
    action = {}
    for n in range(T.max_arity + 1):
        Pn = _power(A.carrier, n)
        for f in T.homs[n].classes:
            table = {h: eval_term(A, {f"x{i}": v for i, v in enumerate(h)}, f) for h in Pn}
            action[(n, f)] = MonotoneMap(Pn, A.carrier, table)
    M = Model(T, A.carrier, action)
    if validate:
        v = M.validate()
        if not v:
            raise AssertionError(f"model invariants fail: {v.detail}")
    return M


def algebra_of_model(M: Model) -> OrderedAlgebra:
    T = M.theory
    tables = {}
    for op, arity in T.pres.sig.ops:
        if arity > T.max_arity:
            raise ArityOutOfRange(f"{op} has arity {arity} > {T.max_arity}")
        cls = T.homs[arity].class_of_term(App(op, tuple(Gen(f"x{i}") for i in range(arity))))
        tables[op] = dict(M.action[(arity, cls)].table)
    A = OrderedAlgebra(T.pres.sig, M.base, tables)
    v = satisfies_all(A, T.pres.axioms)
    if not v:
        raise AssertionError(f"algebra of a model fails {v.detail}")
    return A


# -- perfectly presentable objects ---------------------------------------------------------


@dataclass(frozen=True)
class RetractWitness:
    n: int
    section: Homomorphism  # A -> F(n)
    retraction: Homomorphism  # F(n) -> A


def perfectly_presentable_check(
    A: OrderedAlgebra, pres: Presentation, n_max: int = 3, depth: int = 3
) -> Verdict:
    """Search for A as a retract of a free algebra on a finite discrete poset."""
    if not is_model(A, pres):
        raise PreconditionFailed("algebra does not satisfy the presentation")
    for n in range(n_max + 1):
        F = free_algebra(pres, arity_generators(n), depth)
        if not F.is_total:
            raise Truncated(f"free algebra on {n} generators did not stabilize", depth=depth, arity=n)
        if len(F) < len(A):
            continue
        sections = [s for s in homomorphisms(A, F.algebra) if s.map.is_injective()]
        if not sections:
            continue
        gens = list(F.generators)
        for values in itertools.product(A.carrier.elements, repeat=n):
            e = F.extend(A, dict(zip(gens, values)))
            for s in sections:
                if all(e(s(a)) == a for a in A.carrier):
                    return Verdict(True, "retract", witness=RetractWitness(n, s, e))
    return Verdict(False, "notfound", detail=f"no retract of F(n) for n <= {n_max}")
