"""Finite posets, monotone maps and the Pos-level constructions.

Everything here is immutable once built.  Elements are arbitrary hashable
values; the order in which they are listed is significant only for
determinism (class representatives, enumeration order, witnesses).
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .verdict import Verdict

Element = Hashable


class PosetError(ValueError):
    pass


class AntisymmetryViolation(PosetError):
    pass


class DuplicateElement(PosetError):
    pass


class NotMonotone(PosetError):
    pass


class ProbeBoundTooSmall(UserWarning):
    pass


def _closure(n: int, pairs: Iterable[tuple[int, int]]) -> list[int]:
    """Reflexive-transitive closure over indices 0..n-1, as successor bitmasks."""
    succ = [1 << i for i in range(n)]
    for a, b in pairs:
        succ[a] |= 1 << b
    for k in range(n):
        bit = 1 << k
        row = succ[k]
        for i in range(n):
            if succ[i] & bit:
                succ[i] |= row
    return succ


@dataclass(frozen=True, eq=False)
class Poset:
    """A finite poset; ``leq`` must already be reflexive-transitive closed."""

    elements: tuple
    leq: frozenset
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", frozenset(self.leq))
        index = {}
        for i, a in enumerate(elements):
            if a in index:
                raise DuplicateElement(f"duplicate element {a!r}")
            index[a] = i
        object.__setattr__(self, "_index", index)
        for a, b in self.leq:
            if a not in index or b not in index:
                raise PosetError(f"pair {(a, b)!r} mentions an unknown element")
        for a in elements:
            if (a, a) not in self.leq:
                raise PosetError(f"relation is not reflexive at {a!r}")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                raise AntisymmetryViolation(f"{a!r} <= {b!r} <= {a!r}")
        for a, b in self.leq:
            for c in self.up(b):
                if (a, c) not in self.leq:
                    raise PosetError(f"relation is not transitive: {a!r} <= {b!r} <= {c!r}")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __contains__(self, a) -> bool:
        return a in self._index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.leq == other.leq

    def __hash__(self) -> int:
        return hash((frozenset(self.elements), self.leq))

    def __repr__(self) -> str:
        strict = sorted(
            ((a, b) for a, b in self.covers()), key=lambda p: (self.index(p[0]), self.index(p[1]))
        )
        return f"Poset({list(self.elements)!r}, covers={strict!r})"

    def index(self, a) -> int:
        return self._index[a]

    def le(self, a, b) -> bool:
        return (a, b) in self.leq

    def lt(self, a, b) -> bool:
        return a != b and (a, b) in self.leq

    def up(self, a) -> list:
        return [b for b in self.elements if (a, b) in self.leq]

    def down(self, a) -> list:
        return [b for b in self.elements if (b, a) in self.leq]

    def covers(self) -> list[tuple]:
        """Hasse diagram edges, in element order."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if self.lt(a, b) and not any(
                    self.lt(a, c) and self.lt(c, b) for c in self.elements
                ):
                    out.append((a, b))
        return out

    def is_discrete(self) -> bool:
        return all(a == b for a, b in self.leq)

    def subposet(self, subset: Iterable) -> Poset:
        keep = set(subset)
        elems = tuple(a for a in self.elements if a in keep)
        return Poset(elems, frozenset((a, b) for a, b in self.leq if a in keep and b in keep))

    def relabel(self, mapping: Mapping) -> Poset:
        return Poset(
            tuple(mapping[a] for a in self.elements),
            frozenset((mapping[a], mapping[b]) for a, b in self.leq),
        )


@dataclass(frozen=True, eq=False)
class Preorder:
    """Reflexive transitive relation; antisymmetry is not required."""

    elements: tuple
    rel: frozenset

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "rel", frozenset(self.rel))
        elems = set(self.elements)
        for a in self.elements:
            if (a, a) not in self.rel:
                raise PosetError(f"preorder is not reflexive at {a!r}")
        for a, b in self.rel:
            if a not in elems or b not in elems:
                raise PosetError(f"pair {(a, b)!r} mentions an unknown element")
            for c in self.elements:
                if (b, c) in self.rel and (a, c) not in self.rel:
                    raise PosetError("preorder is not transitive")

    @classmethod
    def generated(cls, elements: Sequence, pairs: Iterable[tuple]) -> Preorder:
        elements = tuple(elements)
        idx = {a: i for i, a in enumerate(elements)}
        succ = _closure(len(elements), ((idx[a], idx[b]) for a, b in pairs))
        rel = frozenset(
            (elements[i], elements[j])
            for i in range(len(elements))
            for j in range(len(elements))
            if succ[i] >> j & 1
        )
        return cls(elements, rel)

    def quotient(self) -> tuple[Poset, dict]:
        """Collapse the symmetric part; each class is named by its first element."""
        class_of = {}
        for a in self.elements:
            if a in class_of:
                continue
            for b in self.elements:
                if (a, b) in self.rel and (b, a) in self.rel:
                    class_of[b] = a
        reps = tuple(a for a in self.elements if class_of[a] == a)
        leq = frozenset(
            (class_of[a], class_of[b]) for a, b in self.rel
        )
        return Poset(reps, leq), class_of


def make_poset(elements: Sequence, generating_pairs: Iterable[tuple] = ()) -> Poset:
    elements = tuple(elements)
    if len(set(elements)) != len(elements):
        dup = next(a for a in elements if elements.count(a) > 1)
        raise DuplicateElement(f"duplicate element {dup!r}")
    idx = {a: i for i, a in enumerate(elements)}
    pairs = []
    for a, b in generating_pairs:
        if a not in idx or b not in idx:
            raise PosetError(f"pair {(a, b)!r} mentions an unknown element")
        pairs.append((idx[a], idx[b]))
    succ = _closure(len(elements), pairs)
    for i in range(len(elements)):
        for j in range(i + 1, len(elements)):
            if succ[i] >> j & 1 and succ[j] >> i & 1:
                raise AntisymmetryViolation(f"{elements[i]!r} <= {elements[j]!r} <= {elements[i]!r}")
    leq = frozenset(
        (elements[i], elements[j])
        for i in range(len(elements))
        for j in range(len(elements))
        if succ[i] >> j & 1
    )
    return Poset(elements, leq)


def chain(n: int) -> Poset:
    return make_poset(range(n), [(i, i + 1) for i in range(n - 1)])


def antichain(elements: Sequence) -> Poset:
    return make_poset(elements)


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    dom: Poset
    cod: Poset
    table: Mapping

    def __post_init__(self):
        table = dict(self.table)
        object.__setattr__(self, "table", table)
        for a in self.dom:
            if a not in table:
                raise PosetError(f"map is not total: no value at {a!r}")
            if table[a] not in self.cod:
                raise PosetError(f"value {table[a]!r} is not in the codomain")
        if len(table) != len(self.dom):
            raise PosetError("map table has entries outside the domain")
        for a, b in self.dom.leq:
            if not self.cod.le(table[a], table[b]):
                raise NotMonotone(f"{a!r} <= {b!r} but {table[a]!r} !<= {table[b]!r}")

    def __call__(self, a):
        return self.table[a]

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and self.table == other.table

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, tuple(self.table[a] for a in self.dom)))

    def __repr__(self) -> str:
        return f"MonotoneMap({dict(self.table)!r})"

    @classmethod
    def identity(cls, P: Poset) -> MonotoneMap:
        return cls(P, P, {a: a for a in P})

    def values(self) -> tuple:
        return tuple(self.table[a] for a in self.dom)

    def image(self) -> list:
        seen = []
        for a in self.dom:
            if self.table[a] not in seen:
                seen.append(self.table[a])
        return [b for b in self.cod if b in seen]

    def is_surjective(self) -> bool:
        return set(self.table.values()) == set(self.cod.elements)

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == len(self.dom)

    def is_order_reflecting(self) -> bool:
        return all(
            self.dom.le(a, b)
            for a in self.dom
            for b in self.dom
            if self.cod.le(self.table[a], self.table[b])
        )

    def is_embedding(self) -> bool:
        return self.is_injective() and self.is_order_reflecting()

    def is_isomorphism(self) -> bool:
        return self.is_surjective() and self.is_embedding()

    def inverse(self) -> MonotoneMap:
        if not self.is_isomorphism():
            raise PosetError("map is not an isomorphism")
        return MonotoneMap(self.cod, self.dom, {b: a for a, b in self.table.items()})

    def le(self, other: MonotoneMap) -> bool:
        """Pointwise order on parallel maps."""
        return all(self.cod.le(self.table[a], other.table[a]) for a in self.dom)


def compose(*maps: MonotoneMap) -> MonotoneMap:
    """``compose(g, f)`` is g after f."""
    if not maps:
        raise ValueError("compose needs at least one map")
    out = maps[-1]
    for g in reversed(maps[:-1]):
        if g.dom != out.cod:
            raise PosetError("maps do not compose")
        out = MonotoneMap(out.dom, g.cod, {a: g.table[out.table[a]] for a in out.dom})
    return out


def constant_map(P: Poset, Q: Poset, value) -> MonotoneMap:
    return MonotoneMap(P, Q, {a: value for a in P})


# -- combinators ---------------------------------------------------------


def product(*posets: Poset) -> tuple[Poset, list[MonotoneMap]]:
    elements = tuple(itertools.product(*(P.elements for P in posets)))
    leq = frozenset(
        (x, y)
        for x in elements
        for y in elements
        if all(P.le(a, b) for P, a, b in zip(posets, x, y))
    )
    prod = Poset(elements, leq)
    projections = [
        MonotoneMap(prod, P, {x: x[i] for x in elements}) for i, P in enumerate(posets)
    ]
    return prod, projections


def coproduct(*posets: Poset) -> tuple[Poset, list[MonotoneMap]]:
    elements = tuple((i, a) for i, P in enumerate(posets) for a in P)
    leq = frozenset(((i, a), (i, b)) for i, P in enumerate(posets) for a, b in P.leq)
    coprod = Poset(elements, leq)
    injections = [
        MonotoneMap(P, coprod, {a: (i, a) for a in P}) for i, P in enumerate(posets)
    ]
    return coprod, injections


def discrete(P: Poset) -> Poset:
    return Poset(P.elements, frozenset((a, a) for a in P))


@dataclass(frozen=True)
class ComparablePairs:
    pairs: Poset
    pi0: MonotoneMap
    pi1: MonotoneMap
    diagonal: MonotoneMap


def comparable_pairs(P: Poset) -> ComparablePairs:
    """The discrete poset of comparable pairs, with projections into |P|."""
    base = discrete(P)
    elements = tuple((a, b) for a in P for b in P if P.le(a, b))
    pairs = Poset(elements, frozenset((x, x) for x in elements))
    return ComparablePairs(
        pairs,
        MonotoneMap(pairs, base, {x: x[0] for x in elements}),
        MonotoneMap(pairs, base, {x: x[1] for x in elements}),
        MonotoneMap(base, pairs, {a: (a, a) for a in P}),
    )


def poset_combinators(kind: str, args: Sequence[Poset]):
    if kind == "product":
        return product(*args)
    if kind == "coproduct":
        return coproduct(*args)
    if kind in ("discrete", "comparable_pairs"):
        if len(args) != 1:
            raise ValueError(f"{kind} takes exactly one poset")
        return discrete(args[0]) if kind == "discrete" else comparable_pairs(args[0])
    raise ValueError(f"unknown combinator {kind!r}")


# -- coinserters, prekernels, factorization --------------------------------


@dataclass(frozen=True)
class CoinserterResult:
    quotient: Poset
    map: MonotoneMap
    class_of: dict


def _check_parallel(u0: MonotoneMap, u1: MonotoneMap):
    if u0.dom != u1.dom or u0.cod != u1.cod:
        raise PosetError("maps are not parallel")


def coinserter_pos(u0: MonotoneMap, u1: MonotoneMap) -> CoinserterResult:
    _check_parallel(u0, u1)
    X = u0.cod
    pre = Preorder.generated(
        X.elements, itertools.chain(X.leq, ((u0(t), u1(t)) for t in u0.dom))
    )
    quotient, class_of = pre.quotient()
    return CoinserterResult(quotient, MonotoneMap(X, quotient, class_of), class_of)


@dataclass(frozen=True)
class PrekernelPair:
    pairs: Poset
    p0: MonotoneMap
    p1: MonotoneMap

    def __iter__(self):
        return iter((self.pairs, self.p0, self.p1))


def prekernel_pair_pos(f: MonotoneMap) -> PrekernelPair:
    X = f.dom
    elements = tuple((a, b) for a in X for b in X if f.cod.le(f(a), f(b)))
    leq = frozenset(
        (x, y) for x in elements for y in elements if X.le(x[0], y[0]) and X.le(x[1], y[1])
    )
    U = Poset(elements, leq)
    return PrekernelPair(
        U,
        MonotoneMap(U, X, {x: x[0] for x in elements}),
        MonotoneMap(U, X, {x: x[1] for x in elements}),
    )


def factor_pos(f: MonotoneMap) -> tuple[MonotoneMap, MonotoneMap]:
    """(surjection, embedding) factorization: f = m . c."""
    _, p0, p1 = prekernel_pair_pos(f)
    res = coinserter_pos(p0, p1)
    m = MonotoneMap(res.quotient, f.cod, {q: f(q) for q in res.quotient})
    return res.map, m


# -- isomorphism and enumeration ----------------------------------------


def _invariant(P: Poset, a) -> tuple[int, int]:
    return (len(P.down(a)), len(P.up(a)))


def find_isomorphism(P: Poset, Q: Poset, fixed: Mapping | None = None) -> MonotoneMap | None:
    """Backtracking search for an order isomorphism P -> Q extending ``fixed``."""
    if len(P) != len(Q) or len(P.leq) != len(Q.leq):
        return None
    inv_p = {a: _invariant(P, a) for a in P}
    inv_q = {b: _invariant(Q, b) for b in Q}
    if sorted(inv_p.values()) != sorted(inv_q.values()):
        return None
    assign = dict(fixed or {})
    if len(set(assign.values())) != len(assign):
        return None
    for a, b in assign.items():
        if inv_p[a] != inv_q[b]:
            return None
    order = [a for a in P if a not in assign]
    used = set(assign.values())

    def consistent(a, b) -> bool:
        for c, d in assign.items():
            if P.le(a, c) != Q.le(b, d) or P.le(c, a) != Q.le(d, b):
                return False
        return True

    for a, b in list(assign.items()):
        del assign[a]
        if not consistent(a, b):
            return None
        assign[a] = b

    def search(k: int) -> bool:
        if k == len(order):
            return True
        a = order[k]
        for b in Q:
            if b in used or inv_q[b] != inv_p[a] or not consistent(a, b):
                continue
            assign[a] = b
            used.add(b)
            if search(k + 1):
                return True
            del assign[a]
            used.discard(b)
        return False

    if search(0):
        return MonotoneMap(P, Q, assign)
    return None


def is_isomorphic(P: Poset, Q: Poset) -> bool:
    return find_isomorphism(P, Q) is not None


def iso_over(c1: MonotoneMap, c2: MonotoneMap) -> MonotoneMap | None:
    """An isomorphism phi: cod(c1) -> cod(c2) with phi . c1 = c2, if any."""
    if c1.dom != c2.dom:
        return None
    fixed = {}
    for x in c1.dom:
        y = c1(x)
        if y in fixed and fixed[y] != c2(x):
            return None
        fixed[y] = c2(x)
    return find_isomorphism(c1.cod, c2.cod, fixed)


def _canonical_code(n: int, strict: frozenset) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        code = tuple(sorted((perm[a], perm[b]) for a, b in strict))
        if best is None or code < best:
            best = code
    return best


@lru_cache(maxsize=None)
def enumerate_posets(n: int) -> tuple[Poset, ...]:
    """All posets on elements 0..n-1 up to isomorphism (naturally labelled)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    seen = set()
    out = []
    for mask in range(1 << len(slots)):
        strict = frozenset(s for k, s in enumerate(slots) if mask >> k & 1)
        if any(
            (a, c) not in strict
            for a, b in strict
            for b2, c in strict
            if b == b2
        ):
            continue
        code = _canonical_code(n, strict)
        if code in seen:
            continue
        seen.add(code)
        out.append(Poset(tuple(range(n)), strict | {(i, i) for i in range(n)}))
    return tuple(out)


def posets_up_to(bound: int) -> list[Poset]:
    return [P for n in range(bound + 1) for P in enumerate_posets(n)]


def monotone_maps(P: Poset, Q: Poset) -> Iterator[MonotoneMap]:
    for values in _monotone_tables(P, Q):
        yield MonotoneMap(P, Q, dict(zip(P.elements, values)))


@lru_cache(maxsize=4096)
def _monotone_tables(P: Poset, Q: Poset) -> tuple[tuple, ...]:
    """Value tuples (in P's element order) of all monotone maps P -> Q."""
    n = len(P)
    lower = [[j for j in range(i) if P.le(P.elements[j], P.elements[i])] for i in range(n)]
    upper = [[j for j in range(i) if P.le(P.elements[i], P.elements[j])] for i in range(n)]
    out = []
    current = [None] * n

    def search(i):
        if i == n:
            out.append(tuple(current))
            return
        for b in Q:
            if all(Q.le(current[j], b) for j in lower[i]) and all(
                Q.le(b, current[j]) for j in upper[i]
            ):
                current[i] = b
                search(i + 1)
        current[i] = None

    search(0)
    return tuple(out)


def automorphisms(P: Poset) -> list[MonotoneMap]:
    return [
        m
        for m in (
            MonotoneMap(P, P, dict(zip(P.elements, perm)))
            for perm in itertools.permutations(P.elements)
            if _is_order_iso(P, dict(zip(P.elements, perm)))
        )
    ]


def _is_order_iso(P: Poset, table: dict) -> bool:
    return all(P.le(a, b) == P.le(table[a], table[b]) for a in P for b in P)


# -- universal-property oracle ----------------------------------------------


def verify_coinserter_pos(
    u0: MonotoneMap, u1: MonotoneMap, candidate: MonotoneMap, probe_bound: int = 4
) -> Verdict:
    """Brute-force check that ``candidate`` is a coinserter of (u0, u1).

    Probes every poset with at most ``probe_bound`` elements (up to iso).
    """
    _check_parallel(u0, u1)
    if candidate.dom != u0.cod:
        raise PosetError("candidate must start at the codomain of the pair")
    if probe_bound < 0:
        raise ValueError("probe_bound must be non-negative")
    if probe_bound == 0:
        warnings.warn("probe bound 0 enumerates only the empty poset", ProbeBoundTooSmall)
    X, Y = u0.cod, candidate.cod
    U = u0.dom
    for t in U:
        if not Y.le(candidate(u0(t)), candidate(u1(t))):
            return Verdict(
                False, "fail", witness=("inequality", t), detail="candidate.u0 <= candidate.u1 fails"
            )
    xs = X.elements
    cx = [Y.index(candidate(x)) for x in xs]
    pair_idx = [(X.index(u0(t)), X.index(u1(t))) for t in U]
    image = frozenset(cx)
    for probe in posets_up_to(probe_bound):
        leq = probe.leq
        composites = {tuple(g[i] for i in cx) for g in _monotone_tables(Y, probe)}
        for f in _monotone_tables(X, probe):
            if all((f[a], f[b]) in leq for a, b in pair_idx) and f not in composites:
                return Verdict(
                    False,
                    "fail",
                    witness=("factorization", probe, dict(zip(xs, f))),
                    detail="a map coinserting the pair does not factor through the candidate",
                )
        bad = _reflection_failure(Y, probe, image)
        if bad is not None:
            g, h = bad
            return Verdict(
                False,
                "fail",
                witness=("reflection", probe, dict(zip(Y.elements, g)), dict(zip(Y.elements, h))),
                detail="g.c <= h.c does not imply g <= h",
            )
    return Verdict(True, "pass")


@lru_cache(maxsize=65536)
def _reflection_failure(Y: Poset, probe: Poset, image: frozenset):
    """First (g, h): Y -> probe with g <= h on ``image`` (indices) but not everywhere."""
    leq = probe.leq
    img = sorted(image)
    gs = _monotone_tables(Y, probe)
    for g in gs:
        for h in gs:
            if all((g[i], h[i]) in leq for i in img) and not all(
                (a, b) in leq for a, b in zip(g, h)
            ):
                return g, h
    return None
