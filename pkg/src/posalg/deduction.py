"""Bounded saturation for inequational logic, with derivation certificates.

The rules are: reflexivity, the order of the generators, substitution
instances of axioms, transitivity and monotonicity of every operation.
All of them are applied only to terms that lie in a fixed finite universe,
which is what makes the procedure terminate (and incomplete at a fixed
size: ``derivable`` may answer "inconclusive", never "not derivable").
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .poset import Poset, Preorder, make_poset
from .terms import (
    App,
    Gen,
    Inequation,
    Presentation,
    Signature,
    Term,
    Var,
    check_term,
    substitute,
    subterms,
    term_key,
    variables,
)
from .verdict import Verdict

DEFAULT_CAP = 6000


class UniverseOverflow(RuntimeError):
    pass


class TermUniverse:
    """A finite, subterm-closed set of ground terms over generators."""

    def __init__(self, sig: Signature, generators: Poset, terms: Iterable[Term] = (), cap: int = DEFAULT_CAP):
        self.sig = sig
        self.generators = generators
        self.cap = cap
        found = {Gen(a) for a in generators}
        for t in terms:
            for s in subterms(t):
                if isinstance(s, Var):
                    raise ValueError(f"universe terms must be ground, found variable {s}")
                if isinstance(s, Gen) and s.value not in generators:
                    raise ValueError(f"unknown generator {s.value!r}")
                if isinstance(s, App):
                    check_term(s, sig)
                found.add(s)
        if len(found) > cap:
            raise UniverseOverflow(f"{len(found)} terms exceed the cap of {cap}")
        self.terms = tuple(sorted(found, key=term_key))
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, t) -> bool:
        return t in self.index

    def __iter__(self):
        return iter(self.terms)

    @classmethod
    def by_depth(cls, sig: Signature, generators: Poset, depth: int, cap: int = DEFAULT_CAP, extra=()) -> TermUniverse:
        """All terms of depth <= ``depth`` (generators have depth 0), plus ``extra``."""
        terms = [Gen(a) for a in generators]
        for _ in range(depth):
            new = list(terms)
            seen = set(terms)
            for op, arity in sig.ops:
                for args in itertools.product(terms, repeat=arity):
                    t = App(op, args)
                    if t not in seen:
                        seen.add(t)
                        new.append(t)
                        if len(new) > cap:
                            raise UniverseOverflow(f"more than {cap} terms at depth {depth}")
            terms = new
        return cls(sig, generators, itertools.chain(terms, extra), cap)

    def extended(self, more: Iterable[Term]) -> TermUniverse:
        return TermUniverse(self.sig, self.generators, itertools.chain(self.terms, more), self.cap)

    @property
    def depth_bound(self) -> int:
        return max((t.depth() for t in self.terms), default=0)


def match(pattern: Term, term: Term, binding: dict) -> dict | None:
    if isinstance(pattern, Var):
        bound = binding.get(pattern.name)
        if bound is None:
            out = dict(binding)
            out[pattern.name] = term
            return out
        return binding if bound == term else None
    if isinstance(pattern, Gen):
        return binding if pattern == term else None
    if not isinstance(term, App) or term.op != pattern.op or len(term.args) != len(pattern.args):
        return None
    for p, t in zip(pattern.args, term.args):
        binding = match(p, t, binding)
        if binding is None:
            return None
    return binding


def axiom_instances(pres: Presentation, universe: TermUniverse):
    """Yield (axiom index, substitution, lhs id, rhs id) for instances inside the universe."""
    for k, ax in enumerate(pres.axioms):
        lhs_vars = set(variables(ax.lhs))
        rhs_extra = [v for v in variables(ax.rhs) if v not in lhs_vars]
        for u in universe.terms:
            sigma = match(ax.lhs, u, {})
            if sigma is None:
                continue
            if not rhs_extra:
                r = substitute(ax.rhs, sigma)
                j = universe.index.get(r)
                if j is not None:
                    yield k, sigma, universe.index[u], j
            else:
                for w in universe.terms:
                    tau = match(ax.rhs, w, sigma)
                    if tau is not None:
                        yield k, tau, universe.index[u], universe.index[w]


# -- derivations ---------------------------------------------------------------


@dataclass(frozen=True)
class Step:
    rule: str  # "refl" | "gen" | "axiom" | "trans" | "mono"
    lhs: Term
    rhs: Term
    data: tuple = ()

    def __str__(self) -> str:
        return f"{self.lhs} <= {self.rhs}  [{self.rule}{' ' + _fmt(self.data) if self.data else ''}]"


def _fmt(data) -> str:
    return " ".join(str(x) if not isinstance(x, dict) else "{" + ", ".join(f"{k}:={v}" for k, v in x.items()) + "}" for x in data)


@dataclass(frozen=True)
class Derivation:
    steps: tuple

    @property
    def conclusion(self) -> tuple[Term, Term]:
        last = self.steps[-1]
        return last.lhs, last.rhs

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        return "\n".join(f"{i}: {s}" for i, s in enumerate(self.steps))


# -- saturation ----------------------------------------------------------------


class Saturation:
    """Least derivable preorder on a universe, with a justification per pair."""

    def __init__(self, pres: Presentation, universe: TermUniverse):
        self.pres = pres
        self.universe = universe
        n = len(universe)
        self.succ = [1 << i for i in range(n)]
        self.pred = [1 << i for i in range(n)]
        self.just: dict[tuple[int, int], tuple] = {}
        self._run()

    def _run(self):
        U = self.universe
        terms = U.terms
        succ, pred, just = self.succ, self.pred, self.just
        queue = deque()

        def add(s, t, why):
            if succ[s] >> t & 1:
                return
            succ[s] |= 1 << t
            pred[t] |= 1 << s
            just[(s, t)] = why
            queue.append((s, t))

        parents = {}
        for p, t in enumerate(terms):
            if isinstance(t, App):
                for i, a in enumerate(t.args):
                    parents.setdefault((U.index[a], t.op, i), []).append(p)
        arg_ids = {
            p: tuple(U.index[a] for a in t.args) for p, t in enumerate(terms) if isinstance(t, App)
        }

        for a, b in U.generators.leq:
            if a != b:
                add(U.index[Gen(a)], U.index[Gen(b)], ("gen",))
        for k, sigma, i, j in axiom_instances(self.pres, U):
            add(i, j, ("axiom", k, tuple(sorted(sigma.items()))))

        ops = [(op, ar) for op, ar in U.sig.ops if ar > 0]
        while queue:
            s, t = queue.popleft()
            m = pred[s] & ~pred[t]
            while m:
                low = m & -m
                add(low.bit_length() - 1, t, ("trans", s))
                m ^= low
            m = succ[t] & ~succ[s]
            while m:
                low = m & -m
                add(s, low.bit_length() - 1, ("trans", t))
                m ^= low
            for op, arity in ops:
                for i in range(arity):
                    ps = parents.get((s, op, i))
                    if not ps:
                        continue
                    qs = parents.get((t, op, i))
                    if not qs:
                        continue
                    for p in ps:
                        xs = arg_ids[p]
                        for q in qs:
                            if succ[p] >> q & 1:
                                continue
                            ys = arg_ids[q]
                            if all(succ[x] >> y & 1 for x, y in zip(xs, ys)):
                                add(p, q, ("mono",))

    def le(self, s: Term, t: Term) -> bool:
        i = self.universe.index[s]
        j = self.universe.index[t]
        return bool(self.succ[i] >> j & 1)

    def pairs(self) -> list[tuple[Term, Term]]:
        terms = self.universe.terms
        return [
            (terms[i], terms[j])
            for i in range(len(terms))
            for j in range(len(terms))
            if self.succ[i] >> j & 1
        ]

    def pair_count(self) -> int:
        return sum(bin(x).count("1") for x in self.succ)

    def preorder(self) -> Preorder:
        return Preorder(self.universe.terms, frozenset(self.pairs()))

    def classes(self) -> tuple[Poset, dict]:
        """Quotient by the symmetric part; representatives are least in term order."""
        terms = self.universe.terms
        n = len(terms)
        class_of = {}
        for i in range(n):
            if terms[i] in class_of:
                continue
            eq = self.succ[i] & self.pred[i]
            while eq:
                low = eq & -eq
                class_of[terms[low.bit_length() - 1]] = terms[i]
                eq ^= low
        reps = [t for t in terms if class_of[t] == t]
        pairs = []
        for r in reps:
            i = self.universe.index[r]
            for r2 in reps:
                if self.succ[i] >> self.universe.index[r2] & 1:
                    pairs.append((r, r2))
        return Poset(tuple(reps), frozenset(pairs)), class_of

    def derivation(self, s: Term, t: Term) -> Derivation:
        U = self.universe
        i, j = U.index[s], U.index[t]
        if not self.succ[i] >> j & 1:
            raise ValueError(f"{s} <= {t} was not derived")
        steps: list[Step] = []
        done: dict[tuple[int, int], int] = {}
        terms = U.terms

        def premises(pair):
            a, b = pair
            if a == b:
                return []
            why = self.just[pair]
            if why[0] == "trans":
                m = why[1]
                return [(a, m), (m, b)]
            if why[0] == "mono":
                ta, tb = terms[a], terms[b]
                return [(U.index[x], U.index[y]) for x, y in zip(ta.args, tb.args)]
            return []

        stack = [((i, j), False)]
        while stack:
            pair, expanded = stack.pop()
            if pair in done:
                continue
            if not expanded:
                stack.append((pair, True))
                for p in reversed(premises(pair)):
                    if p not in done:
                        stack.append((p, False))
                continue
            a, b = pair
            ta, tb = terms[a], terms[b]
            if a == b:
                step = Step("refl", ta, tb)
            else:
                why = self.just[pair]
                if why[0] == "gen":
                    step = Step("gen", ta, tb, (ta.value, tb.value))
                elif why[0] == "axiom":
                    step = Step("axiom", ta, tb, (why[1], dict(why[2])))
                elif why[0] == "trans":
                    m = why[1]
                    step = Step("trans", ta, tb, (done[(a, m)], done[(m, b)]))
                else:
                    step = Step(
                        "mono",
                        ta,
                        tb,
                        (ta.op, tuple(done[p] for p in premises(pair))),
                    )
            done[pair] = len(steps)
            steps.append(step)
        return Derivation(tuple(steps))


def saturate(pres: Presentation, universe: TermUniverse) -> Saturation:
    return Saturation(pres, universe)


# -- goals -------------------------------------------------------------------------


def skolemize(goal: Inequation) -> tuple[Poset, Term, Term]:
    """Replace the goal's variables by fresh discrete generator constants."""
    gens = make_poset(goal.context)
    sub = {v: Gen(v) for v in goal.context}
    return gens, substitute(goal.lhs, sub), substitute(goal.rhs, sub)


def derivable(
    pres: Presentation,
    goal: Inequation | tuple,
    depth: int = 2,
    generators: Poset | None = None,
    cap: int = DEFAULT_CAP,
) -> Verdict:
    """Try to derive ``goal``; ``proven`` carries a replayable :class:`Derivation`.

    ``goal`` is an :class:`Inequation` (its variables are Skolemized) or a
    ground pair of terms over ``generators``.
    """
    if isinstance(goal, Inequation):
        gens, s, t = skolemize(goal)
        if generators is not None:
            raise ValueError("generators are implied by the goal's context")
    else:
        s, t = goal
        gens = generators if generators is not None else make_poset([])
    U = TermUniverse.by_depth(pres.sig, gens, depth, cap=cap, extra=(s, t))
    sat = saturate(pres, U)
    if sat.le(s, t):
        return Verdict(True, "proven", witness=sat.derivation(s, t), detail=f"{s} <= {t}")
    return Verdict(False, "inconclusive", detail=f"{s} <= {t} not derived within depth {depth}")
