"""Independent checkers for the saturation engine.

Nothing here reuses the engine's closure or matching code: certificates are
replayed step by step, and ``naive_fixpoint`` recomputes the closure by
re-applying every rule until nothing changes.
"""

from __future__ import annotations

import itertools

from .poset import Poset
from .terms import App, Gen, Presentation, Term, Var
from .verdict import Verdict


def _inst(t: Term, sub: dict) -> Term:
    if isinstance(t, Var):
        if t.name not in sub:
            raise KeyError(t.name)
        return sub[t.name]
    if isinstance(t, App):
        return App(t.op, tuple(_inst(a, sub) for a in t.args))
    return t


def check_derivation(pres: Presentation, generators: Poset, derivation) -> Verdict:
    """Replay a derivation; every step must follow from earlier ones."""
    steps = derivation.steps
    if not steps:
        return Verdict(False, "invalid", detail="empty derivation")
    for n, step in enumerate(steps):
        lhs, rhs = step.lhs, step.rhs

        def bad(msg):
            return Verdict(False, "invalid", witness=n, detail=f"step {n}: {msg}")

        def premise(k):
            if not isinstance(k, int) or not 0 <= k < n:
                return None
            return steps[k]

        if step.rule == "refl":
            if lhs != rhs:
                return bad("reflexivity with different sides")
        elif step.rule == "gen":
            a, b = step.data
            if lhs != Gen(a) or rhs != Gen(b) or not generators.le(a, b):
                return bad("not an instance of the generator order")
        elif step.rule == "axiom":
            k, sub = step.data
            if not 0 <= k < len(pres.axioms):
                return bad("no such axiom")
            ax = pres.axioms[k]
            try:
                if _inst(ax.lhs, sub) != lhs or _inst(ax.rhs, sub) != rhs:
                    return bad("substitution does not produce the stated sides")
            except KeyError as e:
                return bad(f"substitution misses variable {e}")
        elif step.rule == "trans":
            i, j = step.data
            p, q = premise(i), premise(j)
            if p is None or q is None:
                return bad("premise does not precede the step")
            if p.lhs != lhs or q.rhs != rhs or p.rhs != q.lhs:
                return bad("premises do not chain")
        elif step.rule == "mono":
            op, comps = step.data
            if not (isinstance(lhs, App) and isinstance(rhs, App)):
                return bad("monotonicity needs applications")
            if lhs.op != op or rhs.op != op or pres.sig.arity(op) != len(comps):
                return bad("operation mismatch")
            if len(lhs.args) != len(comps) or len(rhs.args) != len(comps):
                return bad("arity mismatch")
            for k, a, b in zip(comps, lhs.args, rhs.args):
                p = premise(k)
                if p is None or p.lhs != a or p.rhs != b:
                    return bad("component premise mismatch")
        else:
            return bad(f"unknown rule {step.rule!r}")
    return Verdict(True, "valid")


def _match(p: Term, t: Term, sub: dict):
    if isinstance(p, Var):
        if p.name in sub:
            return sub if sub[p.name] == t else None
        return {**sub, p.name: t}
    if isinstance(p, App):
        if not isinstance(t, App) or t.op != p.op or len(t.args) != len(p.args):
            return None
        for pa, ta in zip(p.args, t.args):
            sub = _match(pa, ta, sub)
            if sub is None:
                return None
        return sub
    return sub if p == t else None


def naive_fixpoint(pres: Presentation, generators: Poset, terms) -> set:
    """Closure by blind iteration of all rules (no worklist).  Small universes only."""
    terms = list(terms)
    inside = set(terms)
    rel = {(t, t) for t in terms}
    for a, b in generators.leq:
        if Gen(a) in inside and Gen(b) in inside:
            rel.add((Gen(a), Gen(b)))
    for ax in pres.axioms:
        for u in terms:
            sub = _match(ax.lhs, u, {})
            if sub is None:
                continue
            for w in terms:
                if _match(ax.rhs, w, sub) is not None:
                    rel.add((u, w))
    apps = [t for t in terms if isinstance(t, App)]
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c in terms:
                if (b, c) in rel and (a, c) not in rel:
                    rel.add((a, c))
                    changed = True
        for p, q in itertools.product(apps, apps):
            if p.op == q.op and (p, q) not in rel:
                if all((x, y) in rel for x, y in zip(p.args, q.args)):
                    rel.add((p, q))
                    changed = True
    return rel
