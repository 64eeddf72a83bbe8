"""Terms over a finitary signature, inequations and presentations.

Concrete syntax: prefix application ``op(t1,...,tn)``; identifiers match
``[A-Za-z_][A-Za-z0-9_]*``; a constant is written ``e()`` or bare ``e``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, Sequence


class TermError(ValueError):
    pass


class TermSyntaxError(TermError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class UnboundVariable(TermError):
    pass


class SignatureMismatch(TermError):
    pass


@dataclass(frozen=True)
class Signature:
    ops: tuple

    def __post_init__(self):
        ops = tuple((str(s), int(n)) for s, n in self.ops)
        object.__setattr__(self, "ops", ops)
        seen = set()
        for sym, arity in ops:
            if sym in seen:
                raise TermError(f"duplicate operation symbol {sym!r}")
            if arity < 0:
                raise TermError(f"negative arity for {sym!r}")
            seen.add(sym)

    def arity(self, sym: str) -> int:
        for s, n in self.ops:
            if s == sym:
                return n
        raise SignatureMismatch(f"unknown operation {sym!r}")

    def __contains__(self, sym) -> bool:
        return any(s == sym for s, _ in self.ops)

    def constants(self) -> list[str]:
        return [s for s, n in self.ops if n == 0]

    def max_arity(self) -> int:
        return max((n for _, n in self.ops), default=0)


# -- terms -------------------------------------------------------------------


class Term:
    __slots__ = ()

    def depth(self) -> int:
        raise NotImplementedError

    def size(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class Var(Term):
    name: str

    def depth(self) -> int:
        return 0

    def size(self) -> int:
        return 1

    def __str__(self) -> str:
        return self.name

    __repr__ = __str__


@dataclass(frozen=True)
class Gen(Term):
    """A generator constant standing for an element of a poset."""

    value: Hashable

    def depth(self) -> int:
        return 0

    def size(self) -> int:
        return 1

    def __str__(self) -> str:
        return str(self.value)

    __repr__ = __str__


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple = ()
    _depth: int = field(init=False, repr=False, compare=False)
    _size: int = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        args = tuple(self.args)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "_depth", 1 + max((a.depth() for a in args), default=0))
        object.__setattr__(self, "_size", 1 + sum(a.size() for a in args))
        object.__setattr__(self, "_hash", hash((self.op, args)))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, App):
            return NotImplemented
        return self._hash == other._hash and self.op == other.op and self.args == other.args

    def depth(self) -> int:
        return self._depth

    def size(self) -> int:
        return self._size

    def __str__(self) -> str:
        return f"{self.op}({','.join(str(a) for a in self.args)})"

    __repr__ = __str__


def term_key(t: Term) -> tuple:
    """Total order used to pick class representatives: depth, size, text."""
    return (t.depth(), t.size(), str(t))


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def variables(t: Term) -> list[str]:
    out = []
    for s in subterms(t):
        if isinstance(s, Var) and s.name not in out:
            out.append(s.name)
    return out


def substitute(t: Term, sub: Mapping) -> Term:
    """Replace variables (keyed by name) and generators (keyed by Gen) throughout."""
    if isinstance(t, Var):
        return sub.get(t.name, t)
    if isinstance(t, Gen):
        return sub.get(t, t)
    return App(t.op, tuple(substitute(a, sub) for a in t.args))


def check_term(t: Term, sig: Signature):
    for s in subterms(t):
        if isinstance(s, App) and sig.arity(s.op) != len(s.args):
            raise SignatureMismatch(
                f"{s.op} has arity {sig.arity(s.op)} but is applied to {len(s.args)} arguments"
            )


# -- parsing -----------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class _TermParser:
    def __init__(self, text: str, sig: Signature | None, variables, line: int, col: int):
        self.text = text
        self.pos = 0
        self.sig = sig
        self.variables = variables
        self.line = line
        self.col = col

    def error(self, msg: str):
        raise TermSyntaxError(msg, self.line, self.col + self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def term(self) -> Term:
        self.skip()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.error("expected an identifier")
        name = m.group()
        start = self.pos
        self.pos = m.end()
        self.skip()
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            self.pos += 1
            args = []
            self.skip()
            if self.pos < len(self.text) and self.text[self.pos] == ")":
                self.pos += 1
            else:
                while True:
                    args.append(self.term())
                    self.skip()
                    if self.pos < len(self.text) and self.text[self.pos] == ",":
                        self.pos += 1
                        continue
                    if self.pos < len(self.text) and self.text[self.pos] == ")":
                        self.pos += 1
                        break
                    self.error("expected ',' or ')'")
            if self.sig is not None:
                if name not in self.sig:
                    self.pos = start
                    self.error(f"unknown operation {name!r}")
                if self.sig.arity(name) != len(args):
                    self.pos = start
                    self.error(f"{name} expects {self.sig.arity(name)} arguments, got {len(args)}")
            return App(name, tuple(args))
        if self.sig is not None and name in self.sig and self.sig.arity(name) == 0:
            return App(name)
        if self.variables is not None and name not in self.variables:
            self.pos = start
            self.error(f"undeclared variable {name!r}")
        return Var(name)


def parse_term(
    text: str,
    sig: Signature | None = None,
    variables: Iterable[str] | None = None,
    line: int = 1,
    col: int = 1,
) -> Term:
    p = _TermParser(text, sig, None if variables is None else set(variables), line, col)
    t = p.term()
    p.skip()
    if p.pos != len(text):
        p.error("trailing input after term")
    return t


def parse_term_prefix(
    text: str, sig: Signature | None, variables, line: int = 1, col: int = 1
) -> tuple[Term, str]:
    """Parse one term from the front of ``text``; return it with the remainder."""
    p = _TermParser(text, sig, None if variables is None else set(variables), line, col)
    t = p.term()
    return t, text[p.pos :]


# -- inequations and presentations ----------------------------------------------


@dataclass(frozen=True)
class Inequation:
    context: tuple
    lhs: Term
    rhs: Term

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))
        for name in variables(self.lhs) + variables(self.rhs):
            if name not in self.context:
                raise UnboundVariable(f"variable {name!r} is not in the context")

    @classmethod
    def of(cls, lhs: Term, rhs: Term) -> Inequation:
        ctx = variables(lhs)
        ctx += [v for v in variables(rhs) if v not in ctx]
        return cls(tuple(ctx), lhs, rhs)

    def flipped(self) -> Inequation:
        return Inequation(self.context, self.rhs, self.lhs)

    def __str__(self) -> str:
        return f"{self.lhs} <= {self.rhs}"


def parse_inequation(text: str, sig: Signature | None = None) -> list[Inequation]:
    """``s <= t``, ``s >= t`` or ``s = t`` (the last expands to two inequations)."""
    for token, kind in (("<=", "le"), (">=", "ge"), ("=", "eq")):
        if token in text:
            left, right = text.split(token, 1)
            s = parse_term(left.strip(), sig)
            t = parse_term(right.strip(), sig)
            if kind == "le":
                return [Inequation.of(s, t)]
            if kind == "ge":
                return [Inequation.of(t, s)]
            ineq = Inequation.of(s, t)
            return [ineq, ineq.flipped()]
    raise TermSyntaxError("expected '<=', '>=' or '=' in inequation")


@dataclass(frozen=True)
class Presentation:
    sig: Signature
    axioms: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for ax in self.axioms:
            check_term(ax.lhs, self.sig)
            check_term(ax.rhs, self.sig)

    @classmethod
    def build(cls, sig: Signature, les: Sequence = (), eqs: Sequence = (), name: str = ""):
        """Convenience constructor from (lhs, rhs) text or term pairs."""
        axioms = []

        def term(x):
            return parse_term(x, sig) if isinstance(x, str) else x

        for s, t in eqs:
            ineq = Inequation.of(term(s), term(t))
            axioms += [ineq, ineq.flipped()]
        for s, t in les:
            axioms.append(Inequation.of(term(s), term(t)))
        return cls(sig, tuple(axioms), name)
