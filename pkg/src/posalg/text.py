"""Line-oriented workspace format (``.oal`` files).

::

    signature SL
      op meet 2
    end
    poset P
      elem a b
      le a b
    end
    presentation SL over SL
      var x y
      le meet(x,y) x
      eq meet(x,y) meet(y,x)
    end
    algebra MIN2 over SL carrier C2
      op meet (0,1) -> 0
    end
    map f : P -> Q
      send a -> b
    end
    hom h : A -> B
      send a -> b
    end

``#`` starts a comment.  Names are unique per kind.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .algebra import AlgebraError, Homomorphism, OrderedAlgebra
from .poset import MonotoneMap, Poset, PosetError, make_poset
from .terms import (
    Inequation,
    Presentation,
    Signature,
    TermError,
    TermSyntaxError,
    parse_term_prefix,
    variables,
)

KINDS = ("signature", "poset", "presentation", "algebra", "map", "hom")

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_ELEM = re.compile(r"[A-Za-z0-9_]+$")


class WorkspaceError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.col = col


class WorkspaceSyntaxError(WorkspaceError):
    pass


class UnknownReference(WorkspaceError):
    pass


class ValidationError(WorkspaceError):
    pass


@dataclass
class Workspace:
    signatures: dict = field(default_factory=dict)
    posets: dict = field(default_factory=dict)
    presentations: dict = field(default_factory=dict)
    algebras: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    homs: dict = field(default_factory=dict)

    def table(self, kind: str) -> dict:
        return {
            "signature": self.signatures,
            "poset": self.posets,
            "presentation": self.presentations,
            "algebra": self.algebras,
            "map": self.maps,
            "hom": self.homs,
        }[kind]

    def get(self, kind: str, name: str):
        try:
            return self.table(kind)[name]
        except KeyError:
            raise UnknownReference(f"no {kind} named {name!r}") from None

    def name_of(self, kind: str, value) -> str | None:
        for name, v in self.table(kind).items():
            if v is value:
                return name
        for name, v in self.table(kind).items():
            if v == value:
                return name
        return None

    def merge(self, other: Workspace) -> Workspace:
        for kind in KINDS:
            mine = self.table(kind)
            for name, value in other.table(kind).items():
                if name in mine:
                    raise ValidationError(f"{kind} {name!r} is defined twice")
                mine[name] = value
        return self


def _strip(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def parse_workspace(source: str, base: Workspace | None = None) -> Workspace:
    """Parse a workspace; objects may refer to names already in ``base``."""
    ws = Workspace()
    scope = Workspace()
    if base is not None:
        scope.merge(base)
    lines = source.splitlines()
    i = 0

    def lookup(kind, name, lineno, col):
        try:
            return scope.get(kind, name)
        except UnknownReference:
            raise UnknownReference(f"no {kind} named {name!r}", lineno, col) from None

    def define(kind, name, value, lineno):
        if name in ws.table(kind) or name in scope.table(kind):
            raise ValidationError(f"{kind} {name!r} is defined twice", lineno, 1)
        ws.table(kind)[name] = value
        scope.table(kind)[name] = value

    while i < len(lines):
        header = _strip(lines[i])
        lineno = i + 1
        i += 1
        if not header.strip():
            continue
        words = header.split()
        kind = words[0]
        if kind not in KINDS:
            raise WorkspaceSyntaxError(f"expected one of {', '.join(KINDS)}, got {kind!r}", lineno, 1)
        body = []
        while True:
            if i >= len(lines):
                raise WorkspaceSyntaxError(f"{kind} block is not closed with 'end'", lineno, 1)
            text = _strip(lines[i])
            i += 1
            if text.strip() == "end":
                break
            if text.strip():
                body.append((i, text))
        try:
            name, value = _parse_block(kind, words, header, lineno, body, lookup)
        except (PosetError, AlgebraError, TermError) as e:
            if isinstance(e, TermSyntaxError):
                raise WorkspaceSyntaxError(str(e).split(": ", 1)[-1], e.line, e.col) from None
            raise ValidationError(str(e), lineno, 1) from None
        define(kind, name, value, lineno)
    return ws


def _col(line: str, token: str) -> int:
    k = line.find(token)
    return k + 1 if k >= 0 else 1


def _expect_name(token: str, line: str, lineno: int) -> str:
    if not _NAME.match(token):
        raise WorkspaceSyntaxError(f"bad name {token!r}", lineno, _col(line, token))
    return token


def _parse_block(kind, words, header, lineno, body, lookup):
    if kind == "signature":
        if len(words) != 2:
            raise WorkspaceSyntaxError("expected 'signature NAME'", lineno, 1)
        name = _expect_name(words[1], header, lineno)
        ops = []
        for ln, text in body:
            w = text.split()
            if len(w) != 3 or w[0] != "op" or not w[2].isdigit():
                raise WorkspaceSyntaxError("expected 'op SYMBOL ARITY'", ln, _col(text, w[0]))
            ops.append((_expect_name(w[1], text, ln), int(w[2])))
        return name, Signature(tuple(ops))

    if kind == "poset":
        if len(words) != 2:
            raise WorkspaceSyntaxError("expected 'poset NAME'", lineno, 1)
        name = _expect_name(words[1], header, lineno)
        elems, pairs = [], []
        for ln, text in body:
            w = text.split()
            if w[0] == "elem":
                for e in w[1:]:
                    if not _ELEM.match(e):
                        raise WorkspaceSyntaxError(f"bad element {e!r}", ln, _col(text, e))
                    elems.append(e)
            elif w[0] == "le":
                if len(w) != 3:
                    raise WorkspaceSyntaxError("expected 'le A B'", ln, 1)
                for e in w[1:]:
                    if e not in elems:
                        raise UnknownReference(f"undeclared element {e!r}", ln, _col(text, e))
                pairs.append((w[1], w[2]))
            else:
                raise WorkspaceSyntaxError(f"unexpected {w[0]!r} in poset", ln, _col(text, w[0]))
        return name, make_poset(elems, pairs)

    if kind == "presentation":
        if len(words) != 4 or words[2] != "over":
            raise WorkspaceSyntaxError("expected 'presentation NAME over SIGNATURE'", lineno, 1)
        name = _expect_name(words[1], header, lineno)
        sig = lookup("signature", words[3], lineno, _col(header, words[3]))
        context: list[str] = []
        axioms = []
        for ln, text in body:
            stripped = text.lstrip()
            indent = len(text) - len(stripped)
            w = stripped.split(None, 1)
            if w[0] == "var":
                for v in w[1].split() if len(w) > 1 else []:
                    if not _NAME.match(v) or v in sig:
                        raise WorkspaceSyntaxError(f"bad variable {v!r}", ln, _col(text, v))
                    if v not in context:
                        context.append(v)
            elif w[0] in ("le", "eq"):
                rest = w[1] if len(w) > 1 else ""
                col = indent + len(w[0]) + 2
                lhs, remainder = parse_term_prefix(rest, sig, context, ln, col)
                offset = col + len(rest) - len(remainder)
                if not remainder.strip():
                    raise WorkspaceSyntaxError("expected a second term", ln, offset)
                rhs, tail = parse_term_prefix(remainder, sig, context, ln, offset)
                if tail.strip():
                    raise WorkspaceSyntaxError("trailing input after the second term", ln, offset + len(remainder) - len(tail))
                used = set(variables(lhs)) | set(variables(rhs))
                ineq = Inequation(tuple(v for v in context if v in used), lhs, rhs)
                axioms.append(ineq)
                if w[0] == "eq":
                    axioms.append(ineq.flipped())
            else:
                raise WorkspaceSyntaxError(f"unexpected {w[0]!r} in presentation", ln, indent + 1)
        return name, Presentation(sig, tuple(axioms), name)

    if kind == "algebra":
        if len(words) != 6 or words[2] != "over" or words[4] != "carrier":
            raise WorkspaceSyntaxError("expected 'algebra NAME over SIGNATURE carrier POSET'", lineno, 1)
        name = _expect_name(words[1], header, lineno)
        sig = lookup("signature", words[3], lineno, _col(header, words[3]))
        carrier = lookup("poset", words[5], lineno, _col(header, words[5]))
        tables = {op: {} for op, _ in sig.ops}
        pat = re.compile(r"\s*op\s+([A-Za-z_][A-Za-z0-9_]*)\s*\(([^)]*)\)\s*->\s*(\S+)\s*$")
        for ln, text in body:
            m = pat.match(text)
            if not m:
                raise WorkspaceSyntaxError("expected 'op SYMBOL (E1,...,En) -> E'", ln, 1)
            op, args, val = m.group(1), m.group(2), m.group(3)
            if op not in sig:
                raise UnknownReference(f"operation {op!r} is not in the signature", ln, _col(text, op))
            args = tuple(a.strip() for a in args.split(",")) if args.strip() else ()
            if len(args) != sig.arity(op):
                raise ValidationError(f"{op} takes {sig.arity(op)} arguments", ln, _col(text, "("))
            for e in args + (val,):
                if e not in carrier:
                    raise UnknownReference(f"element {e!r} is not in the carrier", ln, _col(text, e))
            if args in tables[op]:
                raise ValidationError(f"{op}{args} is defined twice", ln, 1)
            tables[op][args] = val
        return name, OrderedAlgebra(sig, carrier, tables)

    if kind in ("map", "hom"):
        if len(words) != 6 or words[2] != ":" or words[4] != "->":
            raise WorkspaceSyntaxError(f"expected '{kind} NAME : SOURCE -> TARGET'", lineno, 1)
        name = _expect_name(words[1], header, lineno)
        obj_kind = "poset" if kind == "map" else "algebra"
        src = lookup(obj_kind, words[3], lineno, _col(header, words[3]))
        dst = lookup(obj_kind, words[5], lineno, _col(header, " " + words[5]) + 1)
        src_p = src if kind == "map" else src.carrier
        dst_p = dst if kind == "map" else dst.carrier
        table = {}
        for ln, text in body:
            w = text.split()
            if len(w) != 4 or w[0] != "send" or w[2] != "->":
                raise WorkspaceSyntaxError("expected 'send A -> B'", ln, 1)
            if w[1] not in src_p:
                raise UnknownReference(f"element {w[1]!r} is not in the source", ln, _col(text, w[1]))
            if w[3] not in dst_p:
                raise UnknownReference(f"element {w[3]!r} is not in the target", ln, text.rfind(w[3]) + 1)
            table[w[1]] = w[3]
        f = MonotoneMap(src_p, dst_p, table)
        return name, (f if kind == "map" else Homomorphism(src, dst, f))

    raise AssertionError(kind)


# -- printing ---------------------------------------------------------------------------


def format_poset(name: str, P: Poset) -> str:
    lines = [f"poset {name}"]
    if P.elements:
        lines.append("  elem " + " ".join(str(a) for a in P.elements))
    for a, b in P.covers():
        lines.append(f"  le {a} {b}")
    lines.append("end")
    return "\n".join(lines)


def format_presentation(name: str, sig_name: str, pres: Presentation) -> str:
    lines = [f"presentation {name} over {sig_name}"]
    context = []
    for ax in pres.axioms:
        for v in ax.context:
            if v not in context:
                context.append(v)
    if context:
        lines.append("  var " + " ".join(context))
    axioms = list(pres.axioms)
    k = 0
    while k < len(axioms):
        ax = axioms[k]
        if k + 1 < len(axioms) and axioms[k + 1].lhs == ax.rhs and axioms[k + 1].rhs == ax.lhs:
            lines.append(f"  eq {ax.lhs} {ax.rhs}")
            k += 2
        else:
            lines.append(f"  le {ax.lhs} {ax.rhs}")
            k += 1
    lines.append("end")
    return "\n".join(lines)


def format_algebra(name: str, sig_name: str, carrier_name: str, A: OrderedAlgebra) -> str:
    lines = [f"algebra {name} over {sig_name} carrier {carrier_name}"]
    for op, arity in A.sig.ops:
        for args in itertools.product(A.carrier.elements, repeat=arity):
            lines.append(f"  op {op} ({','.join(str(a) for a in args)}) -> {A.tables[op][args]}")
    lines.append("end")
    return "\n".join(lines)


def format_map(kind: str, name: str, src: str, dst: str, f: MonotoneMap) -> str:
    lines = [f"{kind} {name} : {src} -> {dst}"]
    for a in f.dom:
        lines.append(f"  send {a} -> {f(a)}")
    lines.append("end")
    return "\n".join(lines)


def print_workspace(ws: Workspace) -> str:
    def ref(kind, value):
        name = ws.name_of(kind, value)
        if name is None:
            raise ValidationError(f"{kind} used in the workspace has no name")
        return name

    blocks = []
    for name, sig in ws.signatures.items():
        blocks.append("\n".join([f"signature {name}"] + [f"  op {s} {n}" for s, n in sig.ops] + ["end"]))
    for name, P in ws.posets.items():
        blocks.append(format_poset(name, P))
    for name, pres in ws.presentations.items():
        blocks.append(format_presentation(name, ref("signature", pres.sig), pres))
    for name, A in ws.algebras.items():
        blocks.append(format_algebra(name, ref("signature", A.sig), ref("poset", A.carrier), A))
    for name, f in ws.maps.items():
        blocks.append(format_map("map", name, ref("poset", f.dom), ref("poset", f.cod), f))
    for name, h in ws.homs.items():
        blocks.append(format_map("hom", name, ref("algebra", h.dom), ref("algebra", h.cod), h.map))
    return "\n\n".join(blocks) + "\n"


# -- corpus ---------------------------------------------------------------------------------


def corpus_names() -> list[str]:
    root = resources.files("posalg") / "corpus"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".oal"))


def corpus_source(name: str) -> str:
    return (resources.files("posalg") / "corpus" / f"{name}.oal").read_text()


def load_workspace(paths) -> Workspace:
    """Load files in order; a path that does not exist is looked up in the corpus."""
    ws = Workspace()
    for p in paths:
        path = Path(p)
        if path.exists():
            text = path.read_text()
        else:
            stem = path.name[:-4] if path.name.endswith(".oal") else path.name
            if stem not in corpus_names():
                raise FileNotFoundError(p)
            text = corpus_source(stem)
        ws.merge(parse_workspace(text, base=ws))
    return ws


def load_corpus() -> dict:
    """Every shipped corpus file, parsed separately, keyed by file stem."""
    return {name: parse_workspace(corpus_source(name)) for name in corpus_names()}
