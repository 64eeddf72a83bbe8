"""Command-line laboratory.

Exit codes: 0 affirmative or constructed, 1 negative with a witness,
2 inconclusive or truncated, 3 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .algebra import (
    AlgebraError,
    Homomorphism,
    OrderedAlgebra,
    all_algebras,
    coinserter_alg,
    factor_alg,
    find_algebra_isomorphism,
    hsp_membership,
    prekernel_pair_alg,
    satisfies,
    verify_coinserter_alg,
)
from .checking import check_derivation
from .colimits import (
    NotComputable,
    ParallelPair,
    canonical_presentation,
    coequalizer_direct,
    coequalizer_pos,
    explore_non_reflexive,
    sifted_commutation_check,
    split_coequalizer,
    verify_canonical_presentation,
)
from .deduction import UniverseOverflow, derivable
from .free import (
    PreconditionFailed,
    Truncated,
    algebra_of_model,
    free_algebra,
    model_of_algebra,
    perfectly_presentable_check,
    theory_of,
)
from .poset import (
    MonotoneMap,
    Poset,
    PosetError,
    coinserter_pos,
    factor_pos,
    is_isomorphic,
    posets_up_to,
    prekernel_pair_pos,
    verify_coinserter_pos,
)
from .terms import TermError, parse_inequation
from .text import (
    KINDS,
    UnknownReference,
    Workspace,
    WorkspaceError,
    format_algebra,
    format_map,
    format_poset,
    format_presentation,
    load_workspace,
    print_workspace,
)

OK, NEGATIVE, INCONCLUSIVE, USAGE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: list
    verdict: str
    exit_code: int
    result: dict = field(default_factory=dict)
    lines: list = field(default_factory=list)
    seconds: float = 0.0

    def to_data(self, timing: bool = False) -> dict:
        doc = {
            "tool": "posalg",
            "version": __version__,
            "command": list(self.command),
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "result": self.result,
        }
        if timing:
            doc["timing"] = {"seconds": round(self.seconds, 6)}
        return doc

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_data(timing), indent=2, sort_keys=True)

    def to_text(self, timing: bool = True) -> str:
        out = [f"$ {' '.join(self.command)}", *self.lines, f"verdict: {self.verdict} (exit {self.exit_code})"]
        if timing:
            out.append(f"time: {self.seconds:.3f}s")
        return "\n".join(out)


# -- structured rendering ---------------------------------------------------------------


def poset_data(P: Poset) -> dict:
    return {"elements": [str(a) for a in P], "covers": [[str(a), str(b)] for a, b in P.covers()]}


def map_data(f) -> dict:
    f = f.map if isinstance(f, Homomorphism) else f
    return {"send": [[str(a), str(f(a))] for a in f.dom]}


def algebra_data(A: OrderedAlgebra) -> dict:
    return {
        "carrier": poset_data(A.carrier),
        "ops": {
            op: [[[str(x) for x in args], str(v)] for args, v in A.tables[op].items()]
            for op, _ in A.sig.ops
        },
    }


def _poset_lines(P: Poset, indent="  ") -> list:
    lines = [indent + "elements: " + " ".join(str(a) for a in P)]
    lines += [indent + f"{a} < {b}" for a, b in P.covers()]
    return lines


def _map_lines(f, indent="  ") -> list:
    f = f.map if isinstance(f, Homomorphism) else f
    return [indent + f"{a} -> {f(a)}" for a in f.dom]


def _algebra_lines(A: OrderedAlgebra, indent="  ") -> list:
    lines = _poset_lines(A.carrier, indent)
    for op, _ in A.sig.ops:
        for args, v in A.tables[op].items():
            lines.append(indent + f"{op}({','.join(str(x) for x in args)}) = {v}")
    return lines


# -- commands -----------------------------------------------------------------------------


def _need(args, n, usage):
    if len(args.names) < n:
        raise UsageError(f"usage: {usage}")
    return args.names


def cmd_check(ws: Workspace, args) -> Report:
    names = args.names
    counts = {k: len(ws.table(k)) for k in KINDS}
    lines = [f"  {k}: {', '.join(ws.table(k)) or '-'}" for k in KINDS]
    result = {"objects": {k: list(ws.table(k)) for k in KINDS}, "counts": counts}
    for name in names:
        kinds = [k for k in KINDS if name in ws.table(k)]
        if not kinds:
            raise UnknownReference(f"no object named {name!r}")
        for k in kinds:
            lines.append(_block(ws, k, name))
    return Report([], "valid", OK, result, lines)


def _block(ws: Workspace, kind: str, name: str) -> str:
    v = ws.get(kind, name)
    sub = Workspace()
    sub.table(kind)[name] = v
    if kind == "poset":
        return format_poset(name, v)
    if kind == "presentation":
        return format_presentation(name, ws.name_of("signature", v.sig), v)
    if kind == "algebra":
        return format_algebra(name, ws.name_of("signature", v.sig), ws.name_of("poset", v.carrier), v)
    if kind == "map":
        return format_map("map", name, ws.name_of("poset", v.dom), ws.name_of("poset", v.cod), v)
    if kind == "hom":
        return format_map("hom", name, ws.name_of("algebra", v.dom), ws.name_of("algebra", v.cod), v.map)
    return print_workspace(sub).rstrip()


def cmd_print(ws: Workspace, args) -> Report:
    text = print_workspace(ws)
    return Report([], "printed", OK, {"workspace": text}, [text.rstrip()])


def cmd_free(ws: Workspace, args) -> Report:
    pres_name, poset_name = _need(args, 2, "free PRESENTATION POSET")[:2]
    pres = ws.get("presentation", pres_name)
    P = ws.get("poset", poset_name)
    F = free_algebra(pres, P, args.depth or 3)
    lines = [f"free algebra on {poset_name}: {len(F)} classes, status {F.status} after {F.depth} round(s)"]
    lines += _poset_lines(F.classes)
    lines += ["  unit:"] + _map_lines(F.unit, "    ")
    result = {
        "status": F.status,
        "rounds": F.depth,
        "classes": poset_data(F.classes),
        "unit": map_data(F.unit),
    }
    if F.is_total:
        result["tables"] = algebra_data(F.algebra)["ops"]
        return Report([], "total", OK, result, lines)
    return Report([], "truncated", INCONCLUSIVE, result, lines)


def cmd_prove(ws: Workspace, args) -> Report:
    pres_name, text = _need(args, 2, 'prove PRESENTATION "s <= t"')[:2]
    pres = ws.get("presentation", pres_name)
    goals = parse_inequation(text, pres.sig)
    lines, certs = [], []
    for goal in goals:
        v = derivable(pres, goal, depth=args.depth or 2)
        if not v:
            lines.append(f"{goal}: not derived within depth {args.depth or 2}")
            return Report([], "inconclusive", INCONCLUSIVE, {"goal": str(goal)}, lines)
        d = v.witness
        gens = Poset(tuple(goal.context), frozenset((x, x) for x in goal.context))
        replay = check_derivation(pres, gens, d)
        lines.append(f"certificate for {goal} ({len(d)} steps, replay {replay.status}):")
        lines += ["  " + s for s in str(d).splitlines()]
        certs.append(
            {
                "goal": str(goal),
                "replay": replay.status,
                "steps": [{"rule": s.rule, "lhs": str(s.lhs), "rhs": str(s.rhs)} for s in d.steps],
            }
        )
        if not replay:
            return Report([], "invalid-certificate", NEGATIVE, {"certificates": certs}, lines)
    return Report([], "proven", OK, {"certificates": certs}, lines)


def cmd_sat(ws: Workspace, args) -> Report:
    alg_name, pres_name = _need(args, 2, "sat ALGEBRA PRESENTATION")[:2]
    A = ws.get("algebra", alg_name)
    pres = ws.get("presentation", pres_name)
    if A.sig != pres.sig:
        raise UsageError("algebra and presentation have different signatures")
    lines = []
    for ax in pres.axioms:
        v = satisfies(A, ax)
        if not v:
            val = {k: str(x) for k, x in v.witness.items()}
            lines.append(f"fails: {ax}")
            lines.append("  countervaluation: " + ", ".join(f"{k} -> {x}" for k, x in val.items()))
            return Report([], "fails", NEGATIVE, {"axiom": str(ax), "countervaluation": val}, lines)
        lines.append(f"holds: {ax}")
    return Report([], "holds", OK, {"axioms": len(pres.axioms)}, lines)


def cmd_theory(ws: Workspace, args) -> Report:
    pres_name = _need(args, 1, "theory PRESENTATION")[0]
    pres = ws.get("presentation", pres_name)
    n = args.max_arity if args.max_arity is not None else 3
    T = theory_of(pres, n, args.depth or 3)
    sizes = {str(k): len(T.homs[k]) for k in range(n + 1)}
    lines = [f"|T({k},1)| = {s}" for k, s in sizes.items()]
    v = T.check_laws()
    lines.append(f"laws: {v.status}" + (f" ({v.detail})" if v.detail else ""))
    result = {"sizes": sizes, "laws": v.status}
    return Report([], "pass" if v else "fail", OK if v else NEGATIVE, result, lines)


def _theory_for(ws, args, A, pres):
    n = args.max_arity if args.max_arity is not None else max(2, pres.sig.max_arity())
    return theory_of(pres, n, args.depth or 3)


def cmd_model(ws: Workspace, args) -> Report:
    alg_name, pres_name = _need(args, 2, "model ALGEBRA PRESENTATION")[:2]
    A = ws.get("algebra", alg_name)
    pres = ws.get("presentation", pres_name)
    T = _theory_for(ws, args, A, pres)
    M = model_of_algebra(A, T, validate=False)
    v = M.validate()
    lines = [f"model on {len(M.base)} elements, {len(M.action)} operations of T up to arity {T.max_arity}"]
    lines.append(f"invariants: {v.status}" + (f" ({v.detail})" if v.detail else ""))
    result = {"operations": len(M.action), "invariants": v.status}
    return Report([], "pass" if v else "fail", OK if v else NEGATIVE, result, lines)


def cmd_roundtrip(ws: Workspace, args) -> Report:
    alg_name, pres_name = _need(args, 2, "roundtrip ALGEBRA PRESENTATION")[:2]
    A = ws.get("algebra", alg_name)
    pres = ws.get("presentation", pres_name)
    T = _theory_for(ws, args, A, pres)
    B = algebra_of_model(model_of_algebra(A, T))
    iso = find_algebra_isomorphism(B, A)
    lines = _algebra_lines(B)
    if iso is None:
        return Report([], "not-isomorphic", NEGATIVE, {"algebra": algebra_data(B)}, lines)
    lines.append("isomorphism:")
    lines += _map_lines(iso, "    ")
    return Report([], "isomorphic", OK, {"algebra": algebra_data(B), "iso": map_data(iso)}, lines)


def _pair(ws, names):
    a, b = names
    if a in ws.maps and b in ws.maps:
        return ws.maps[a], ws.maps[b]
    if a in ws.homs and b in ws.homs:
        return ws.homs[a], ws.homs[b]
    raise UnknownReference(f"{a!r} and {b!r} are not two maps or two homs")


def _one(ws, name):
    if name in ws.maps:
        return ws.maps[name]
    if name in ws.homs:
        return ws.homs[name]
    raise UnknownReference(f"no map or hom named {name!r}")


def cmd_coinserter(ws: Workspace, args) -> Report:
    names = _need(args, 2, "coinserter U0 U1")[:2]
    u0, u1 = _pair(ws, names)
    probe = args.probe if args.probe is not None else 3
    if isinstance(u0, Homomorphism):
        Q, c = coinserter_alg(u0, u1)
        probes = [B for B in ws.algebras.values() if B.sig == u0.dom.sig]
        for P in posets_up_to(min(probe, 2)):
            probes += list(all_algebras(u0.dom.sig, P))
        v = verify_coinserter_alg(u0, u1, c, probes)
        lines = _algebra_lines(Q)
        result = {"algebra": algebra_data(Q)}
    else:
        res = coinserter_pos(u0, u1)
        Q, c = res.quotient, res.map
        v = verify_coinserter_pos(u0, u1, c, probe)
        lines = _poset_lines(Q)
        result = {"quotient": poset_data(Q)}
    lines += ["  map:"] + _map_lines(c, "    ")
    lines.append(f"universal property (probe {probe}): {v.status}")
    result.update({"map": map_data(c), "check": v.status})
    if not v:
        result["witness"] = repr(v.witness)
    return Report([], v.status, OK if v else NEGATIVE, result, lines)


def cmd_prekernel(ws: Workspace, args) -> Report:
    f = _one(ws, _need(args, 1, "prekernel MAP")[0])
    pk = prekernel_pair_alg(f) if isinstance(f, Homomorphism) else prekernel_pair_pos(f)
    pairs = list(pk.pairs if isinstance(pk.pairs, Poset) else pk.pairs.carrier)
    lines = [f"  ({a}, {b})" for a, b in pairs]
    return Report([], "constructed", OK, {"pairs": [[str(a), str(b)] for a, b in pairs]}, lines)


def cmd_factor(ws: Workspace, args) -> Report:
    f = _one(ws, _need(args, 1, "factor MAP")[0])
    c, m = factor_alg(f) if isinstance(f, Homomorphism) else factor_pos(f)
    cm, mm = (c.map, m.map) if isinstance(c, Homomorphism) else (c, m)
    lines = ["image:"] + _poset_lines(cm.cod) + ["surjection:"] + _map_lines(cm) + ["embedding:"] + _map_lines(mm)
    result = {"image": poset_data(cm.cod), "surjection": map_data(cm), "embedding": map_data(mm)}
    ok = cm.is_surjective() and mm.is_embedding()
    return Report([], "constructed" if ok else "violation", OK if ok else NEGATIVE, result, lines)


def cmd_coeq(ws: Workspace, args) -> Report:
    f, g = _pair(ws, _need(args, 2, "coeq F G")[:2])
    f, g = (f.map, g.map) if isinstance(f, Homomorphism) else (f, g)
    res = coequalizer_pos(f, g)
    direct = coequalizer_direct(f, g)
    agree = is_isomorphic(res.quotient, direct.quotient)
    lines = _poset_lines(res.quotient) + ["  map:"] + _map_lines(res.map, "    ")
    lines.append(f"direct construction agrees: {agree}")
    result = {"quotient": poset_data(res.quotient), "map": map_data(res.map), "agrees": agree}
    return Report([], "constructed" if agree else "disagree", OK if agree else NEGATIVE, result, lines)


def cmd_split(ws: Workspace, args) -> Report:
    names = _need(args, 4, "split D0 D1 E T [S]")
    maps = [_one(ws, n) for n in names[:5]]
    try:
        v = split_coequalizer(*maps)
    except NotComputable as e:
        return Report([], "not-computable", NEGATIVE, {"reason": str(e)}, [str(e)])
    if v:
        lines = ["identity chain holds; s:"] + _map_lines(v.witness, "    ")
        return Report([], "verified", OK, {"s": map_data(v.witness)}, lines)
    name, diff = v.witness
    lines = [f"violated: {name} at {diff}"]
    return Report([], "violation", NEGATIVE, {"identity": name, "witness": repr(diff)}, lines)


def cmd_canonical(ws: Workspace, args) -> Report:
    alg_name, pres_name = _need(args, 2, "canonical ALGEBRA PRESENTATION")[:2]
    A = ws.get("algebra", alg_name)
    pres = ws.get("presentation", pres_name)
    cp = canonical_presentation(A, pres, args.depth or 3)
    v = verify_canonical_presentation(cp)
    vd = verify_canonical_presentation(cp, derive_s=True)
    lines = [
        f"|FUFUA| = {len(cp.FUFUA)}, |FUA| = {len(cp.FUA)}, |A| = {len(A)}",
        f"identity chain: {v.status}",
        f"derived s matches the unit: {bool(vd)}",
    ]
    ok = bool(v) and bool(vd)
    result = {
        "sizes": [len(cp.FUFUA), len(cp.FUA), len(A)],
        "chain": v.status,
        "derived_s": vd.status,
    }
    return Report([], "verified" if ok else "violation", OK if ok else NEGATIVE, result, lines)


def cmd_sifted(ws: Workspace, args) -> Report:
    if args.explore:
        v = explore_non_reflexive(args.max_size or 2, args.samples, args.seed or 0)
        if v:
            p, q, _ = v.witness
            lines = ["counterexample among non-reflexive pairs:"]
            for label, pair in (("p", p), ("q", q)):
                lines.append(f"  {label}.u0: {pair.u0.table}  {label}.u1: {pair.u1.table}")
            return Report([], "counterexample", NEGATIVE, {"found": True}, lines)
        return Report([], "notfound", INCONCLUSIVE, {"found": False}, [v.detail])
    names = _need(args, 4, "sifted P0 P1 Q0 Q1  (or --explore)")
    p = ParallelPair(*_pair(ws, names[:2]))
    q = ParallelPair(*_pair(ws, names[2:4]))
    v = sifted_commutation_check(p, q)
    lines = [f"comparison map is an isomorphism: {bool(v)} ({v.detail})"]
    return Report([], v.status, OK if v else NEGATIVE, {"detail": v.detail}, lines)


def cmd_retract(ws: Workspace, args) -> Report:
    alg_name, pres_name = _need(args, 2, "retract ALGEBRA PRESENTATION")[:2]
    A = ws.get("algebra", alg_name)
    pres = ws.get("presentation", pres_name)
    n = args.max_arity if args.max_arity is not None else 3
    v = perfectly_presentable_check(A, pres, n, args.depth or 3)
    if v:
        w = v.witness
        lines = [f"retract of the free algebra on {w.n} generators", "section:"] + _map_lines(w.section)
        lines += ["retraction:"] + _map_lines(w.retraction)
        result = {"n": w.n, "section": map_data(w.section), "retraction": map_data(w.retraction)}
        return Report([], "retract", OK, result, lines)
    return Report([], "notfound", INCONCLUSIVE, {"detail": v.detail}, [v.detail])


def cmd_closure(ws: Workspace, args) -> Report:
    names = _need(args, 2, "closure ALGEBRA GENERATOR...")
    B = ws.get("algebra", names[0])
    gens = [ws.get("algebra", n) for n in names[1:]]
    v = hsp_membership(B, gens, power_bound=args.power if args.power is not None else 2)
    if v.status == "member":
        w = v.witness
        lines = [f"quotient of a subalgebra of the product of {[names[1:][i] for i in w.factors]}"]
        return Report([], "member", OK, {"factors": [names[1:][i] for i in w.factors]}, lines)
    if v.status == "refuted":
        lines = [f"separating inequation: {v.witness}"]
        return Report([], "refuted", NEGATIVE, {"inequation": str(v.witness)}, lines)
    return Report([], "notfound", INCONCLUSIVE, {"detail": v.detail}, [v.detail])


COMMANDS = {
    "check": cmd_check,
    "print": cmd_print,
    "free": cmd_free,
    "prove": cmd_prove,
    "sat": cmd_sat,
    "theory": cmd_theory,
    "model": cmd_model,
    "roundtrip": cmd_roundtrip,
    "coinserter": cmd_coinserter,
    "prekernel": cmd_prekernel,
    "factor": cmd_factor,
    "coeq": cmd_coeq,
    "split": cmd_split,
    "canonical": cmd_canonical,
    "sifted": cmd_sifted,
    "retract": cmd_retract,
    "closure": cmd_closure,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="posalg", description="Ordered algebra laboratory.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("names", nargs="*")
    p.add_argument("-w", "--workspace", action="append", default=[], metavar="FILE",
                   help="workspace file (a bare corpus name like 'semilattice' also works)")
    p.add_argument("--depth", type=int)
    p.add_argument("--max-arity", type=int)
    p.add_argument("--probe", type=int)
    p.add_argument("--power", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timing", action="store_true", help="include timing in --json output")
    p.add_argument("--explore", action="store_true", help="sifted: search non-reflexive pairs")
    p.add_argument("--max-size", type=int)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--version", action="version", version=f"posalg {__version__}")
    return p


_FAILURES = (WorkspaceError, PosetError, AlgebraError, TermError, PreconditionFailed, UsageError, FileNotFoundError)


def run_command(ws: Workspace | None, argv: list) -> Report:
    """Parse ``argv`` and run one command.  Files named with -w are merged into ``ws``."""
    argv = list(argv)
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        if ws is None:
            ws = Workspace()
        if args.workspace:
            ws = Workspace().merge(ws).merge(load_workspace(args.workspace))
        report = COMMANDS[args.command](ws, args)
    except Truncated as e:
        report = Report([], "truncated", INCONCLUSIVE, {"reason": str(e)}, [str(e)])
    except UniverseOverflow as e:
        report = Report([], "inconclusive", INCONCLUSIVE, {"reason": str(e)}, [str(e)])
    except PreconditionFailed as e:
        report = Report([], "precondition-failed", NEGATIVE, {"reason": str(e)}, [str(e)])
    except _FAILURES as e:
        kind = "usage" if isinstance(e, UsageError) else "error"
        report = Report([], kind, USAGE, {"error": type(e).__name__, "message": str(e)}, [f"{type(e).__name__}: {e}"])
    report.command = argv
    report.seconds = time.perf_counter() - start
    return report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report = run_command(None, argv)
    if "--json" in argv:
        print(report.to_json(timing="--timing" in argv))
    else:
        print(report.to_text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
