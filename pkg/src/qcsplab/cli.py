"""Command-line entry point.

Exit codes: 0 verdict computed (yes), 1 verdict "no"/false, 2 inconclusive (a budget
ran out), 3 input error.
"""
from __future__ import annotations

import argparse
import json
import random
import re
import sys
import time
from pathlib import Path

from .adversaries import Adversary, AdversarySet, upsilon, xi
from .budget import BudgetExceeded, InputError, default_budget
from .canonical import canonical_general, canonical_pi2, decide_p_collapsible_singleton
from .classification import (check_family_preservation, check_zhuk_condition, classify_pgp_egp,
                             essential_tuples, find_hubie_pol, find_lemma_fun_witnesses,
                             has_simple_A_she, invariant_relations, is_essential_by_rho_tilde,
                             is_hubie_pol, make_family_op, rho_tilde, zero_collapsible_from_source)
from .core.relations import Relation, materialize, parse_expr
from .core.structures import Operation, Structure, dump_structure, parse_structure
from .fixtures import FIXTURES, write_fixture
from .logic import eval_qcsp, eval_qcsp_restricted, parse_sentence
from .reductions import (NAEInstance, conp_eval, nae_satisfiable, naesat_complement_reduction,
                         near_unanimity_for_reduct, pp_define_tau_in_sigma, qcsp_to_csp, sigma_k,
                         solve_csp_instance, tau_k, tuple_count)
from .report import RunReport, plot_series


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ------------------------------------------------------------------ literals

def parse_adversary(text: str, size: int) -> AdversarySet:
    """``upsilon:m,p,{x,..}``, ``xi:m,p``, ``tuples:(..);(..)`` or ``full:m``."""
    kind, _, body = text.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "upsilon":
            m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*,\s*\{([\d,\s]*)\}\s*", body)
            if not m:
                raise InputError(f"bad upsilon literal {text!r}")
            xs = [int(v) for v in m.group(3).split(",") if v.strip()]
            return upsilon(int(m.group(1)), int(m.group(2)), xs, size)
        if kind == "xi":
            m_, p = (int(v) for v in body.split(","))
            return xi(m_, p, size)
        if kind == "full":
            m_ = int(body)
            return AdversarySet.of(size, m_, [Adversary.full(size, m_)])
        if kind == "tuples":
            ts = [tuple(int(v) for v in chunk.strip().strip("()").split(",") if v.strip())
                  for chunk in body.split(";") if chunk.strip()]
            B = Adversary.of(size, ts)
            return AdversarySet.of(size, B.length, [B])
    except ValueError as exc:
        raise InputError(f"bad adversary literal {text!r}: {exc}") from None
    raise InputError(f"unknown adversary kind {kind!r}")


def _adversaries(texts, size) -> AdversarySet:
    sets = [parse_adversary(t, size) for t in texts]
    if not sets:
        raise InputError("at least one --adversary is required")
    length = sets[0].length
    if any(s.length != length for s in sets):
        raise InputError("adversaries of different lengths")
    return AdversarySet.of(size, length, [B for s in sets for B in s.members])


def _subset(text: str) -> frozenset:
    return frozenset(int(v) for v in text.split(",") if v.strip())


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _structure(args, rep: RunReport) -> Structure:
    text = _read(args.structure)
    rep.add_input("structure", text)
    return parse_structure(text)


def _sentence(args, S, rep: RunReport, allow_equality=True):
    if getattr(args, "text", None):
        text = args.text
    elif getattr(args, "sentence", None):
        text = _read(args.sentence)
    else:
        raise InputError("give --sentence FILE or --text SENTENCE")
    rep.add_input("sentence", text)
    return parse_sentence(text, S, allow_equality)


def _ops(args, rep: RunReport) -> list[Operation]:
    """Operations from --ops JSON files and --family name[:n] specs."""
    ops = []
    for path in args.ops or []:
        text = _read(path)
        rep.add_input(f"ops:{path}", text)
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: {exc}") from None
        items = data.values() if isinstance(data, dict) else data
        ops.extend(Operation.from_dict(d) for d in items)
    for spec in args.family or []:
        name, _, n = spec.partition(":")
        ops.append(make_family_op(name, int(n) if n else 2))
    if not ops:
        raise InputError("give --ops FILE or --family NAME[:n]")
    return ops


def _relation(text: str, size: int) -> Relation:
    kind, _, body = text.partition(":")
    if kind == "tuples":
        ts = [tuple(int(v) for v in chunk.strip().strip("()").split(",") if v.strip())
              for chunk in body.split(";") if chunk.strip()]
        if not ts:
            raise InputError("give arity with expr: for empty relations")
        return Relation(len(ts[0]), ts)
    if kind == "expr":
        arity, _, formula = body.partition(":")
        return materialize(parse_expr(formula, int(arity), size), size)
    raise InputError("relation literal is tuples:(..);(..) or expr:ARITY:FORMULA")


def _op_json(f: Operation) -> dict:
    return {"arity": f.arity, "table": "".join(map(str, f.table)) if f.size <= 10 else list(f.table)}


# ------------------------------------------------------------------ commands

def cmd_eval(args, rep, budget):
    S = _structure(args, rep)
    phi = _sentence(args, S, rep)
    v = eval_qcsp(S, phi, budget)
    rep.data["sentence"] = phi.text(S)
    rep.data.update(v.to_json(phi))
    rep.verdict = "true" if v.holds else "false"
    return 0 if v.holds else 1


def cmd_eval_restricted(args, rep, budget):
    S = _structure(args, rep)
    phi = _sentence(args, S, rep)
    omega = _adversaries(args.adversary, S.size)
    rep.add_input("adversary", ";".join(args.adversary))
    v = eval_qcsp_restricted(S, phi, omega, budget)
    rep.data["members"] = len(omega.members)
    rep.data.update(v.to_json(phi))
    rep.verdict = "true" if v.holds else "false"
    return 0 if v.holds else 1


def cmd_reduce(args, rep, budget):
    S = _structure(args, rep)
    phi = _sentence(args, S, rep)
    omega = _adversaries(args.adversary, S.size)
    rep.add_input("adversary", ";".join(args.adversary))
    inst = qcsp_to_csp(S, phi, omega)
    sol = solve_csp_instance(inst, budget)
    rep.data.update(variables=len(inst.variables), atoms=len(inst.atoms), size=inst.size,
                    width=omega.width(), satisfiable=sol is not None)
    if args.emit:
        rep.body = inst.as_sentence().text(S)
    if args.plot:
        tuples = omega.all_tuples()
        widths, sizes = [], []
        for w in range(1, len(tuples) + 1):
            sub = AdversarySet.of(S.size, omega.length, [Adversary.of(S.size, tuples[:w])])
            widths.append(w)
            sizes.append(qcsp_to_csp(S, phi, sub).size)
        plot_series(args.plot, widths, {"instance size": sizes}, "width of adversary set",
                    "size (variables + atom arguments)")
        rep.data["plot"] = {"width": widths, "size": sizes}
    rep.verdict = "satisfiable" if sol is not None else "unsatisfiable"
    return 0 if sol is not None else 1


def cmd_classify(args, rep, budget):
    if args.structure:
        source = _structure(args, rep)
    else:
        source = _ops(args, rep)
    v = classify_pgp_egp(source, budget)
    rep.data.update(v.to_json())
    rep.verdict = v.outcome
    return 0


def cmd_collapsible(args, rep, budget):
    S = _structure(args, rep)
    v = decide_p_collapsible_singleton(S, args.source, args.p, budget)
    rep.data.update(method=v.method, p=v.p, source=v.source, product_arity=v.product_arity,
                    detail=v.detail)
    if v.operation is not None and args.show_witness:
        rep.data["operation"] = _op_json(v.operation)
    rep.verdict = "collapsible" if v.holds else "not collapsible"
    return 0 if v.holds else 1


def cmd_canonical(args, rep, budget):
    S = _structure(args, rep)
    omega = _adversaries(args.adversary, S.size)
    rep.add_input("adversary", ";".join(args.adversary))
    if args.mode == "pi2":
        canon = canonical_pi2(omega, S, budget)
    else:
        canon = canonical_general(args.n or S.size, omega, S, budget)
    phi = canon.sentence
    rep.data.update(mode=canon.mode, product_arity=canon.product_arity,
                    universals=len(phi.universals), existentials=len(phi.existentials),
                    atoms=len(phi.atoms))
    rep.body = phi.text(S)
    rep.verdict = "emitted"
    if args.evaluate:
        v = eval_qcsp(S, phi, budget, witness=False)
        rep.data["holds"] = v.holds
        rep.verdict = "true" if v.holds else "false"
        return 0 if v.holds else 1
    return 0


def cmd_gadget(args, rep, budget):
    alpha, beta = _subset(args.alpha), _subset(args.beta)
    if args.kind in ("sigma", "tau"):
        width = 2 if args.kind == "sigma" else 3
        build = sigma_k if width == 2 else tau_k
        if args.count_atoms:
            ks = list(range(1, args.k + 1))
            dnf = [build(alpha, beta, k, args.size).atom_count() for k in ks]
            listing = [tuple_count(alpha, beta, k, width, args.size) * width * k for k in ks]
            rep.data.update(k=ks, dnf_atoms=dnf, tuple_listing_entries=listing)
            if args.plot:
                plot_series(args.plot, ks, {"DNF atoms": dnf, "tuple-listing entries": listing},
                            "k", "encoding size", f"{args.kind}_k")
                rep.data["plot"] = args.plot
            rep.verdict = "counted"
            return 0
        expr = build(alpha, beta, args.k, args.size)
        R = materialize(expr, args.size, budget)
        S = Structure(args.size, {f"{args.kind}{args.k}": R})
        rep.data.update(arity=expr.arity, dnf_atoms=expr.atom_count(), tuples=len(R.tuples))
        rep.body = dump_structure(S)
        rep.verdict = "emitted"
        return 0
    if args.kind == "ppdef":
        drop = [int(v) for v in args.drop.split(",")] if args.drop else []
        r = pp_define_tau_in_sigma(args.k, alpha, beta, args.size, drop, budget)
        rep.data.update(r.to_json())
        rep.body = r.definition.text()
        rep.verdict = "equal" if r.equal else "different"
        return 0 if r.equal else 1
    # naesat
    clauses = [tuple(int(v) for v in c.split(",")) for c in args.clauses.split(";") if c.strip()] \
        if args.clauses else []
    nvars = args.nvars if args.nvars is not None else 1 + max([v for c in clauses for v in c], default=-1)
    I = NAEInstance(nvars, clauses)
    phi, S = naesat_complement_reduction(I, alpha, beta, args.size)
    sat = nae_satisfiable(I)
    rep.data.update(clauses=len(clauses), nvars=nvars, nae_satisfiable=sat,
                    atoms=sum(len(a.args) for a in phi.atoms))
    rep.body = phi.text(S)
    if args.check:
        v = eval_qcsp(S, phi, budget, witness=False)
        rep.data["psi_holds"] = v.holds
        rep.data["agrees"] = v.holds != sat
    rep.verdict = "satisfiable" if sat else "unsatisfiable"
    return 0 if sat else 1


def cmd_shop(args, rep, budget):
    S = _structure(args, rep)
    if args.source:
        shop = zero_collapsible_from_source(S, _subset(args.source), budget)
    else:
        shop = has_simple_A_she(S, args.at, budget)
    rep.data["shop"] = shop.to_json() if shop else None
    rep.verdict = "found" if shop else "absent"
    return 0 if shop else 1


def cmd_essential(args, rep, budget):
    if args.structure:
        S = _structure(args, rep)
        if args.name not in S.relations:
            raise InputError(f"no relation {args.name!r}")
        R, size = S.relations[args.name], S.size
    else:
        if not args.relation:
            raise InputError("give --relation LITERAL or --structure FILE --name R")
        size = args.size
        R = _relation(args.relation, size)
        rep.add_input("relation", args.relation)
    ts = essential_tuples(R, size)
    dual = is_essential_by_rho_tilde(R, size)
    rep.data.update(arity=R.arity, tuples=len(R.tuples), essential_tuples=[list(t) for t in ts],
                    rho_tilde_tuples=len(rho_tilde(R, size).tuples), oracles_agree=bool(ts) == dual)
    if bool(ts) != dual:
        raise RuntimeError("essential-tuple and rho-tilde oracles disagree")
    rep.verdict = "essential" if ts else "not essential"
    return 0 if ts else 1


def cmd_zhuk(args, rep, budget):
    ops = _ops(args, rep)
    z = check_zhuk_condition(ops, budget)
    rep.data.update(status=z.status, regime=z.regime,
                    tried=[list(t) for t in z.tried])
    if z:
        rep.data.update(p=_op_json(z.p), r3=_op_json(z.r3))
    if args.lemma_fun:
        w = find_lemma_fun_witnesses(ops, budget)
        rep.data["lemma_fun"] = {k: {"status": v.status,
                                     "table": _op_json(v.operation) if v else None}
                                 for k, v in w.items()}
    rep.verdict = z.status
    return {"found": 0, "not_found": 1}.get(z.status, 2)


def cmd_family(args, rep, budget):
    f = make_family_op(args.name, args.n)
    rep.data["operation"] = _op_json(f)
    rep.data["idempotent"] = f.is_idempotent()
    rep.data["hubie_in_1"] = is_hubie_pol(f, 1)
    rep.data["hubie_in_0"] = is_hubie_pol(f, 0)
    rep.verdict = "emitted"
    if args.family or args.ops:
        ops = _ops(args, rep)
        rels = invariant_relations(ops, args.arity, 3, budget)
        r = check_family_preservation(f, rels, from_gap_algebra=True)
        rep.data["preservation"] = {"relations": len(rels), "all_preserved": r.all_preserved,
                                    "in_regime": r.in_regime,
                                    "violations": [e.relation.tuples for e in r.entries
                                                   if not e.preserved][:5]}
        rep.verdict = "preserved" if r.all_preserved else "violated"
        return 0 if r.all_preserved else 1
    return 0


def cmd_hubie(args, rep, budget):
    if args.structure:
        source = _structure(args, rep)
    else:
        source = _ops(args, rep)
    if args.check_basic and not args.structure:
        rep.data["basic"] = [is_hubie_pol(f, args.x) for f in source]
    h = find_hubie_pol(source, args.x, args.arity_cap, budget)
    rep.data.update(found=h.found, exhausted=h.exhausted)
    if h.found:
        rep.data["operation"] = _op_json(h.operation)
        rep.verdict = "found"
        return 0
    rep.verdict = "absent" if h.exhausted else "inconclusive"
    return 1 if h.exhausted else 2


def cmd_nu(args, rep, budget):
    r = near_unanimity_for_reduct(args.m, _subset(args.alpha), _subset(args.beta), args.a,
                                  args.size, check_a=not args.unchecked, budget=budget)
    rep.data.update(r.to_json())
    rep.verdict = "preserves" if r.ok else "fails"
    return 0 if r.ok else 1


def cmd_conp_eval(args, rep, budget):
    S = _structure(args, rep)
    phi = _sentence(args, S, rep)
    v = conp_eval(S, phi, args.canon, budget)
    rep.data.update(v.to_json(phi))
    if args.check:
        w = eval_qcsp(S, phi, budget, witness=False)
        rep.data["game_holds"] = w.holds
        if w.holds != v.holds:
            raise RuntimeError("co-NP evaluator disagrees with the game evaluator")
    rep.verdict = "true" if v.holds else "false"
    return 0 if v.holds else 1


def cmd_fixtures(args, rep, budget):
    names = FIXTURES if args.name == "all" else [args.name]
    out = Path(args.out)
    written = []
    for n in names:
        written += [str(p) for p in write_fixture(n, out)]
    rep.data["written"] = written
    rep.verdict = "written"
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--seed", type=int, default=None, help="recorded in the report")
    common.add_argument("--budget", default="", help="caps, e.g. search_nodes=1000 (also QCSP_BUDGET)")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings")

    p = _Parser(prog="qcsplab", description="Quantified CSP toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def with_sentence(sp):
        sp.add_argument("--structure", required=True)
        sp.add_argument("--sentence")
        sp.add_argument("--text")

    def with_ops(sp):
        sp.add_argument("--ops", action="append", help="JSON operation tables")
        sp.add_argument("--family", action="append", help="NAME[:n], e.g. chen_r or f_hat_a:2")

    sp = add("eval", cmd_eval, "evaluate a sentence")
    with_sentence(sp)
    sp = add("eval-restricted", cmd_eval_restricted, "evaluate against adversaries")
    with_sentence(sp)
    sp.add_argument("--adversary", action="append", default=[])
    sp = add("reduce", cmd_reduce, "QCSP against adversaries to one CSP instance")
    with_sentence(sp)
    sp.add_argument("--adversary", action="append", default=[])
    sp.add_argument("--emit", action="store_true", help="print the instance as a sentence")
    sp.add_argument("--plot", help="plot instance size against width to this file")
    sp = add("classify", cmd_classify, "PGP or EGP")
    sp.add_argument("--structure")
    with_ops(sp)
    sp = add("collapsible", cmd_collapsible, "p-collapsibility from a singleton source")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--source", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--show-witness", action="store_true")
    sp = add("canonical", cmd_canonical, "emit a canonical sentence")
    sp.add_argument("mode", choices=["pi2", "general"])
    sp.add_argument("--structure", required=True)
    sp.add_argument("--adversary", action="append", default=[])
    sp.add_argument("--n", type=int)
    sp.add_argument("--evaluate", action="store_true")
    sp = add("gadget", cmd_gadget, "sigma/tau relations, pp-definition, 3NAESAT")
    sp.add_argument("kind", choices=["sigma", "tau", "ppdef", "naesat"])
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--alpha", default="0,1")
    sp.add_argument("--beta", default="1,2")
    sp.add_argument("--size", type=int, default=3)
    sp.add_argument("--count-atoms", action="store_true")
    sp.add_argument("--plot")
    sp.add_argument("--drop", help="ppdef: comma-separated conjunct indices to remove")
    sp.add_argument("--clauses", help="naesat: 0,1,2;1,2,3")
    sp.add_argument("--nvars", type=int)
    sp.add_argument("--check", action="store_true", help="naesat: evaluate psi too")
    sp = add("shop", cmd_shop, "simple A-shop hyper-endomorphisms")
    sp.add_argument("--structure", required=True)
    sp.add_argument("--at", type=int)
    sp.add_argument("--source", help="0-collapsibility from this source set, e.g. 0,1")
    sp = add("essential", cmd_essential, "essential tuples of a relation")
    sp.add_argument("--relation")
    sp.add_argument("--size", type=int, default=2)
    sp.add_argument("--structure")
    sp.add_argument("--name")
    sp = add("zhuk", cmd_zhuk, "search for the Zhuk Condition terms")
    with_ops(sp)
    sp.add_argument("--lemma-fun", action="store_true")
    sp = add("family", cmd_family, "gap-algebra operation families")
    sp.add_argument("name")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--arity", type=int, default=2, help="invariant relation arity to check")
    with_ops(sp)
    sp = add("hubie", cmd_hubie, "search for a Hubie-pol")
    sp.add_argument("--structure")
    with_ops(sp)
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--arity-cap", type=int, default=3)
    sp.add_argument("--check-basic", action="store_true")
    sp = add("nu", cmd_nu, "near-unanimity operation for the sigma reduct")
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--a", type=int)
    sp.add_argument("--alpha", default="0,1")
    sp.add_argument("--beta", default="1,2")
    sp.add_argument("--size", type=int, default=3)
    sp.add_argument("--unchecked", action="store_true", help="allow a outside alpha n beta")
    sp = add("conp-eval", cmd_conp_eval, "canon-based evaluation")
    with_sentence(sp)
    sp.add_argument("--canon", type=int)
    sp.add_argument("--check", action="store_true", help="cross-check with the game evaluator")
    sp = add("fixtures", cmd_fixtures, "write shipped examples")
    sp.add_argument("name", choices=list(FIXTURES) + ["all"])
    sp.add_argument("--out", default=".")
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 3
    rep = RunReport(args.command, seed=args.seed)
    try:
        budget = default_budget().with_overrides(args.budget)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    rep.budget = budget.as_dict()
    if args.seed is not None:
        random.seed(args.seed)
    t0 = time.perf_counter()
    try:
        code = args.fn(args, rep, budget)
    except BudgetExceeded as exc:
        rep.verdict = "inconclusive"
        rep.notes.append(str(exc))
        code = 2
    except (InputError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return 3
    rep.exit_code = code
    if args.timings:
        rep.timings = {"total": time.perf_counter() - t0}
    sys.stdout.write(rep.to_json() + "\n" if args.json else rep.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
