"""Shipped examples: the irreflexive 4-clique, Chen's gap algebra, sigma/tau and paths."""
from __future__ import annotations

import json
from pathlib import Path

from .classification.families import make_family_op
from .classification.paths import path_structure
from .core.relations import Relation
from .core.structures import Structure, dump_structure
from .logic import parse_sentence
from .reductions.gadgets import ALPHA, BETA, block_relation, sigma_k, tau_structure

def k4() -> Structure:
    """Irreflexive 4-clique with all elements named."""
    edges = [(a, b) for a in range(4) for b in range(4) if a != b]
    return Structure(4, {"E": Relation(2, edges)}).with_constants()


K4_TEXT = "A x A y E z A w : E(x,z) & E(y,z) & E(w,z)"


def k4_sentence():
    return parse_sentence(K4_TEXT, k4())


def chen_gap() -> tuple[Structure, dict]:
    """({0,1,2}; graphs of r and s as relations, constants) and the operation tables."""
    r, s = make_family_op("chen_r"), make_family_op("chen_s")
    rels = {"r": Relation(5, [t + (r(*t),) for t in r.inputs()]),
            "s": Relation(3, [t + (s(*t),) for t in s.inputs()])}
    return Structure(3, rels).with_constants(), {"r": r, "s": s}


def intro_structures() -> tuple[Structure, Structure]:
    """The two encoding examples, re-indexed to start at 0."""
    from .core.relations import materialize, parse_expr
    a = Structure(3, {"R": materialize(parse_expr("x1!=x2 | x1=0", 2, 3), 3)})
    b = Structure(2, {"NAE": materialize(parse_expr("x1!=x2 | x2!=x3", 3, 2), 2)})
    return a, b


def leq_structure() -> Structure:
    """({0,1}; <=, 0, 1)."""
    return Structure(2, {"L": Relation(2, [(0, 0), (0, 1), (1, 1)])}).with_constants()


def sigma_tau_structure(m: int = 2, alpha=ALPHA, beta=BETA) -> Structure:
    rels = {f"sigma{i}": Relation(2 * i, block_relation(alpha, beta, i, 2).tuples,
                                  sigma_k(alpha, beta, i))
            for i in range(1, m + 1)}
    return tau_structure(range(1, m + 1), alpha, beta).with_relations(rels)


def write_fixture(name: str, out: Path) -> list[Path]:
    """Write fixture files into ``out``; returns the paths written."""
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def put(fname, text):
        p = out / fname
        p.write_text(text)
        written.append(p)

    if name == "k4":
        put("k4.struct", dump_structure(k4()))
        put("k4.ph", K4_TEXT + "\n")
    elif name == "chen-gap":
        S, ops = chen_gap()
        put("chen_gap.struct", dump_structure(S))
        put("chen_gap.ops.json", json.dumps({k: f.to_dict() for k, f in ops.items()}, indent=1) + "\n")
    elif name == "intro":
        a, b = intro_structures()
        put("intro_binary.struct", dump_structure(a))
        put("intro_nae.struct", dump_structure(b))
    elif name == "leq":
        put("leq.struct", dump_structure(leq_structure()))
    elif name == "sigma-tau":
        put("sigma_tau.struct", dump_structure(sigma_tau_structure()))
    elif name == "path":
        put("path_110.struct", dump_structure(path_structure("110")))
    else:
        raise KeyError(name)
    return written


FIXTURES = ("k4", "chen-gap", "intro", "leq", "sigma-tau", "path")
