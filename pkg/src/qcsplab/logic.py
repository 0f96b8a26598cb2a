"""Positive Horn sentences and their evaluation, plain or against adversaries."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Union

from .budget import Budget, Counter, InputError
from .core.solver import CSP, full_mask
from .core.structures import Structure

Term = Union[str, int]          # variable name or domain element


@dataclass(frozen=True)
class RelAtom:
    rel: str
    args: tuple

    def variables(self):
        return [a for a in self.args if isinstance(a, str)]


@dataclass(frozen=True)
class EqAtom:
    left: Term
    right: Term

    def variables(self):
        return [a for a in (self.left, self.right) if isinstance(a, str)]

    @property
    def args(self):
        return (self.left, self.right)


def _term_text(t: Term, S: Structure | None) -> str:
    if isinstance(t, str):
        return t
    if S is not None:
        name = S.constant_name(t)
        if name is not None:
            return name
    return str(t)


@dataclass(frozen=True)
class PHSentence:
    prefix: tuple                 # (("A" | "E", var), ...)
    atoms: tuple
    allow_equality: bool = True

    def __post_init__(self):
        seen = set()
        for q, v in self.prefix:
            if q not in ("A", "E"):
                raise InputError(f"bad quantifier {q!r}")
            if v in seen:
                raise InputError(f"variable {v} quantified twice")
            seen.add(v)
        for atom in self.atoms:
            for v in atom.variables():
                if v not in seen:
                    raise InputError(f"unbound variable {v}")
            if isinstance(atom, EqAtom) and not self.allow_equality:
                raise InputError("equality atoms are not allowed here")

    @property
    def variables(self) -> list[str]:
        return [v for _, v in self.prefix]

    @property
    def universals(self) -> list[str]:
        return [v for q, v in self.prefix if q == "A"]

    @property
    def existentials(self) -> list[str]:
        return [v for q, v in self.prefix if q == "E"]

    @property
    def is_existential(self) -> bool:
        return not self.universals

    @property
    def is_pi2(self) -> bool:
        qs = "".join(q for q, _ in self.prefix)
        return "EA" not in qs

    def text(self, S: Structure | None = None) -> str:
        pre = " ".join(f"{q} {v}" for q, v in self.prefix)
        parts = []
        for a in self.atoms:
            if isinstance(a, EqAtom):
                parts.append(f"{_term_text(a.left, S)}={_term_text(a.right, S)}")
            else:
                parts.append(f"{a.rel}(" + ",".join(_term_text(t, S) for t in a.args) + ")")
        body = " & ".join(parts) if parts else "true"
        return f"{pre} : {body}" if pre else f": {body}"


_QUANT = {"A": "A", "E": "E", "forall": "A", "exists": "E", "∀": "A", "∃": "E"}
_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


def parse_sentence(text: str, S: Structure, allow_equality: bool = True) -> PHSentence:
    """Parse ``A x E y : R(x,y) & x=c0``. Constants are names from S or integer literals."""
    text = " ".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if ":" not in text:
        raise InputError("sentence needs ':' between prefix and matrix")
    head, body = text.split(":", 1)
    toks = head.replace("∀", " ∀ ").replace("∃", " ∃ ").split()
    if len(toks) % 2:
        raise InputError("prefix must alternate quantifier and variable")
    prefix = []
    for q, v in zip(toks[0::2], toks[1::2]):
        if q not in _QUANT or not re.fullmatch(_IDENT, v):
            raise InputError(f"bad prefix entry {q} {v}")
        prefix.append((_QUANT[q], v))
    bound = {v for _, v in prefix}

    def term(tok: str) -> Term:
        tok = tok.strip()
        if tok in bound:
            return tok
        if tok in S.constants:
            return S.constants[tok]
        if tok.isdigit():
            v = int(tok)
            if v >= S.size:
                raise InputError(f"element {v} outside domain")
            return v
        raise InputError(f"unbound variable or unknown constant {tok!r}")

    atoms = []
    body = body.strip()
    if body and body != "true":
        for chunk in _split_top(body, "&"):
            chunk = chunk.strip()
            m = re.fullmatch(rf"({_IDENT})\s*\((.*)\)", chunk)
            if m:
                name = m.group(1)
                if name not in S.relations:
                    raise InputError(f"unknown relation {name}")
                inner = m.group(2).strip()
                args = tuple(term(a) for a in inner.split(",")) if inner else ()
                if len(args) != S.relations[name].arity:
                    raise InputError(f"{name} has arity {S.relations[name].arity}")
                atoms.append(RelAtom(name, args))
                continue
            if "=" in chunk:
                left, right = chunk.split("=", 1)
                if not allow_equality:
                    raise InputError("equality atoms are not allowed")
                atoms.append(EqAtom(term(left), term(right)))
                continue
            raise InputError(f"cannot parse atom {chunk!r}")
    return PHSentence(tuple(prefix), tuple(atoms), allow_equality)


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def atom_holds(S: Structure, atom, assign: dict) -> bool:
    vals = tuple(assign[a] if isinstance(a, str) else a for a in atom.args)
    if isinstance(atom, EqAtom):
        return vals[0] == vals[1]
    return vals in S.relations[atom.rel].tuples


# ----------------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class GameVerdict:
    """Outcome of a (restricted) game.

    ``skolem`` holds one table set per adversary: var -> {universal prefix values -> value}.
    For false verdicts ``member`` is the losing adversary, ``play`` the universal moves along
    the first refuted branch and ``counter`` the universal counter-strategy tree.
    """
    holds: bool
    skolem: tuple = ()
    member: int | None = None
    play: tuple | None = None
    counter: object = None
    nodes: int = 0

    def __bool__(self):
        return self.holds

    def to_json(self, phi: PHSentence | None = None) -> dict:
        out: dict = {"holds": self.holds}
        if self.holds:
            tables = []
            for sk in self.skolem:
                tables.append({var: {_key_text(phi, var, k): v for k, v in sorted(tab.items())}
                               for var, tab in sk.items()})
            out["skolem"] = tables
        else:
            out["member"] = self.member
            out["play"] = list(self.play) if self.play is not None else None
        return out


def _key_text(phi, var, key) -> str:
    if phi is None:
        return ",".join(map(str, key))
    before = []
    for q, v in phi.prefix:
        if v == var:
            break
        if q == "A":
            before.append(v)
    return ",".join(f"{u}={a}" for u, a in zip(before, key))


# ----------------------------------------------------------------------- engine

class _Compiled:
    def __init__(self, S: Structure, phi: PHSentence):
        self.S = S
        self.phi = phi
        self.order = phi.variables
        self.pos = {v: i for i, v in enumerate(self.order)}
        self.kinds = [q for q, _ in phi.prefix]
        self.const_false = False
        self.atoms = []           # (positions, allowed set, allowed list, last)
        for atom in phi.atoms:
            args = atom.args
            first: dict[str, int] = {}
            for p, a in enumerate(args):
                if isinstance(a, str):
                    first.setdefault(a, p)
            vars_ = list(first)
            if isinstance(atom, EqAtom):
                source = [(a, a) for a in range(S.size)]
            else:
                source = S.relations[atom.rel].tuples
            allowed = set()
            for t in source:
                ok = True
                for p, a in enumerate(args):
                    if isinstance(a, str):
                        if t[p] != t[first[a]]:
                            ok = False
                            break
                    elif t[p] != a:
                        ok = False
                        break
                if ok:
                    allowed.add(tuple(t[first[v]] for v in vars_))
            if not vars_:
                if not allowed:
                    self.const_false = True
                continue
            positions = tuple(self.pos[v] for v in vars_)
            self.atoms.append((positions, allowed, sorted(allowed), max(positions)))
        nvars = len(self.order)
        self.by_last = [[] for _ in range(nvars)]
        for a in self.atoms:
            self.by_last[a[3]].append(a)
        self.frontier = []
        for p in range(nvars + 1):
            live = set()
            for positions, _, _, last in self.atoms:
                if last >= p:
                    live.update(q for q in positions if q < p)
            self.frontier.append(tuple(sorted(live)))
        self.block_end = [0] * nvars
        for p in range(nvars - 1, -1, -1):
            if self.kinds[p] == "E" and p + 1 < nvars and self.kinds[p + 1] == "E":
                self.block_end[p] = self.block_end[p + 1]
            else:
                self.block_end[p] = p + 1
        self.universal_index = {}
        for p, q in enumerate(self.kinds):
            if q == "A":
                self.universal_index[p] = len(self.universal_index)


class _Game:
    def __init__(self, comp: _Compiled, member: frozenset | None, counter: Counter):
        self.c = comp
        self.n = comp.S.size
        self.counter = counter
        self.memo: dict = {}
        self.next_moves = None
        if member is not None:
            nxt: dict[tuple, set] = {}
            for t in member:
                for j in range(len(t)):
                    nxt.setdefault(t[:j], set()).add(t[j])
            self.next_moves = {k: sorted(v) for k, v in nxt.items()}

    def run(self):
        assign = [None] * len(self.c.order)
        return self._solve(0, assign, ())

    def _moves(self, uprefix):
        if self.next_moves is None:
            return range(self.n)
        return self.next_moves.get(uprefix, ())

    def _solve(self, p, assign, uprefix):
        c = self.c
        if p == len(c.order):
            return True, None
        self.counter.tick()
        key = (p, uprefix if self.next_moves is not None else None,
               tuple(assign[q] for q in c.frontier[p]))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if c.kinds[p] == "A":
            res = self._universal(p, assign, uprefix)
        else:
            res = self._existential(p, assign, uprefix)
        self.memo[key] = res
        return res

    def _universal(self, p, assign, uprefix):
        c = self.c
        var = c.order[p]
        children = {}
        for a in self._moves(uprefix):
            assign[p] = a
            ok = all(tuple(assign[q] for q in positions) in allowed
                     for positions, allowed, _, _ in c.by_last[p])
            if not ok:
                assign[p] = None
                return False, ("A", var, a, None)
            good, sub = self._solve(p + 1, assign, uprefix + (a,))
            assign[p] = None
            if not good:
                return False, ("A", var, a, sub)
            children[a] = sub
        return True, ("A", var, children)

    def _existential(self, p, assign, uprefix):
        c = self.c
        end = c.block_end[p]
        width = end - p
        csp = CSP([full_mask(self.n)] * width)
        for q in range(p, end):
            for positions, _, allowed_list, _ in c.by_last[q]:
                fixed = [(i, assign[pos]) for i, pos in enumerate(positions) if pos < p]
                block = [(i, pos - p) for i, pos in enumerate(positions) if pos >= p]
                if fixed:
                    rows = [tuple(t[i] for i, _ in block) for t in allowed_list
                            if all(t[i] == v for i, v in fixed)]
                    csp.add([b for _, b in block], rows)
                else:
                    csp.add([b for _, b in block], allowed_list)
        names = c.order[p:end]
        refuted = []
        for sol in csp.solutions(self.counter):
            for i, v in enumerate(sol):
                assign[p + i] = v
            good, sub = self._solve(end, assign, uprefix)
            for i in range(width):
                assign[p + i] = None
            choice = dict(zip(names, sol))
            if good:
                return True, ("E", choice, sub)
            refuted.append((tuple(sol), sub))
        return False, ("E*", names, refuted)


def _skolem_from_tree(comp: _Compiled, tree) -> dict:
    tables: dict[str, dict] = {v: {} for q, v in comp.phi.prefix if q == "E"}
    stack = [(tree, ())]
    while stack:
        node, uvals = stack.pop()
        if node is None:
            continue
        if node[0] == "A":
            for a, sub in node[2].items():
                stack.append((sub, uvals + (a,)))
        else:
            for var, val in node[1].items():
                p = comp.pos[var]
                k = sum(1 for q in range(p) if comp.kinds[q] == "A")
                tables[var][uvals[:k]] = val
            stack.append((node[2], uvals))
    return tables


def _first_play(tree) -> tuple:
    play = []
    node = tree
    while node is not None:
        if node[0] == "A":
            play.append(node[2])
            node = node[3]
        elif node[0] == "E*":
            if not node[2]:
                break
            node = node[2][0][1]
        else:
            break
    return tuple(play)


def _evaluate(S, phi, members, budget, witness):
    budget = budget or Budget()
    comp = _Compiled(S, phi)
    counter = Counter(budget.search_nodes)
    m = len(phi.universals)
    if members is not None:
        for B in members:
            for t in B:
                if len(t) != m:
                    raise InputError(f"adversary tuple {t} does not match {m} universal variables")
                if any(not 0 <= v < S.size for v in t):
                    raise InputError(f"adversary tuple {t} outside the domain")
    runs = members if members is not None else [None]
    tables = []
    for idx, B in enumerate(runs):
        if B is not None and not B:
            continue
        if comp.const_false:
            play = tuple(sorted(B)[0]) if B is not None else (0,) * m
            return GameVerdict(False, member=idx if members is not None else None, play=play,
                               counter=("F",), nodes=counter.count)
        game = _Game(comp, frozenset(B) if B is not None else None, counter)
        good, tree = game.run()
        if not good:
            return GameVerdict(False, member=idx if members is not None else None,
                               play=_first_play(tree), counter=tree, nodes=counter.count)
        tables.append(_skolem_from_tree(comp, tree) if witness else {})
    return GameVerdict(True, skolem=tuple(tables), nodes=counter.count)


def eval_qcsp(S: Structure, phi: PHSentence, budget: Budget | None = None,
              witness: bool = True) -> GameVerdict:
    return _evaluate(S, phi, None, budget, witness)


def eval_csp(S: Structure, phi: PHSentence, budget: Budget | None = None) -> GameVerdict:
    if not phi.is_existential:
        raise InputError("eval_csp needs an existential sentence")
    return _evaluate(S, phi, None, budget, True)


def eval_qcsp_restricted(S: Structure, phi: PHSentence, omega, budget: Budget | None = None,
                         witness: bool = True) -> GameVerdict:
    """Evaluate against every adversary in ``omega`` (each an iterable of tuples).

    The sentence holds iff the existential player wins against every member.
    """
    members = [frozenset(tuple(t) for t in B) for B in _members(omega)]
    return _evaluate(S, phi, members, budget, witness)


def _members(omega) -> list:
    if hasattr(omega, "members"):
        return [B.tuples for B in omega.members]
    out = []
    for B in omega:
        out.append(B.tuples if hasattr(B, "tuples") else B)
    return out


# ----------------------------------------------------------------------- replay

def check_verdict(S: Structure, phi: PHSentence, verdict: GameVerdict, omega=None,
                  max_block: int = 10 ** 5) -> bool:
    """Independently replay a verdict's witness against S."""
    m = len(phi.universals)
    members = ([frozenset(tuple(t) for t in B) for B in _members(omega)] if omega is not None
               else [frozenset(itertools.product(range(S.size), repeat=m))])
    if verdict.holds:
        live = [B for B in members if B]
        if len(verdict.skolem) != len(live):
            return False
        for B, tables in zip(live, verdict.skolem):
            for play in B:
                assign = {}
                uvals: list[int] = []
                for q, v in phi.prefix:
                    if q == "A":
                        assign[v] = play[len(uvals)]
                        uvals.append(play[len(uvals)])
                    else:
                        val = tables.get(v, {}).get(tuple(uvals))
                        if val is None:
                            return False
                        assign[v] = val
                if not all(atom_holds(S, a, assign) for a in phi.atoms):
                    return False
        return True
    B = members[verdict.member or 0]
    if verdict.counter == ("F",):
        return any(not a.variables() and not atom_holds(S, a, {}) for a in phi.atoms)
    return _refutes(S, phi, B, verdict.counter, 0, {}, (), max_block)


def _refutes(S, phi, B, node, p, assign, uprefix, max_block) -> bool:
    prefix = phi.prefix

    def some_atom_false():
        return any(all(v in assign for v in a.variables()) and not atom_holds(S, a, assign)
                   for a in phi.atoms)

    if p == len(prefix):
        return some_atom_false()
    q, var = prefix[p]
    if q == "A":
        if node is None or node[0] != "A" or node[1] != var:
            return False
        a = node[2]
        if not any(t[:len(uprefix) + 1] == uprefix + (a,) for t in B):
            return False
        assign[var] = a
        try:
            if node[3] is None:
                return some_atom_false()
            return _refutes(S, phi, B, node[3], p + 1, assign, uprefix + (a,), max_block)
        finally:
            del assign[var]
    if node is None or node[0] != "E*":
        return False
    names = node[1]
    end = p + len(names)
    refuted = dict(node[2])
    if S.size ** len(names) > max_block:
        return True   # too large to replay exhaustively
    for vals in itertools.product(range(S.size), repeat=len(names)):
        for v, a in zip(names, vals):
            assign[v] = a
        try:
            if some_atom_false():
                continue
            if vals not in refuted:
                return False
            if not _refutes(S, phi, B, refuted[vals], end, assign, uprefix, max_block):
                return False
        finally:
            for v in names:
                del assign[v]
    return True
