"""Relations given by tuple sets or by boolean formulas over equalities."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Union

from ..budget import Budget, BudgetExceeded, InputError


@dataclass(frozen=True)
class Atom:
    """``x_left = rhs`` or ``x_left != rhs``; rhs is a variable index or a constant."""
    left: int           # 0-based coordinate
    right: int          # coordinate or element
    negated: bool = False
    right_is_const: bool = False

    def holds(self, t) -> bool:
        rhs = self.right if self.right_is_const else t[self.right]
        return (t[self.left] == rhs) != self.negated

    def text(self) -> str:
        rhs = str(self.right) if self.right_is_const else f"x{self.right + 1}"
        return f"x{self.left + 1}{'!=' if self.negated else '='}{rhs}"


@dataclass(frozen=True)
class And:
    parts: tuple

    def holds(self, t) -> bool:
        return all(p.holds(t) for p in self.parts)


@dataclass(frozen=True)
class Or:
    parts: tuple

    def holds(self, t) -> bool:
        return any(p.holds(t) for p in self.parts)


Node = Union[Atom, And, Or]


def _text(node: Node, top: bool = True) -> str:
    if isinstance(node, Atom):
        return node.text()
    if isinstance(node, And):
        if not node.parts:
            return "true"
        return " & ".join(_text(p, False) for p in node.parts)
    if not node.parts:
        return "false"
    body = " | ".join(_text(p, True) for p in node.parts)
    return body if top else f"({body})"


def _max_var(node: Node) -> int:
    if isinstance(node, Atom):
        m = node.left
        if not node.right_is_const:
            m = max(m, node.right)
        return m
    return max((_max_var(p) for p in node.parts), default=-1)


@dataclass(frozen=True)
class RelationExpr:
    arity: int
    root: Node

    def holds(self, t) -> bool:
        return self.root.holds(t)

    @property
    def is_dnf(self) -> bool:
        def conj(n):
            return isinstance(n, Atom) or (
                isinstance(n, And) and all(isinstance(p, Atom) for p in n.parts))
        r = self.root
        return conj(r) or (isinstance(r, Or) and all(conj(p) for p in r.parts))

    def conjuncts(self) -> list[list[Atom]]:
        """The DNF as a list of atom lists."""
        if not self.is_dnf:
            raise InputError("expression is not in DNF")
        r = self.root
        parts = r.parts if isinstance(r, Or) else (r,)
        return [[p] if isinstance(p, Atom) else list(p.parts) for p in parts]

    def atom_count(self) -> int:
        def count(n):
            if isinstance(n, Atom):
                return 1
            return sum(count(p) for p in n.parts)
        return count(self.root)

    def text(self) -> str:
        return _text(self.root)

    @staticmethod
    def from_tuples(arity: int, tuples: Iterable[tuple]) -> "RelationExpr":
        """DNF with one conjunction of constant atoms per tuple."""
        conj = [And(tuple(Atom(i, v, right_is_const=True) for i, v in enumerate(t)))
                for t in sorted(set(tuples))]
        return RelationExpr(arity, Or(tuple(conj)))


_TOKEN = re.compile(r"\s*(x\d+|\d+|!=|=|&|\||\(|\)|true|false)")


def _tokens(text: str) -> list[str]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"cannot parse formula near {text[pos:pos + 12]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def parse_expr(text: str, arity: int, size: int | None = None) -> RelationExpr:
    """Parse ``x1!=x2 | x1=0`` style formulas (variables are 1-based)."""
    toks = _tokens(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise InputError(f"expected {expected or 'token'} in formula {text!r}")
        pos += 1
        return tok

    def term():
        tok = take()
        if tok.startswith("x"):
            i = int(tok[1:]) - 1
            if not 0 <= i < arity:
                raise InputError(f"variable {tok} outside arity {arity}")
            return ("v", i)
        if tok.isdigit():
            v = int(tok)
            if size is not None and v >= size:
                raise InputError(f"constant {v} outside the domain")
            return ("c", v)
        raise InputError(f"unexpected {tok!r} in formula")

    def atom():
        tok = peek()
        if tok == "(":
            take("(")
            node = disj()
            take(")")
            return node
        if tok == "true":
            take()
            return And(())
        if tok == "false":
            take()
            return Or(())
        a = term()
        op = take()
        if op not in ("=", "!="):
            raise InputError(f"expected = or != in formula {text!r}")
        b = term()
        if a[0] == "c":
            a, b = b, a
        if a[0] == "c":
            raise InputError("an atom needs at least one variable")
        return Atom(a[1], b[1], op == "!=", b[0] == "c")

    def conj():
        parts = [atom()]
        while peek() == "&":
            take()
            parts.append(atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def disj():
        parts = [conj()]
        while peek() == "|":
            take()
            parts.append(conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    if not toks:
        raise InputError("empty formula")
    root = disj()
    if pos != len(toks):
        raise InputError(f"trailing input in formula {text!r}")
    return RelationExpr(arity, root)


class Relation:
    """An r-ary relation; equality compares tuple sets only."""

    __slots__ = ("arity", "tuples", "source")

    def __init__(self, arity: int, tuples: Iterable[tuple], source: RelationExpr | None = None):
        if arity < 0:
            raise InputError("arity must be nonnegative")
        ts = frozenset(tuple(t) for t in tuples)
        for t in ts:
            if len(t) != arity:
                raise InputError(f"tuple {t} has wrong arity (expected {arity})")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "tuples", ts)
        object.__setattr__(self, "source", source)

    def __setattr__(self, key, value):
        raise AttributeError("Relation is immutable")

    def __eq__(self, other):
        return isinstance(other, Relation) and self.arity == other.arity and self.tuples == other.tuples

    def __hash__(self):
        return hash((self.arity, self.tuples))

    def __contains__(self, t):
        return tuple(t) in self.tuples

    def __len__(self):
        return len(self.tuples)

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __repr__(self):
        return f"Relation({self.arity}, {sorted(self.tuples)})"

    def check_domain(self, size: int) -> None:
        for t in self.tuples:
            for v in t:
                if not 0 <= v < size:
                    raise InputError(f"element {v} outside domain of size {size}")


def materialize(expr: RelationExpr, size: int, budget: Budget | None = None) -> Relation:
    """All tuples over {0..size-1} satisfying the formula."""
    budget = budget or Budget()
    if expr.arity < 1:
        raise InputError("cannot materialize a formula of arity 0")
    if _max_var(expr.root) >= expr.arity:
        raise InputError("formula mentions a variable beyond its arity")
    total = size ** expr.arity
    if total > budget.materialize:
        raise BudgetExceeded("materialization", budget.materialize, total)
    ts = [t for t in itertools.product(range(size), repeat=expr.arity) if expr.holds(t)]
    return Relation(expr.arity, ts, source=expr)


def relation_from_text(text: str, arity: int, size: int) -> Relation:
    return materialize(parse_expr(text, arity, size), size)
