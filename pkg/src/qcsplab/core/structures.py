"""Finite structures, operations and the structure text format."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from ..budget import InputError
from .relations import Relation, materialize, parse_expr


@dataclass(frozen=True)
class Domain:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise InputError("domain must be nonempty")

    @property
    def elements(self) -> range:
        return range(self.size)


class Structure:
    """Domain {0..size-1} with named relations and named constants."""

    def __init__(self, size: int, relations: Mapping[str, Relation] | None = None,
                 constants: Mapping[str, int] | None = None):
        if size < 1:
            raise InputError("domain must be nonempty")
        rels = dict(relations or {})
        for name, rel in rels.items():
            if not isinstance(rel, Relation):
                raise InputError(f"relation {name} is not a Relation")
            rel.check_domain(size)
        consts = dict(constants or {})
        for name, v in consts.items():
            if not 0 <= v < size:
                raise InputError(f"constant {name}={v} outside domain")
        self.size = size
        self.relations = MappingProxyType(rels)
        self.constants = MappingProxyType(consts)

    @property
    def domain(self) -> Domain:
        return Domain(self.size)

    def __eq__(self, other):
        return (isinstance(other, Structure) and self.size == other.size
                and dict(self.relations) == dict(other.relations)
                and dict(self.constants) == dict(other.constants))

    def __hash__(self):
        return hash((self.size, tuple(sorted(self.relations.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return f"Structure(size={self.size}, relations={list(self.relations)}, constants={dict(self.constants)})"

    def with_constants(self, elements=None) -> "Structure":
        """Add constants c<i> naming the given elements (default: all)."""
        consts = dict(self.constants)
        for v in (range(self.size) if elements is None else elements):
            consts.setdefault(f"c{v}", v)
        return Structure(self.size, self.relations, consts)

    def with_relations(self, extra: Mapping[str, Relation]) -> "Structure":
        rels = dict(self.relations)
        rels.update(extra)
        return Structure(self.size, rels, self.constants)

    def named_elements(self) -> set[int]:
        return set(self.constants.values())

    def constant_name(self, v: int) -> str | None:
        for name, w in self.constants.items():
            if w == v:
                return name
        return None


class Operation:
    """A k-ary operation stored as a full table; x1 is the most significant digit."""

    __slots__ = ("size", "arity", "table", "__dict__")

    def __init__(self, size: int, arity: int, table):
        table = tuple(int(v) for v in table)
        if len(table) != size ** arity:
            raise InputError(f"table length {len(table)} != {size}^{arity}")
        if any(not 0 <= v < size for v in table):
            raise InputError("table value outside domain")
        self.size = size
        self.arity = arity
        self.table = table

    @classmethod
    def from_function(cls, size: int, arity: int, fn: Callable[..., int]) -> "Operation":
        return cls(size, arity, [fn(*xs) for xs in itertools.product(range(size), repeat=arity)])

    @classmethod
    def projection(cls, size: int, arity: int, i: int) -> "Operation":
        return cls.from_function(size, arity, lambda *xs: xs[i])

    def index(self, args) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return idx

    def __call__(self, *args) -> int:
        if len(args) != self.arity:
            raise InputError(f"expected {self.arity} arguments")
        return self.table[self.index(args)]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def inputs(self):
        return itertools.product(range(self.size), repeat=self.arity)

    def is_idempotent(self) -> bool:
        return all(self(*([a] * self.arity)) == a for a in range(self.size))

    def apply_columns(self, tuples) -> tuple:
        """Coordinatewise application to k tuples of equal length."""
        return tuple(self(*col) for col in zip(*tuples))

    def __eq__(self, other):
        return (isinstance(other, Operation) and self.size == other.size
                and self.arity == other.arity and self.table == other.table)

    def __hash__(self):
        return hash((self.size, self.arity, self.table))

    def __repr__(self):
        return f"Operation(size={self.size}, arity={self.arity}, table={''.join(map(str, self.table)) if self.size <= 10 else self.table})"

    def to_dict(self) -> dict:
        return {"size": self.size, "arity": self.arity, "table": list(self.table)}

    @classmethod
    def from_dict(cls, d: dict) -> "Operation":
        return cls(int(d["size"]), int(d["arity"]), d["table"])


def flatten(t, size: int) -> int:
    idx = 0
    for a in t:
        idx = idx * size + a
    return idx


def unflatten(idx: int, size: int, k: int) -> tuple:
    out = []
    for _ in range(k):
        idx, r = divmod(idx, size)
        out.append(r)
    return tuple(reversed(out))


def power(S: Structure, k: int, lift_constants: bool = False) -> Structure:
    """The k-th direct power; element (a1..ak) is encoded by its mixed-radix index."""
    if k < 1:
        raise InputError("power exponent must be positive")
    n = S.size
    rels = {}
    for name, R in S.relations.items():
        ts = set()
        for choice in itertools.product(sorted(R.tuples), repeat=k):
            ts.add(tuple(flatten(col, n) for col in zip(*choice)) if R.arity else ())
        rels[name] = Relation(R.arity, ts)
    consts = {}
    if lift_constants:
        items = sorted(S.constants.items())
        for combo in itertools.product(items, repeat=k):
            consts["*".join(c[0] for c in combo)] = flatten([c[1] for c in combo], n)
    return Structure(n ** k, rels, consts)


# ---------------------------------------------------------------- text format

_TUPLE = re.compile(r"\(([^()]*)\)")


def _parse_tuples(body: str, arity: int) -> list[tuple]:
    body = body.strip()
    if not body:
        return []
    out = []
    for chunk in body.split(";"):
        chunk = chunk.strip()
        m = _TUPLE.fullmatch(chunk)
        if not m:
            raise InputError(f"bad tuple {chunk!r}")
        inner = m.group(1).strip()
        vals = tuple(int(x) for x in inner.split(",")) if inner else ()
        if len(vals) != arity:
            raise InputError(f"tuple {chunk} does not have arity {arity}")
        out.append(vals)
    return out


def parse_structure(text: str) -> Structure:
    size = None
    rels: dict[str, Relation] = {}
    consts: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        kw = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        try:
            if kw == "domain":
                size = int(rest)
                if size < 1:
                    raise InputError("domain must be nonempty")
            elif kw == "constant":
                name, val = rest.split()
                if name in consts:
                    raise InputError(f"duplicate constant {name}")
                consts[name] = int(val)
            elif kw == "relation":
                bits = rest.split(None, 3)
                if len(bits) < 3:
                    raise InputError("relation needs name, arity and kind")
                name, arity, kind = bits[0], int(bits[1]), bits[2]
                body = bits[3] if len(bits) > 3 else ""
                if name in rels:
                    raise InputError(f"duplicate relation {name}")
                if size is None:
                    raise InputError("domain must come first")
                if kind == "tuples":
                    rels[name] = Relation(arity, _parse_tuples(body, arity))
                elif kind == "expr":
                    rels[name] = materialize(parse_expr(body, arity, size), size)
                else:
                    raise InputError(f"unknown relation kind {kind!r}")
            else:
                raise InputError(f"unknown keyword {kw!r}")
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
    if size is None:
        raise InputError("missing domain line")
    return Structure(size, rels, consts)


def dump_structure(S: Structure) -> str:
    lines = [f"domain {S.size}"]
    for name, v in S.constants.items():
        lines.append(f"constant {name} {v}")
    for name, R in S.relations.items():
        if R.source is not None and R.arity > 0:
            lines.append(f"relation {name} {R.arity} expr {R.source.text()}")
        else:
            body = ";".join("(" + ",".join(map(str, t)) + ")" for t in sorted(R.tuples))
            lines.append(f"relation {name} {R.arity} tuples {body}".rstrip())
    return "\n".join(lines) + "\n"
