"""Preservation, polymorphisms and term closure."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from ..budget import Budget, BudgetExceeded, Counter, InputError
from .relations import Relation
from .solver import CSP, full_mask
from .structures import Operation, Structure, flatten


# ------------------------------------------------------------------ preservation

def preserves_bruteforce(f: Operation, R: Relation) -> tuple | None:
    """Return k tuples of R whose image leaves R, or None if f preserves R."""
    rows = sorted(R.tuples)
    for choice in itertools.product(rows, repeat=f.arity):
        img = tuple(f(*col) for col in zip(*choice)) if R.arity else ()
        if img not in R.tuples:
            return choice
    return None


def _residual_levels(f: Operation):
    """For each prefix length j, map prefix index -> class id, and the transition tables.

    Two prefixes share a class when every completion gives the same value.
    trans[j][c][a] is the class at level j+1 reached from class c by appending a.
    """
    n, k = f.size, f.arity
    level = list(f.table)            # classes at level k are the values themselves
    trans = [None] * k
    for j in range(k - 1, -1, -1):
        ids: dict[tuple, int] = {}
        keys = []
        new_level = []
        for p in range(n ** j):
            key = tuple(level[p * n + a] for a in range(n))
            cid = ids.get(key)
            if cid is None:
                cid = ids[key] = len(keys)
                keys.append(key)
            new_level.append(cid)
        trans[j] = keys
        level = new_level
    return trans


def preserves_dp(f: Operation, R: Relation) -> tuple | None:
    """Exhaustive preservation check by dynamic programming over columns.

    Rows of the k x r argument matrix are tracked only up to their residual class,
    so the state space stays small for near-unanimity-like tables.
    Returns a violating list of k tuples, or None.
    """
    if R.arity == 0:
        return None if (not R.tuples or () in R.tuples) else ()
    rows = sorted(R.tuples)
    trans = _residual_levels(f)
    start = (0,) * R.arity
    layer = {start: None}
    parents = []
    for j in range(f.arity):
        nxt = {}
        tj = trans[j]
        for state in layer:
            for t in rows:
                ns = tuple(tj[c][a] for c, a in zip(state, t))
                if ns not in nxt:
                    nxt[ns] = (state, t)
        parents.append(nxt)
        layer = nxt
    for state in layer:
        if state not in R.tuples:
            cols = []
            s = state
            for j in range(f.arity - 1, -1, -1):
                prev, t = parents[j][s]
                cols.append(t)
                s = prev
            return tuple(reversed(cols))
    return None


def preserves(f: Operation, R: Relation, witness: bool = False):
    """Whether f preserves R. Uses brute force for small inputs and the column DP otherwise."""
    if any(v >= f.size for t in R.tuples for v in t):
        raise InputError("relation uses elements outside the operation's domain")
    if len(R.tuples) ** f.arity <= 20000:
        bad = preserves_bruteforce(f, R)
    else:
        bad = preserves_dp(f, R)
    if witness:
        return bad is None, bad
    return bad is None


def preserves_structure(f: Operation, S: Structure) -> bool:
    if f.size != S.size:
        return False
    for v in S.constants.values():
        if f(*([v] * f.arity)) != v:
            return False
    return all(preserves(f, R) for R in S.relations.values())


# ------------------------------------------------------------------ polymorphisms

def _polymorphism_csp(S: Structure, k: int, idempotent_only: bool) -> CSP:
    n = S.size
    csp = CSP([full_mask(n)] * (n ** k))
    for R in S.relations.values():
        if R.arity == 0:
            if not R.tuples:
                csp.failed = True
            continue
        rows = sorted(R.tuples)
        allowed = rows
        for choice in itertools.product(rows, repeat=k):
            scope = [flatten(col, n) for col in zip(*choice)]
            csp.add(scope, allowed)
    fixed = set(S.constants.values())
    if idempotent_only:
        fixed = set(range(n))
    for a in fixed:
        csp.fix(flatten([a] * k, n), a)
    return csp


def polymorphisms(S: Structure, k: int, idempotent_only: bool = False,
                  budget: Budget | None = None) -> Iterator[Operation]:
    """All k-ary polymorphisms, found as homomorphisms S^k -> S."""
    budget = budget or Budget()
    n = S.size
    if k < 1:
        raise InputError("arity must be positive")
    cells = n ** k
    if n ** cells > budget.enum_tables:
        raise BudgetExceeded("polymorphism enumeration", budget.enum_tables, n ** cells)
    csp = _polymorphism_csp(S, k, idempotent_only)
    for sol in csp.solutions(Counter(budget.search_nodes)):
        yield Operation(n, k, sol)


def find_polymorphism(S: Structure, k: int, fixed: Mapping[tuple, int] | None = None,
                      idempotent_only: bool = False, budget: Budget | None = None) -> Operation | None:
    """First k-ary polymorphism agreeing with ``fixed`` (input tuple -> value), if any.

    This is a search, not an enumeration, so the table-count cap does not apply.
    """
    budget = budget or Budget()
    n = S.size
    csp = _polymorphism_csp(S, k, idempotent_only)
    for args, v in (fixed or {}).items():
        csp.fix(flatten(args, n), v)
    sol = csp.solve(Counter(budget.search_nodes))
    return None if sol is None else Operation(n, k, sol)


def near_unanimity_constraints(n: int, k: int) -> dict[tuple, int]:
    out = {}
    for x in range(n):
        for y in range(n):
            for pos in range(k):
                args = [x] * k
                args[pos] = y
                out[tuple(args)] = x
    return out


def find_near_unanimity(S: Structure, k: int = 3, budget: Budget | None = None) -> Operation | None:
    return find_polymorphism(S, k, near_unanimity_constraints(S.size, k), budget=budget)


def is_near_unanimity(f: Operation) -> bool:
    if f.arity < 3:
        return False
    return all(f(*args) == v for args, v in near_unanimity_constraints(f.size, f.arity).items())


# ------------------------------------------------------------------ term closure

@dataclass
class ClosureResult:
    elements: list[tuple]
    provenance: list          # None for seeds, else (op index, argument indices)
    complete: bool            # fixpoint reached (False if stopped early)

    def as_set(self) -> frozenset:
        return frozenset(self.elements)


def _combos(old: int, total: int, arity: int, chunk: int = 4096):
    """Index tuples over range(total) using at least one index >= old, lexicographic by pattern."""
    if total == 0:
        return
    for p in range(arity):
        ranges = [np.arange(old)] * p + [np.arange(old, total)] + [np.arange(total)] * (arity - p - 1)
        if any(len(r) == 0 for r in ranges):
            continue
        sizes = [len(r) for r in ranges]
        count = int(np.prod(sizes))
        for start in range(0, count, chunk):
            flat = np.arange(start, min(count, start + chunk))
            cols = []
            for size, r in zip(reversed(sizes), reversed(ranges)):
                flat, rem = np.divmod(flat, size)
                cols.append(r[rem])
            yield np.stack(list(reversed(cols)), axis=1)


def iter_closure(ops: Sequence[Operation], seeds: Iterable[tuple], size: int,
                 budget: Budget | None = None, provenance: bool = False, state: dict | None = None,
                 closed_prefix: int = 0):
    """Yield (element, provenance) in breadth-first order, seeds first.

    ``state`` (if given) receives the element list, provenance list and a ``complete`` flag.
    The first ``closed_prefix`` seeds are promised to be closed already, which skips
    recombining them among themselves.
    """
    budget = budget or Budget()
    elements: list[tuple] = []
    index: dict[bytes, int] = {}
    prov: list = []
    vecs: list[np.ndarray] = []
    if state is not None:
        state.update(elements=elements, provenance=prov, complete=False)
    for s in seeds:
        arr = np.asarray(s, dtype=np.int64)
        key = arr.tobytes()
        if key not in index:
            index[key] = len(elements)
            elements.append(tuple(int(v) for v in s))
            vecs.append(arr)
            prov.append(None)
            yield elements[-1], None
    if not elements:
        if state is not None:
            state["complete"] = True
        return
    length = len(elements[0])
    work = 0
    old = min(closed_prefix, len(elements))
    while old < len(elements):
        total = len(elements)
        mat = np.stack(vecs)
        for oi, f in enumerate(ops):
            if f.size != size:
                raise InputError("operation over a different domain")
            k = f.arity
            w = size ** np.arange(k - 1, -1, -1, dtype=np.int64)
            for combos in _combos(old, total, k):
                work += combos.shape[0] * max(length, 1) * k
                if work > budget.closure_work:
                    raise BudgetExceeded("term closure work", budget.closure_work)
                idx = np.tensordot(mat[combos], w, axes=([1], [0]))
                res = f.array[idx]
                for r, row in enumerate(res):
                    key = row.tobytes()
                    if key in index:
                        continue
                    index[key] = len(elements)
                    elements.append(tuple(int(v) for v in row))
                    vecs.append(row.copy())
                    p = (oi, tuple(int(c) for c in combos[r])) if provenance else None
                    prov.append(p)
                    yield elements[-1], p
        old = total
    if state is not None:
        state["complete"] = True


def closure(ops: Sequence[Operation], seeds: Iterable[tuple], size: int,
            cap: int | None = None, stop_at: int | None = None,
            budget: Budget | None = None, provenance: bool = False) -> ClosureResult:
    """Least set containing the seeds and closed under coordinatewise application of ops."""
    state: dict = {}
    count = 0
    for _ in iter_closure(ops, seeds, size, budget, provenance, state):
        count += 1
        if cap is not None and count > cap:
            raise BudgetExceeded("term closure size", cap, count)
        if stop_at is not None and count >= stop_at:
            break
    if not state:
        return ClosureResult([], [], True)
    return ClosureResult(state["elements"], state["provenance"], state["complete"])


def term_closure(ops: Sequence[Operation], seeds: Iterable[tuple], cap: int | None = None,
                 size: int | None = None, budget: Budget | None = None) -> frozenset:
    seeds = list(seeds)
    if size is None:
        if not ops:
            return frozenset(tuple(s) for s in seeds)
        size = ops[0].size
    if seeds and cap is None:
        cap = size ** len(seeds[0])
    full = size ** len(seeds[0]) if seeds else None
    return closure(ops, seeds, size, cap=cap, stop_at=full, budget=budget).as_set()


def term_operation(res: ClosureResult, target: int, ops: Sequence[Operation], size: int,
                   seed_order: Sequence[int] | None = None) -> tuple[Operation, list[int]]:
    """Turn the derivation of element ``target`` into an operation on the seeds it uses.

    Returns the operation and the seed indices giving its argument order.
    """
    used: set[int] = set()

    def collect(i):
        if res.provenance[i] is None:
            used.add(i)
        else:
            for j in res.provenance[i][1]:
                collect(j)

    collect(target)
    order = sorted(used) if seed_order is None else [i for i in seed_order if i in used]
    k = len(order)
    grids = np.indices((size,) * k).reshape(k, -1) if k else np.zeros((0, 1), dtype=np.int64)
    memo: dict[int, np.ndarray] = {}

    def value(i):
        if i in memo:
            return memo[i]
        p = res.provenance[i]
        if p is None:
            out = grids[order.index(i)]
        else:
            f = ops[p[0]]
            args = [value(j) for j in p[1]]
            idx = np.zeros_like(args[0])
            for a in args:
                idx = idx * size + a
            out = f.array[idx]
        memo[i] = out
        return out

    return Operation(size, k, value(target).tolist()), order


def subpower_full_nu(ops: Sequence[Operation], seeds: Sequence[tuple], size: int,
                     budget: Budget | None = None) -> bool | None:
    """Decide whether the seeds generate all of A^N when some op is a near-unanimity op.

    With a d-ary NU op, a subuniverse of A^N is determined by its (d-1)-ary projections,
    so it suffices to close every projection to d-1 coordinates. Returns None if no NU op.
    """
    nus = [f for f in ops if is_near_unanimity(f)]
    if not nus:
        return None
    d = min(f.arity for f in nus)
    seeds = [tuple(s) for s in seeds]
    N = len(seeds[0])
    width = min(d - 1, N)
    for coords in itertools.combinations(range(N), width):
        proj = {tuple(s[c] for c in coords) for s in seeds}
        got = term_closure(ops, sorted(proj), size=size, budget=budget)
        if len(got) < size ** width:
            return False
    return True
