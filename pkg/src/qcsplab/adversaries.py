"""Adversaries, adversary families and reactive composition."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .budget import Budget, BudgetExceeded, Counter, InputError
from .core.ops import closure, iter_closure, term_closure, term_operation
from .core.structures import Operation


@dataclass(frozen=True)
class Adversary:
    """A nonempty m-ary relation over {0..size-1}."""
    size: int
    length: int
    tuples: frozenset

    def __post_init__(self):
        ts = frozenset(tuple(t) for t in self.tuples)
        object.__setattr__(self, "tuples", ts)
        if not ts:
            raise InputError("an adversary must be nonempty")
        for t in ts:
            if len(t) != self.length or any(not 0 <= v < self.size for v in t):
                raise InputError(f"tuple {t} does not fit an adversary of length {self.length}")

    @classmethod
    def of(cls, size: int, tuples: Iterable[tuple]) -> "Adversary":
        ts = [tuple(t) for t in tuples]
        if not ts:
            raise InputError("an adversary must be nonempty")
        return cls(size, len(ts[0]), frozenset(ts))

    @classmethod
    def full(cls, size: int, m: int) -> "Adversary":
        return cls(size, m, frozenset(itertools.product(range(size), repeat=m)))

    @classmethod
    def rectangle(cls, size: int, sets: Sequence[Iterable[int]]) -> "Adversary":
        return cls(size, len(sets), frozenset(itertools.product(*[sorted(set(s)) for s in sets])))

    def __iter__(self):
        return iter(sorted(self.tuples))

    def __len__(self):
        return len(self.tuples)

    def projections(self) -> list[set]:
        return [{t[i] for t in self.tuples} for i in range(self.length)]

    def is_rectangular(self) -> bool:
        rect = 1
        for p in self.projections():
            rect *= len(p)
        return rect == len(self.tuples)


@dataclass(frozen=True)
class AdversarySet:
    size: int
    length: int
    members: tuple

    def __post_init__(self):
        for B in self.members:
            if B.length != self.length or B.size != self.size:
                raise InputError("adversaries in a set must share length and domain")

    @classmethod
    def of(cls, size: int, length: int, members: Iterable[Adversary]) -> "AdversarySet":
        uniq = []
        seen = set()
        for B in members:
            if B.tuples not in seen:
                seen.add(B.tuples)
                uniq.append(B)
        return cls(size, length, tuple(uniq))

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def all_tuples(self) -> list[tuple]:
        """Union of the members, sorted."""
        out = set()
        for B in self.members:
            out |= B.tuples
        return sorted(out)

    def union(self) -> "AdversarySet":
        return AdversarySet.of(self.size, self.length, [Adversary.of(self.size, self.all_tuples())])

    def singletons(self) -> "AdversarySet":
        return AdversarySet.of(self.size, self.length,
                               [Adversary.of(self.size, [t]) for t in self.all_tuples()])

    def width(self) -> int:
        return sum(len(B) for B in self.members)


def upsilon(m: int, p: int, B: Iterable[int], size: int) -> AdversarySet:
    """Members: p coordinates free over the domain, the rest fixed to one x in B."""
    if not 0 <= p <= m:
        raise InputError("need 0 <= p <= m")
    xs = sorted(set(B))
    if not xs or any(not 0 <= x < size for x in xs):
        raise InputError("source set must be a nonempty subset of the domain")
    members = []
    dom = range(size)
    for x in xs:
        for free in itertools.combinations(range(m), p):
            sets = [dom if i in free else (x,) for i in range(m)]
            members.append(Adversary.rectangle(size, sets))
    return AdversarySet.of(size, m, members)


def _switch_tuples(m: int, p: int, size: int) -> Iterator[tuple]:
    def rec(prefix, switches):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for a in range(size):
            s = switches + (1 if prefix and prefix[-1] != a else 0)
            if s <= p:
                prefix.append(a)
                yield from rec(prefix, s)
                prefix.pop()
    yield from rec([], 0)


def xi(m: int, p: int, size: int) -> AdversarySet:
    """The single adversary of tuples with at most p switches."""
    if m < 1 or p < 0:
        raise InputError("need m >= 1 and p >= 0")
    return AdversarySet.of(size, m, [Adversary.of(size, _switch_tuples(m, p, size))])


def switches(t: Sequence[int]) -> int:
    return sum(1 for i in range(1, len(t)) if t[i] != t[i - 1])


def is_degenerate(omega: AdversarySet) -> bool:
    """Some two positions agree in every tuple of every member."""
    tuples = omega.all_tuples()
    for i, j in itertools.combinations(range(omega.length), 2):
        if all(t[i] == t[j] for t in tuples):
            return True
    return False


def _projected(B: Adversary, n: int, m: int) -> Iterator[frozenset]:
    for choice in itertools.product(range(n), repeat=m):
        coords = [j * n + i for j, i in enumerate(choice)]
        yield frozenset(tuple(t[c] for c in coords) for t in B.tuples)


def is_projective_at(omega_nm: AdversarySet, omega_m: AdversarySet, n: int, m: int) -> bool:
    """Each member of omega_nm has one member of omega_m containing all its block projections.

    Coordinates of the nm-tuples are grouped in m consecutive blocks of size n.
    """
    if omega_nm.length != n * m or omega_m.length != m:
        raise InputError("adversary lengths do not match n*m and m")
    for B in omega_nm.members:
        projs = list(_projected(B, n, m))
        if not any(all(P <= A.tuples for P in projs) for A in omega_m.members):
            return False
    return True


def generates(omega: AdversarySet, ops: Sequence[Operation], m: int | None = None,
              budget: Budget | None = None) -> bool:
    m = omega.length if m is None else m
    seeds = omega.all_tuples()
    got = term_closure(ops, seeds, size=omega.size, budget=budget)
    return len(got) == omega.size ** m


def min_generating_size(ops: Sequence[Operation], m: int, size: int,
                        budget: Budget | None = None) -> tuple[int, bool]:
    """Smallest generating subset of A^m; returns (size, exact).

    Exact search by increasing cardinality when |A|^m <= budget.exact_generating,
    otherwise a greedy upper bound (flagged by exact=False).
    """
    budget = budget or Budget()
    universe = list(itertools.product(range(size), repeat=m))
    full = len(universe)

    def extend(closed: list, t: tuple) -> list:
        state: dict = {}
        for _ in iter_closure(ops, closed + [t], size, budget, state=state, closed_prefix=len(closed)):
            pass
        return state["elements"]

    if full <= budget.exact_generating:
        counter = Counter(budget.search_nodes)
        for k in range(1, full + 1):
            seen: set = set()

            def dfs(start, depth, closed):
                if len(closed) == full:
                    return True
                if depth == k:
                    return False
                key = frozenset(closed)
                if (key, depth) in seen:
                    return False
                seen.add((key, depth))
                members = set(closed)
                for idx in range(start, full):
                    t = universe[idx]
                    if t in members:
                        continue
                    counter.tick()
                    if dfs(idx + 1, depth + 1, extend(closed, t)):
                        return True
                return False

            if dfs(0, 0, []):
                return k, True
        return full, True
    chosen: list[tuple] = []
    closed: list = []
    while len(closed) < full:
        best, best_closed = None, None
        members = set(closed)
        for t in universe:
            if t in members:
                continue
            got = extend(closed, t)
            if best_closed is None or len(got) > len(best_closed):
                best, best_closed = t, got
        chosen.append(best)
        closed = best_closed
    return len(chosen), False


# ------------------------------------------------------------ reactive composition

@dataclass(frozen=True)
class ReactiveWitness:
    """f of arity k, the member of omega used at each coordinate, and the maps g[j][i].

    g[j][i] maps a history to a value: the key is (a_i,) when ``last_only`` is set and the
    full prefix (a_1..a_i) otherwise.
    """
    f: Operation
    sources: tuple
    g: tuple
    last_only: bool = True

    def lookup(self, j: int, i: int, prefix: tuple):
        key = prefix[-1:] if self.last_only else prefix
        return self.g[j][i].get(key)


@dataclass(frozen=True)
class ReactiveCheck:
    ok: bool
    locus: str | None = None

    def __bool__(self):
        return self.ok


def verify_reactive(target: Adversary, omega: AdversarySet, w: ReactiveWitness) -> ReactiveCheck:
    k = w.f.arity
    if len(w.sources) != k or len(w.g) != k:
        return ReactiveCheck(False, "witness arity mismatch")
    members = omega.members
    for t in sorted(target.tuples):
        rows = []
        for j in range(k):
            src = w.sources[j]
            if not 0 <= src < len(members):
                return ReactiveCheck(False, f"coordinate {j} has no source member")
            row = []
            for i in range(target.length):
                v = w.lookup(j, i, t[: i + 1])
                if v is None:
                    return ReactiveCheck(False, f"g[{j}][{i}] undefined at {t[: i + 1]}")
                row.append(v)
            row = tuple(row)
            if row not in members[src].tuples:
                return ReactiveCheck(False, f"row {row} of coordinate {j} not in member {src} for {t}")
            rows.append(row)
        for i in range(target.length):
            if w.f(*[r[i] for r in rows]) != t[i]:
                return ReactiveCheck(False, f"f does not recover position {i} of {t}")
    return ReactiveCheck(True)


def _prefix_sets(B: Adversary) -> list[set]:
    return [{t[:i] for t in B.tuples} for i in range(B.length + 1)]


def _solve_last_only(target, f, srcs, prefix_sets, counter):
    """Assign a column c(i,a) in f^{-1}(a) for each position i and value a."""
    k, m = f.arity, target.length
    pre = {}
    for args in f.inputs():
        pre.setdefault(f(*args), []).append(args)
    tuples = sorted(target.tuples)
    slots = [(i, a) for i in range(m) for a in sorted({t[i] for t in tuples})]
    choice: dict = {}

    def consistent(i):
        for t in tuples:
            for j in range(k):
                row = tuple(choice[(q, t[q])][j] for q in range(i + 1))
                if row not in prefix_sets[srcs[j]][i + 1]:
                    return False
        return True

    def rec(s):
        if s == len(slots):
            return True
        i, a = slots[s]
        last_of_position = s + 1 == len(slots) or slots[s + 1][0] != i
        for col in pre.get(a, ()):
            counter.tick()
            choice[(i, a)] = col
            if last_of_position and not consistent(i):
                continue
            if rec(s + 1):
                return True
        choice.pop((i, a), None)
        return False

    if not rec(0):
        return None
    g = tuple(tuple({(a,): choice[(i, a)][j] for (q, a) in slots if q == i} for i in range(m))
              for j in range(k))
    return g


def _solve_history(target, f, srcs, prefix_sets, counter):
    """Same search with g depending on the full history; solved branch by branch on the trie."""
    k, m = f.arity, target.length
    pre = {}
    for args in f.inputs():
        pre.setdefault(f(*args), []).append(args)
    children: dict[tuple, list] = {}
    for t in target.tuples:
        for i in range(m):
            children.setdefault(t[:i], set()).add(t[i])
    g = [[{} for _ in range(m)] for _ in range(k)]

    def feasible(prefix, rows):
        i = len(prefix)
        if i == m:
            return True
        for a in sorted(children.get(prefix, ())):
            found = False
            for col in pre.get(a, ()):
                counter.tick()
                new_rows = tuple(r + (c,) for r, c in zip(rows, col))
                if all(new_rows[j] in prefix_sets[srcs[j]][i + 1] for j in range(k)) \
                        and feasible(prefix + (a,), new_rows):
                    for j in range(k):
                        g[j][i][prefix + (a,)] = col[j]
                    found = True
                    break
            if not found:
                return False
        return True

    if not feasible((), ((),) * k):
        return None
    return tuple(tuple(row) for row in g)


def clone_members(ops: Sequence[Operation], arity: int, size: int, budget: Budget | None = None):
    """Yield the arity-ary members of the clone generated by ops, projections first (BFS order)."""
    budget = budget or Budget()
    proj = [tuple(Operation.projection(size, arity, i).table) for i in range(arity)]
    for count, (vec, _) in enumerate(iter_closure(ops, proj, size, budget)):
        if count >= budget.clone_members:
            raise BudgetExceeded("clone members", budget.clone_members)
        yield Operation(size, arity, vec)


def find_reactive(target: Adversary, omega: AdversarySet, ops: Sequence[Operation],
                  arity_cap: int = 3, last_coordinate_only: bool = True,
                  budget: Budget | None = None) -> ReactiveWitness | None:
    """Search for f in the clone of ops (arity <= arity_cap) and maps g realizing target."""
    budget = budget or Budget()
    counter = Counter(budget.search_nodes)
    size = omega.size
    if target.length != omega.length:
        raise InputError("target and adversaries differ in length")
    if not omega.members:
        return None
    if len(target) == 1:
        w = witness_from_generation(next(iter(target.tuples)), omega, ops, budget)
        if w is not None and w.f.arity <= max(arity_cap, 1):
            return w
    prefix_sets = [_prefix_sets(B) for B in omega.members]
    solver = _solve_last_only if last_coordinate_only else _solve_history
    for k in range(1, arity_cap + 1):
        for f in clone_members(ops, k, size, budget):
            for srcs in itertools.product(range(len(omega.members)), repeat=k):
                g = solver(target, f, srcs, prefix_sets, counter)
                if g is not None:
                    return ReactiveWitness(f, tuple(srcs), g, last_coordinate_only)
    return None


def witness_from_generation(t: tuple, omega: AdversarySet, ops: Sequence[Operation],
                            budget: Budget | None = None) -> ReactiveWitness | None:
    """If t is generated from the union of omega, build f_t with constant (no-choice) maps."""
    seeds = omega.all_tuples()
    res = closure(ops, seeds, omega.size, stop_at=None, budget=budget, provenance=True)
    try:
        idx = res.elements.index(tuple(t))
    except ValueError:
        return None
    f, order = term_operation(res, idx, ops, omega.size)
    if f.arity == 0:
        return None
    rows = [res.elements[i] for i in order]
    srcs = []
    for r in rows:
        srcs.append(next(b for b, B in enumerate(omega.members) if r in B.tuples))
    g = tuple(tuple({(t[i],): r[i]} for i in range(len(t))) for r in rows)
    return ReactiveWitness(f, tuple(srcs), g, True)
