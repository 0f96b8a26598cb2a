"""Backtracking search with generalized arc consistency over small domains.

Domains are bitmasks, so values must be small nonnegative integers.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from ..budget import Counter


def _bits(mask: int) -> list[int]:
    out, b = [], 0
    while mask:
        if mask & 1:
            out.append(b)
        mask >>= 1
        b += 1
    return out


class CSP:
    def __init__(self, domains: Sequence[int]):
        self.domains = list(domains)
        self.constraints: list[tuple[tuple[int, ...], list[tuple]]] = []
        self.var_cons: list[list[int]] = [[] for _ in self.domains]
        self.failed = False
        self._seen: dict = {}

    @property
    def num_vars(self) -> int:
        return len(self.domains)

    def add(self, scope: Sequence[int], tuples: Iterable[tuple]) -> None:
        """Constrain the variables in ``scope`` to one of ``tuples``.

        Repeated variables in the scope are allowed.
        """
        scope = tuple(scope)
        if len(set(scope)) < len(scope):
            first = {}
            for p, v in enumerate(scope):
                first.setdefault(v, p)
            keep = sorted(first.values())
            tuples = {tuple(t[p] for p in keep) for t in tuples
                      if all(t[p] == t[first[v]] for p, v in enumerate(scope))}
            scope = tuple(scope[p] for p in keep)
        if not scope:
            if not any(True for _ in tuples):
                self.failed = True
            return
        if len(scope) == 1:
            mask = 0
            for t in tuples:
                mask |= 1 << t[0]
            self.domains[scope[0]] &= mask
            if not self.domains[scope[0]]:
                self.failed = True
            return
        tlist = tuples if isinstance(tuples, list) else list(tuples)
        key = (scope, id(tuples)) if tlist is tuples else None
        if key is not None and key in self._seen:
            return
        ci = len(self.constraints)
        self.constraints.append((scope, tlist))
        if key is not None:
            self._seen[key] = ci
        for v in scope:
            self.var_cons[v].append(ci)

    def fix(self, var: int, value: int) -> None:
        self.domains[var] &= 1 << value
        if not self.domains[var]:
            self.failed = True

    def _propagate(self, dom: list[int], queue: Iterable[int]) -> bool:
        cons = self.constraints
        var_cons = self.var_cons
        pending = list(queue)
        inq = set(pending)
        while pending:
            ci = pending.pop()
            inq.discard(ci)
            scope, tuples = cons[ci]
            supp = [0] * len(scope)
            doms = [dom[v] for v in scope]
            for t in tuples:
                for p, d in enumerate(doms):
                    if not (d >> t[p]) & 1:
                        break
                else:
                    for p, val in enumerate(t):
                        supp[p] |= 1 << val
            for p, v in enumerate(scope):
                nd = dom[v] & supp[p]
                if nd != dom[v]:
                    if not nd:
                        return False
                    dom[v] = nd
                    for cj in var_cons[v]:
                        if cj != ci and cj not in inq:
                            inq.add(cj)
                            pending.append(cj)
        return True

    @staticmethod
    def _choose(dom: list[int]) -> int | None:
        best, best_size = None, None
        for v, d in enumerate(dom):
            if d & (d - 1):
                size = bin(d).count("1")
                if best is None or size < best_size:
                    best, best_size = v, size
                    if size == 2:
                        break
        return best

    def solutions(self, counter: Counter | None = None) -> Iterator[list[int]]:
        """Yield all solutions in a deterministic order."""
        if self.failed:
            return
        counter = counter or Counter(10 ** 7)
        root = list(self.domains)
        if any(d == 0 for d in root):
            return
        if not self._propagate(root, range(len(self.constraints))):
            return
        frames: list[list] = []
        cur = root
        while True:
            v = self._choose(cur)
            if v is None:
                yield [d.bit_length() - 1 for d in cur]
            else:
                frames.append([cur, v, _bits(cur[v]), 0])
            while frames:
                fr = frames[-1]
                base, var, vals, i = fr
                if i >= len(vals):
                    frames.pop()
                    continue
                fr[3] = i + 1
                counter.tick()
                nd = base.copy()
                nd[var] = 1 << vals[i]
                if self._propagate(nd, self.var_cons[var]):
                    cur = nd
                    break
            else:
                return

    def solve(self, counter: Counter | None = None) -> list[int] | None:
        for sol in self.solutions(counter):
            return sol
        return None


def full_mask(n: int) -> int:
    return (1 << n) - 1
