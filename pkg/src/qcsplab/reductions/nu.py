"""Near-unanimity polymorphisms for finite reducts of the sigma language."""
from __future__ import annotations

from collections import Counter as Tally
from dataclasses import dataclass

from ..budget import Budget, BudgetExceeded, InputError
from ..core.ops import preserves
from ..core.structures import Operation
from .gadgets import ALPHA, BETA, _pair, block_relation


@dataclass(frozen=True)
class NUReport:
    operation: Operation
    a: int
    preserved: dict                  # i -> bool
    witnesses: dict                  # i -> columns mapped outside sigma_i

    @property
    def ok(self) -> bool:
        return all(self.preserved.values())

    def to_json(self) -> dict:
        return {"arity": self.operation.arity, "a": self.a, "ok": self.ok,
                "sigma": {str(i): {"preserved": v,
                                   "witness": [list(t) for t in self.witnesses[i]]
                                   if self.witnesses.get(i) else None}
                          for i, v in self.preserved.items()}}


def near_unanimity_for_reduct(m: int, alpha=ALPHA, beta=BETA, a: int | None = None,
                              size: int = 3, check_a: bool = True,
                              budget: Budget | None = None) -> NUReport:
    """(3m+1)-ary NU: near-unanimous inputs give the majority value, everything else a.

    ``check_a=False`` lets a lie outside alpha n beta, for guard tests.
    """
    budget = budget or Budget()
    alpha, beta = _pair(alpha, beta, size)
    common = sorted(alpha & beta)
    if m < 1:
        raise InputError("m must be positive")
    if a is None:
        if not common:
            raise InputError("alpha and beta are disjoint")
        a = common[0]
    elif check_a and a not in common:
        raise InputError(f"{a} is not in alpha n beta")
    k = 3 * m + 1
    if size ** k > budget.enum_tables:
        raise BudgetExceeded("near-unanimity table", budget.enum_tables, size ** k)

    def fn(*xs):
        v, c = Tally(xs).most_common(1)[0]
        return v if c >= k - 1 else a

    f = Operation.from_function(size, k, fn)
    preserved, witnesses = {}, {}
    for i in range(1, m + 1):
        ok, w = preserves(f, block_relation(alpha, beta, i, 2, size), witness=True)
        preserved[i] = ok
        witnesses[i] = w
    return NUReport(f, a, preserved, witnesses)
