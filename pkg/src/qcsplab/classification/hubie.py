"""Hubie-pols: polymorphisms that stay surjective with any one argument pinned."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..adversaries import clone_members
from ..budget import Budget, BudgetExceeded, InputError
from ..core.ops import polymorphisms
from ..core.structures import Operation, Structure


def is_generalized_hubie_pol(f: Operation, z) -> bool:
    z = tuple(z)
    if len(z) != f.arity:
        raise InputError("z must have one entry per argument")
    n = f.size
    tab = f.array.reshape((n,) * f.arity)
    for i, zi in enumerate(z):
        if len(np.unique(np.take(tab, zi, axis=i))) < n:
            return False
    return True


def is_hubie_pol(f: Operation, x: int) -> bool:
    return is_generalized_hubie_pol(f, (x,) * f.arity)


@dataclass(frozen=True)
class HubieSearch:
    operation: Operation | None
    exhausted: bool            # True when absence is a real negative within the arity cap

    @property
    def found(self) -> bool:
        return self.operation is not None


def find_hubie_pol(source, x: int, arity_cap: int = 3, budget: Budget | None = None) -> HubieSearch:
    """Structure mode enumerates polymorphisms; algebra mode walks the clone of the given ops."""
    budget = budget or Budget()
    if not isinstance(source, Structure):
        for f in source:
            if is_hubie_pol(f, x):
                return HubieSearch(f, True)
    exhausted = True
    for k in range(1, arity_cap + 1):
        try:
            if isinstance(source, Structure):
                cands = polymorphisms(source, k, budget=budget)
            else:
                ops = list(source)
                if not ops:
                    raise InputError("need operations or a structure")
                cands = clone_members(ops, k, ops[0].size, budget)
            for f in cands:
                if is_hubie_pol(f, x):
                    return HubieSearch(f, True)
        except BudgetExceeded:
            exhausted = False
            break
    return HubieSearch(None, exhausted)
