"""Resource caps shared by every search in the package."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class InputError(ValueError):
    """Malformed input or a violated precondition."""


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, limit: int, needed: int | None = None):
        self.what = what
        self.limit = limit
        self.needed = needed
        msg = f"budget exceeded: {what} (limit {limit}"
        if needed is not None:
            msg += f", needed {needed}"
        super().__init__(msg + ")")


@dataclass(frozen=True)
class Budget:
    enum_tables: int = 2 ** 24       # candidate tables n^(n^k) for polymorphism enumeration
    search_nodes: int = 10 ** 7      # alternating-search and CSP nodes
    product_atoms: int = 5 * 10 ** 5  # atoms in a canonical sentence
    materialize: int = 10 ** 7       # tuples scanned when materializing
    closure_work: int = 5 * 10 ** 7  # coordinate evaluations during term closure
    clone_members: int = 20000       # members kept by a clone enumeration
    exact_generating: int = 81       # |A|^m bound for exact minimal generating sets

    def as_dict(self) -> dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_overrides(self, text: str) -> "Budget":
        """Parse ``key=value,key=value`` (a bare integer sets search_nodes)."""
        text = text.strip()
        if not text:
            return self
        if text.isdigit():
            return replace(self, search_nodes=int(text))
        names = {f.name for f in fields(self)}
        changes = {}
        for part in text.split(","):
            key, _, val = part.partition("=")
            key = key.strip()
            if key not in names or not val.strip().isdigit():
                raise InputError(f"bad budget override {part!r}")
            changes[key] = int(val)
        return replace(self, **changes)


def default_budget() -> Budget:
    return Budget().with_overrides(os.environ.get("QCSP_BUDGET", ""))


class Counter:
    """Mutable node counter checked against a cap."""

    __slots__ = ("limit", "count", "what")

    def __init__(self, limit: int, what: str = "search nodes"):
        self.limit = limit
        self.count = 0
        self.what = what

    def tick(self, k: int = 1) -> None:
        self.count += k
        if self.count > self.limit:
            raise BudgetExceeded(self.what, self.limit)
