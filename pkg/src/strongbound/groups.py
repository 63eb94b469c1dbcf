"""Factor groups: finite groups given by a Cayley table, and the infinite cyclic group.

Finite groups carry opaque element names and a full multiplication table.
The infinite cyclic group uses integer exponents with addition.
"""

from __future__ import annotations

import itertools
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

FINITE = "finite-table"
INFINITE_CYCLIC = "infinite-cyclic"


class GroupError(ValueError):
    """Raised when a table fails the group axioms or an element is unknown."""


class FactorGroup:
    """A group usable as a free factor.

    Build one with :meth:`from_table` or :meth:`infinite_cyclic`; the bare
    constructor does no validation.
    """

    def __init__(self, name: str, kind: str, elements: Sequence[Hashable] = (),
                 identity: Hashable = 0, table: Mapping | None = None):
        self.name = name
        self.kind = kind
        self.elements = tuple(elements)
        self.identity = identity
        self._table = dict(table) if table is not None else None
        self._inverse: dict = {}
        if kind == FINITE:
            self._index = {x: i for i, x in enumerate(self.elements)}
            for x in self.elements:
                for y in self.elements:
                    if self._table[x, y] == identity:
                        self._inverse[x] = y
                        break

    @classmethod
    def infinite_cyclic(cls, name: str = "c") -> "FactorGroup":
        return cls(name, INFINITE_CYCLIC)

    @classmethod
    def from_table(cls, name: str, elements: Sequence[Hashable], identity: Hashable,
                   rows: Sequence[Sequence[Hashable]] | Mapping, validate: bool = True) -> "FactorGroup":
        """Build a finite group; ``rows[i][j]`` is ``elements[i] * elements[j]``."""
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise GroupError(f"{name}: duplicate element names")
        if identity not in elements:
            raise GroupError(f"{name}: identity {identity!r} is not an element")
        if isinstance(rows, Mapping):
            table = dict(rows)
        else:
            if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
                raise GroupError(f"{name}: table must be {len(elements)}x{len(elements)}")
            table = {(x, y): rows[i][j] for i, x in enumerate(elements) for j, y in enumerate(elements)}
        group = cls(name, FINITE, elements, identity, table)
        if validate:
            validate_group(group)
        return group

    @property
    def is_finite(self) -> bool:
        return self.kind == FINITE

    @property
    def order(self) -> int | None:
        return len(self.elements) if self.is_finite else None

    def contains(self, x) -> bool:
        if self.is_finite:
            return x in self._index
        return isinstance(x, int) and not isinstance(x, bool)

    def is_identity(self, x) -> bool:
        return x == self.identity

    def mul(self, x, y):
        if self.is_finite:
            return self._table[x, y]
        return x + y

    def inv(self, x):
        if self.is_finite:
            return self._inverse[x]
        return -x

    def power(self, x, n: int):
        if not self.is_finite:
            return x * n
        if n < 0:
            x, n = self.inv(x), -n
        out = self.identity
        for _ in range(n):
            out = self.mul(out, x)
        return out

    def nontrivial(self) -> tuple:
        """Nontrivial elements in table order (finite groups only)."""
        if not self.is_finite:
            raise GroupError(f"{self.name} is infinite")
        return tuple(x for x in self.elements if x != self.identity)

    def index_table(self) -> np.ndarray:
        idx = self._index
        n = len(self.elements)
        out = np.empty((n, n), dtype=np.int64)
        for (x, y), z in self._table.items():
            out[idx[x], idx[y]] = idx[z]
        return out

    def __repr__(self):
        if self.is_finite:
            return f"FactorGroup({self.name!r}, order={len(self.elements)})"
        return f"FactorGroup({self.name!r}, infinite cyclic)"


FiniteGroup = FactorGroup


def validate_group(group: FactorGroup, max_order: int = 400) -> None:
    """Exhaustively check closure, identity, inverses and associativity.

    Raises GroupError with a witness on the first failure.
    """
    if not group.is_finite:
        return
    elems = group.elements
    n = len(elems)
    if n > max_order:
        raise GroupError(f"{group.name}: order {n} exceeds exhaustive validation limit {max_order}")
    idx = {x: i for i, x in enumerate(elems)}
    table = group._table
    for x in elems:
        for y in elems:
            if (x, y) not in table:
                raise GroupError(f"{group.name}: missing product {x!r}*{y!r}")
            if table[x, y] not in idx:
                raise GroupError(f"{group.name}: {x!r}*{y!r} = {table[x, y]!r} is not an element")
    e = group.identity
    for x in elems:
        if table[e, x] != x or table[x, e] != x:
            raise GroupError(f"{group.name}: {e!r} is not a two-sided identity at {x!r}")
        if not any(table[x, y] == e and table[y, x] == e for y in elems):
            raise GroupError(f"{group.name}: {x!r} has no two-sided inverse")
    t = group.index_table()
    left = t[t]  # left[a, b, c] = (ab)c
    right = t[np.arange(n)[:, None, None], t[None, :, :]]  # a(bc)
    bad = np.argwhere(left != right)
    if len(bad):
        a, b, c = (elems[i] for i in bad[0])
        raise GroupError(f"{group.name}: associativity fails at ({a!r}, {b!r}, {c!r})")


# -- standard small groups ---------------------------------------------------

def cyclic_group(n: int, name: str | None = None, gen: str = "a") -> FactorGroup:
    """Z/n with elements e, a, a2, ..., a{n-1}."""
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    names = ["e"] + [gen if i == 1 else f"{gen}{i}" for i in range(1, n)]
    rows = [[names[(i + j) % n] for j in range(n)] for i in range(n)]
    return FactorGroup.from_table(name or f"Z{n}", names, "e", rows)


def _cycle_name(perm: tuple[int, ...]) -> str:
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        j = perm[start]
        while j != start:
            cycle.append(j)
            seen.add(j)
            j = perm[j]
        parts.append("(" + "".join(str(i + 1) for i in cycle) + ")")
    return "".join(parts) or "e"


def permutation_group(perms: Iterable[tuple[int, ...]], name: str) -> FactorGroup:
    """Group on the given (closed) set of permutations; composition is (pq)(i) = p(q(i))."""
    perms = sorted(set(perms), key=lambda p: (_cycle_name(p) != "e", len(_cycle_name(p)), p))
    names = [_cycle_name(p) for p in perms]
    lookup = {p: nm for p, nm in zip(perms, names)}
    rows = [[lookup[tuple(p[q[i]] for i in range(len(q)))] for q in perms] for p in perms]
    return FactorGroup.from_table(name, names, "e", rows)


def symmetric_group(n: int) -> FactorGroup:
    return permutation_group(itertools.permutations(range(n)), f"S{n}")


def _is_even(p: tuple[int, ...]) -> bool:
    inversions = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return inversions % 2 == 0


def alternating_group(n: int) -> FactorGroup:
    return permutation_group((p for p in itertools.permutations(range(n)) if _is_even(p)), f"A{n}")


# -- group files -------------------------------------------------------------
#
#   name: S3
#   elements: e (12) (13) ...
#   identity: e
#   <one table row per line, whitespace separated>

def parse_group(text: str) -> FactorGroup:
    header: dict[str, str] = {}
    rows: list[list[str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if sep and key.strip() in ("name", "elements", "identity") and not rows:
            header[key.strip()] = value.strip()
        else:
            rows.append(line.split())
    for key in ("name", "elements", "identity"):
        if key not in header:
            raise GroupError(f"group file is missing '{key}:'")
    return FactorGroup.from_table(header["name"], header["elements"].split(), header["identity"], rows)


def load_group(path: str | Path) -> FactorGroup:
    return parse_group(Path(path).read_text())


def format_group(group: FactorGroup) -> str:
    lines = [f"name: {group.name}", "elements: " + " ".join(map(str, group.elements)),
             f"identity: {group.identity}"]
    for x in group.elements:
        lines.append(" ".join(str(group.mul(x, y)) for y in group.elements))
    return "\n".join(lines) + "\n"
