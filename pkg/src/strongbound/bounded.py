"""The word-growth operator on finite groups and groups of measurable functions.

For a subset Z of a group, Gamma(Z) = Z, 1, inverses of Z and products of two
members of Z. Iterating from any seed reaches the generated subgroup; the
chain length bounds how many doublings a word needs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .filtration import FiniteSetAlgebra
from .groups import FactorGroup, GroupError


def gamma(Z: Iterable, G: FactorGroup) -> frozenset:
    Z = frozenset(Z)
    for x in Z:
        if not G.contains(x):
            raise GroupError(f"{x!r} is not an element of {G.name}")
    out = set(Z)
    out.add(G.identity)
    out.update(G.inv(x) for x in Z)
    out.update(G.mul(x, y) for x in Z for y in Z)
    return frozenset(out)


@dataclass(frozen=True)
class GammaChain:
    levels: tuple          # Z_0, Z_1, ..., Z_s with Gamma(Z_s) = Z_s
    stabilized_at: int     # s, the first index that is a fixpoint

    @property
    def limit(self) -> frozenset:
        return self.levels[-1]


def gamma_chain(G: FactorGroup, Z0: Iterable, max_steps: int = 10_000) -> GammaChain:
    levels = [frozenset(Z0)]
    while True:
        nxt = gamma(levels[-1], G)
        if nxt == levels[-1]:
            return GammaChain(tuple(levels), len(levels) - 1)
        if len(levels) > max_steps:
            raise RuntimeError(f"no fixpoint within {max_steps} steps")
        levels.append(nxt)


class MeasurableLimitError(RuntimeError):
    pass


def measurable_function_group(X: Iterable, algebra: FiniteSetAlgebra, H: FactorGroup,
                              max_order: int = 1024) -> FactorGroup:
    """Functions X -> H whose fibres lie in the algebra, under pointwise product.

    Such a function is constant on each atom, so the group is H to the power
    of the number of atoms. An element is named by its values at the points
    of X (in sorted order), joined by commas.
    """
    points = tuple(sorted(set(X), key=repr))
    if frozenset(points) != algebra.top:
        raise GroupError("the algebra is not an algebra of subsets of X")
    if not H.is_finite:
        raise GroupError("H must be finite")
    atoms = algebra.atoms()
    size = H.order ** len(atoms)
    if size > max_order:
        raise MeasurableLimitError(
            f"group has order {H.order}^{len(atoms)} = {size}, above the limit {max_order}")
    where = {p: i for i, atom in enumerate(atoms) for p in atom}
    funcs = [tuple(values[where[p]] for p in points)
             for values in itertools.product(H.elements, repeat=len(atoms))]
    name = {f: ",".join(map(str, f)) for f in funcs}
    table = {(name[f], name[g]): name[tuple(H.mul(a, b) for a, b in zip(f, g))]
             for f in funcs for g in funcs}
    identity = name[tuple(H.identity for _ in points)]
    return FactorGroup.from_table(f"{H.name}^{len(atoms)}", [name[f] for f in funcs], identity, table,
                                  validate=size <= 400)


def is_measurable(values: dict, algebra: FiniteSetAlgebra) -> bool:
    """True iff every fibre of the function ``values`` lies in the algebra."""
    fibres: dict = {}
    for p, v in values.items():
        fibres.setdefault(v, set()).add(p)
    return all(frozenset(s) in algebra.members for s in fibres.values())
