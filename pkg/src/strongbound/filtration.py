"""Algebras of sets, R-filtrations and their level functions, dominating functions
for towers of finite sets, and extraction of disjoint sequences with strictly
increasing level.

Two kinds of algebra are supported: explicit finite algebras of subsets of a
finite set, and the finite/cofinite algebra on the natural numbers, whose
elements are stored as a finite bitmask plus a cofinite flag.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Sequence


class AlgebraError(ValueError):
    pass


class FiltrationError(RuntimeError):
    pass


class SearchLimitError(FiltrationError):
    """A bounded search ran out of candidates; the bound, not the logic, is at fault."""


class RuleError(ValueError):
    pass


# -- finite algebras -------------------------------------------------------------

class FiniteSetAlgebra:
    """An algebra of subsets of a finite set, validated on construction."""

    def __init__(self, points: Iterable[Hashable], members: Iterable[Iterable[Hashable]]):
        self.points = tuple(sorted(set(points), key=repr))
        self.top = frozenset(self.points)
        self.bottom = frozenset()
        self.members = frozenset(frozenset(m) for m in members)
        self._validate()

    def _validate(self):
        if self.top not in self.members:
            raise AlgebraError("algebra must contain the whole set")
        for m in self.members:
            if not m <= self.top:
                raise AlgebraError(f"{sorted(m, key=repr)} is not a subset of the carrier")
            if self.top - m not in self.members:
                raise AlgebraError(f"not closed under complement at {sorted(m, key=repr)}")
        for a in self.members:
            for b in self.members:
                if a & b not in self.members:
                    raise AlgebraError(
                        f"not closed under intersection at {sorted(a, key=repr)}, {sorted(b, key=repr)}")

    @classmethod
    def powerset(cls, points):
        points = list(points)
        subsets = itertools.chain.from_iterable(itertools.combinations(points, r) for r in range(len(points) + 1))
        return cls(points, subsets)

    @classmethod
    def trivial(cls, points):
        points = list(points)
        return cls(points, [(), points])

    @classmethod
    def from_partition(cls, points, blocks):
        blocks = [frozenset(b) for b in blocks]
        members = [frozenset().union(*combo) for r in range(len(blocks) + 1)
                   for combo in itertools.combinations(blocks, r)]
        return cls(points, members)

    @classmethod
    def generated(cls, points, sets):
        """The subalgebra generated by ``sets`` (via atoms of the partition they induce)."""
        points = list(points)
        sets = [frozenset(s) for s in sets]
        atoms: dict[tuple, set] = {}
        for p in points:
            atoms.setdefault(tuple(p in s for s in sets), set()).add(p)
        return cls.from_partition(points, atoms.values())

    def __contains__(self, x):
        return frozenset(x) in self.members

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members, key=lambda m: (len(m), sorted(map(repr, m)))))

    def atoms(self) -> list[frozenset]:
        nonempty = [m for m in self.members if m]
        return sorted((m for m in nonempty if not any(o < m for o in nonempty)),
                      key=lambda m: sorted(map(repr, m)))

    def meet(self, x, y):
        return x & y

    def join(self, x, y):
        return x | y

    def complement(self, x):
        return self.top - x

    def diff(self, x, y):
        return x - y

    def is_finite(self) -> bool:
        return True


# -- the finite/cofinite algebra on the natural numbers -----------------------------

@dataclass(frozen=True, order=True)
class FinCof:
    """A finite set (cofinite=False) or the complement of one (cofinite=True)."""

    mask: int
    cofinite: bool = False

    @classmethod
    def finite(cls, elements: Iterable[int]) -> "FinCof":
        mask = 0
        for i in elements:
            if i < 0:
                raise AlgebraError("elements must be natural numbers")
            mask |= 1 << i
        return cls(mask, False)

    @classmethod
    def cofinite_from(cls, missing: Iterable[int]) -> "FinCof":
        return cls(cls.finite(missing).mask, True)

    def support(self) -> list[int]:
        return [i for i in range(self.mask.bit_length()) if self.mask >> i & 1]

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1) != self.cofinite

    def elements(self) -> Iterator[int]:
        """Members in increasing order (infinite when cofinite)."""
        if not self.cofinite:
            yield from self.support()
            return
        for i in itertools.count():
            if not self.mask >> i & 1:
                yield i

    def __repr__(self):
        s = "{" + ",".join(map(str, self.support())) + "}"
        return f"N-{s}" if self.cofinite else s


class FiniteCofiniteAlgebra:
    """The algebra of finite and cofinite subsets of the natural numbers."""

    top = FinCof(0, True)
    bottom = FinCof(0, False)

    def __contains__(self, x):
        return isinstance(x, FinCof)

    def complement(self, x: FinCof) -> FinCof:
        return FinCof(x.mask, not x.cofinite)

    def meet(self, x: FinCof, y: FinCof) -> FinCof:
        if not x.cofinite and not y.cofinite:
            return FinCof(x.mask & y.mask, False)
        if x.cofinite and y.cofinite:
            return FinCof(x.mask | y.mask, True)
        fin, cof = (x, y) if not x.cofinite else (y, x)
        return FinCof(fin.mask & ~cof.mask, False)

    def join(self, x: FinCof, y: FinCof) -> FinCof:
        return self.complement(self.meet(self.complement(x), self.complement(y)))

    def diff(self, x: FinCof, y: FinCof) -> FinCof:
        return self.meet(x, self.complement(y))

    def members_with_support(self, bound: int) -> Iterator[FinCof]:
        """Every member whose finite part lies in {0, ..., bound}."""
        for mask in range(1 << (bound + 1)):
            yield FinCof(mask, False)
            yield FinCof(mask, True)

    def le(self, x: FinCof, y: FinCof) -> bool:
        return self.diff(x, y) == self.bottom

    def is_finite(self) -> bool:
        return False


# -- the R-operator ------------------------------------------------------------------

def r_closure(Z: Iterable, algebra) -> frozenset:
    """Z together with 0, 1, complements, joins, meets and differences of members of Z."""
    Z = list(dict.fromkeys(Z))
    for x in Z:
        if x not in algebra:
            raise AlgebraError(f"{x!r} is not a member of the algebra")
    out = set(Z) | {algebra.bottom, algebra.top}
    out.update(algebra.complement(x) for x in Z)
    for x in Z:
        for y in Z:
            out.add(algebra.join(x, y))
            out.add(algebra.meet(x, y))
            out.add(algebra.diff(x, y))
    return frozenset(out)


# -- filtrations -------------------------------------------------------------------

class Filtration:
    """A sequence of levels Z_0, Z_1, ... given by a membership rule.

    ``member(n, x)`` decides x in Z_n; ``level(n)`` enumerates Z_n when the
    levels are finite. The induced level function is f(x) = min{n : x in Z_n}.
    """

    def __init__(self, member: Callable[[int, object], bool], level: Callable[[int], Iterable],
                 name: str = "filtration", f_bound: int = 10_000, level_f: Callable | None = None):
        self.member = member
        self._level = level
        self.name = name
        self.f_bound = f_bound
        self._level_f = level_f
        self._f_cache: dict = {}

    def level(self, n: int) -> frozenset:
        return frozenset(self._level(n))

    def induced_f(self, x) -> int:
        if x in self._f_cache:
            return self._f_cache[x]
        if self._level_f is not None:
            v = self._level_f(x)
        else:
            v = next((n for n in range(self.f_bound + 1) if self.member(n, x)), None)
            if v is None:
                raise FiltrationError(f"{x!r} is in no level up to {self.f_bound}")
        self._f_cache[x] = v
        return v

    @classmethod
    def from_levels(cls, levels: Sequence[Iterable], name: str = "explicit") -> "Filtration":
        """Finitely many levels; the sequence is constant after the last one."""
        frozen = [frozenset(z) for z in levels]
        if not frozen:
            raise FiltrationError("at least one level is required")

        def level(n):
            return frozen[min(n, len(frozen) - 1)]

        return cls(lambda n, x: x in level(n), level, name=name, f_bound=len(frozen))


def _max_support(x: FinCof) -> int:
    return x.mask.bit_length() - 1 if x.mask else 0


def support_filtration(algebra: FiniteCofiniteAlgebra | None = None) -> Filtration:
    """Z_n = {A : A or its complement is a subset of {0, ..., n}}."""
    algebra = algebra or FiniteCofiniteAlgebra()

    def member(n, x):
        return x.mask >> (n + 1) == 0

    def level(n):
        return algebra.members_with_support(n)

    return Filtration(member, level, name="support-filtration", level_f=_max_support)


@dataclass
class FiltrationCheck:
    valid: bool
    clause: str | None = None  # "proper", "r-step" or "exhaustion"
    n: int | None = None
    witness: tuple = ()
    levels_checked: int = 0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        if self.valid:
            return f"valid through level {self.levels_checked}"
        return f"violation of {self.clause} at n={self.n}: {self.witness}"


def check_proper_filtration(filt: Filtration, algebra, depth: int | None = None,
                            pair_limit: int = 300_000, samples: int = 20_000,
                            seed: int = 0) -> FiltrationCheck:
    """Check proper growth, the R-step, and exhaustion for levels 0..depth.

    For a finite algebra the default depth is |A|, and a violation is then
    forced: a strictly increasing chain of subsets of A has at most |A| + 1
    terms. For the countable instance the R-step is checked on all pairs while
    |Z_n|^2 <= pair_limit and on ``samples`` seeded random pairs above that;
    exhaustion is certified by the structural rule that every member whose
    finite part lies in {0..s} is in Z_s.
    """
    rng = random.Random(seed)
    finite = algebra.is_finite()
    if depth is None:
        if not finite:
            raise FiltrationError("depth is required for an infinite algebra")
        depth = len(algebra)
    result = FiltrationCheck(True)
    for n in range(depth + 1):
        zn = filt.level(n)
        zn1 = filt.level(n + 1)
        for x in zn:
            if x not in algebra:
                return FiltrationCheck(False, "membership", n, (x,), n)
        missing = [x for x in zn if x not in zn1]
        if missing:
            return FiltrationCheck(False, "proper", n, ("not included", missing[0]), n)
        if len(zn1) == len(zn):
            return FiltrationCheck(False, "proper", n, ("Z_n = Z_{n+1}", len(zn)), n,
                                   notes=[f"|A| = {len(algebra)}"] if finite else [])
        members = sorted(zn, key=repr)
        if not filt.member(n + 1, algebra.bottom) or not filt.member(n + 1, algebra.top):
            return FiltrationCheck(False, "r-step", n, ("0 or 1 missing from Z_{n+1}",), n)
        if len(members) ** 2 <= pair_limit:
            pairs = itertools.product(members, repeat=2)
        else:
            pairs = ((rng.choice(members), rng.choice(members)) for _ in range(samples))
            result.notes.append(f"level {n}: R-step sampled on {samples} pairs")
        for x in members:
            y = algebra.complement(x)
            if not filt.member(n + 1, y):
                return FiltrationCheck(False, "r-step", n, ("complement", x, y), n)
        for x, y in pairs:
            for op in ("join", "meet", "diff"):
                z = getattr(algebra, op)(x, y)
                if not filt.member(n + 1, z):
                    return FiltrationCheck(False, "r-step", n, (op, x, y, z), n)
        result.levels_checked = n
    if finite:
        union = frozenset().union(*(filt.level(n) for n in range(depth + 1)))
        if union != algebra.members:
            return FiltrationCheck(False, "exhaustion", depth, tuple(algebra.members - union)[:1], depth)
    else:
        for x in algebra.members_with_support(min(depth + 2, 14)):
            s = _max_support(x)
            if not filt.member(s, x):
                return FiltrationCheck(False, "exhaustion", s, (x,), depth)
        result.notes.append(f"exhaustion: every member with support in [0, {min(depth + 2, 14)}] "
                            f"lies in the level of its largest support point")
    return result


def prove_no_proper_filtration(algebra: FiniteSetAlgebra, filt: Filtration) -> FiltrationCheck:
    """On a finite algebra every candidate filtration must fail; return its violation."""
    check = check_proper_filtration(filt, algebra, depth=len(algebra))
    if check.valid:
        raise FiltrationError("a finite algebra cannot carry a proper R-filtration; checker bug")
    return check


def greedy_filtration(algebra: FiniteSetAlgebra) -> Filtration:
    """Z_0 = {}, Z_{n+1} = R(Z_n) plus one new member while any remain."""
    levels = [frozenset()]
    while True:
        nxt = set(r_closure(levels[-1], algebra))
        rest = sorted(algebra.members - nxt, key=lambda m: (len(m), sorted(map(repr, m))))
        if rest:
            nxt.add(rest[0])
        if frozenset(nxt) == levels[-1]:
            break
        levels.append(frozenset(nxt))
    return Filtration.from_levels(levels, name="greedy")


# -- towers and dominating functions -------------------------------------------------

class ChTower:
    """A sequence of finite sets T_n with |T_n| <= n + 1, given by a rule."""

    def __init__(self, rule: Callable[[int], Iterable[int]], name: str = "tower",
                 max_index: int | None = None):
        self.rule = rule
        self.name = name
        self.max_index = max_index
        self.demand = 0

    def __getitem__(self, n: int) -> frozenset:
        self.demand = max(self.demand, n)
        if self.max_index is not None and n > self.max_index:
            raise FiltrationError(f"tower {self.name} is defined up to {self.max_index}; index {n} requested")
        t = frozenset(self.rule(n))
        if len(t) > n + 1:
            raise FiltrationError(f"|T_{n}| = {len(t)} exceeds {n + 1}")
        if not t:
            raise FiltrationError(f"T_{n} is empty")
        return t


def interval_tower(**_) -> ChTower:
    return ChTower(lambda n: range(n + 1), name="interval-tower")


def constant_tower(value: int = 0, **_) -> ChTower:
    return ChTower(lambda n: (value,), name="constant-tower")


TOWERS = {"interval-tower": interval_tower, "constant-tower": constant_tower}


def dominating_g(T: ChTower, depth: int) -> list[int]:
    """g(0) = max T_0 + 1; g(n+1) = max(T_{g(n)+2} plus {g(n)}) + 1."""
    g = [max(T[0]) + 1]
    while len(g) <= depth:
        prev = g[-1]
        g.append(max(T[prev + 2] | {prev}) + 1)
    return g


def increasing_selections(T: ChTower, depth: int) -> Iterator[tuple[int, ...]]:
    """Every strictly increasing (f(0), ..., f(depth)) with f(n) in T_n."""
    levels = [sorted(T[n]) for n in range(depth + 1)]

    def extend(prefix):
        n = len(prefix)
        if n > depth:
            yield tuple(prefix)
            return
        for v in levels[n]:
            if not prefix or v > prefix[-1]:
                prefix.append(v)
                yield from extend(prefix)
                prefix.pop()

    yield from extend([])


@dataclass
class DominationCheck:
    g: list
    selections: int
    failures: list

    @property
    def passed(self) -> bool:
        return not self.failures


def check_domination(T: ChTower, depth: int, g: list | None = None) -> DominationCheck:
    g = g if g is not None else dominating_g(T, depth)
    failures = []
    count = 0
    for f in increasing_selections(T, depth):
        count += 1
        for n in range(depth + 1):
            if not f[n] < g[n]:
                failures.append(("f(n) < g(n)", f, n))
        for n in range(depth):
            for m in range(depth - 1):
                if g[n] >= f[m] and not g[n + 1] > f[m + 2]:
                    failures.append(("g(n+1) > f(m+2)", f, n, m))
    for n in range(depth):
        if not g[n + 1] > g[n]:
            failures.append(("strictly increasing", n))
    for n in range(depth + 1):
        if not g[n] > n:
            failures.append(("g(n) > n", n))
    return DominationCheck(g, count, failures)


# -- disjoint sequences with increasing level ----------------------------------------

@dataclass
class AntichainStep:
    n: int
    a: FinCof
    c_next: FinCof
    a_prime: FinCof | None
    target: int | None
    rstep_ok: bool = True


@dataclass
class AntichainResult:
    sequence: list
    levels: list
    steps: list


def _finite_subsets_below(c: FinCof, support_bound: int, nonempty: bool = True) -> Iterator[FinCof]:
    """Finite subsets of c ordered by largest element, then size, then lexicographically."""
    if not nonempty:
        yield FinCof(0)
    below: list[int] = []
    for m in c.elements():
        if m > support_bound:
            return
        for r in range(len(below) + 1):
            for combo in itertools.combinations(below, r):
                yield FinCof.finite(combo + (m,))
        below.append(m)


def extract_antichain(algebra: FiniteCofiniteAlgebra, filt: Filtration, in_L: Callable[[FinCof], bool],
                      count: int, support_bound: int = 256, max_candidates: int = 100_000) -> AntichainResult:
    """Pairwise disjoint a_0, a_1, ... with strictly increasing level.

    ``in_L`` decides whether the level function is unbounded below an
    element. Choices are made by searching finite subsets in increasing
    support order and keeping the first that works.
    """
    if count < 1:
        return AntichainResult([], [], [])
    f = filt.induced_f
    c = algebra.top

    def search(pred, below, what):
        for tried, cand in enumerate(_finite_subsets_below(below, support_bound)):
            if tried >= max_candidates:
                break
            if pred(cand):
                return cand
        raise SearchLimitError(f"no valid {what} among finite subsets with support <= {support_bound} "
                              f"(candidate cap {max_candidates})")

    a0 = search(lambda a: in_L(algebra.diff(c, a)), c, "c_1")
    c = algebra.diff(c, a0)
    seq, steps = [a0], [AntichainStep(0, a0, c, None, None)]
    while len(seq) < count:
        n = len(seq) - 1
        target = max(f(seq[-1]), f(c)) + 2
        a_prime = search(lambda a: f(a) >= target, c, f"a'_{n + 1}")
        rest = algebra.diff(c, a_prime)
        rstep_ok = f(rest) + 1 >= f(a_prime) and f(rest) >= f(seq[-1]) + 1
        if in_L(rest):
            a_next, c_next = a_prime, rest
        elif in_L(a_prime):
            a_next, c_next = rest, a_prime
        else:
            raise FiltrationError(f"neither a' nor c - a' lies in L at step {n + 1}; oracle is inadequate")
        steps.append(AntichainStep(n + 1, a_next, c_next, a_prime, target, rstep_ok))
        seq.append(a_next)
        c = c_next
    return AntichainResult(seq, [f(a) for a in seq], steps)


def cofinite_oracle(x: FinCof) -> bool:
    """Membership in L for the support filtration: f is unbounded below x iff x is infinite."""
    return x.cofinite


# -- rule files -----------------------------------------------------------------------
#
#   rule: interval-tower
#   value: 0           (extra parameters, passed to the rule)

def parse_rule(text: str) -> tuple[str, dict]:
    params: dict[str, str] = {}
    name = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise RuleError(f"cannot parse rule line {raw!r}")
        if key.strip() == "rule":
            name = value.strip()
        else:
            params[key.strip()] = value.strip()
    if name is None:
        raise RuleError("rule file is missing 'rule:'")
    return name, params


def make_tower(name: str, params: dict | None = None) -> ChTower:
    if name not in TOWERS:
        raise RuleError(f"unknown tower rule {name!r}; known: {', '.join(sorted(TOWERS))}")
    try:
        params = {k: int(v) for k, v in (params or {}).items()}
    except ValueError as exc:
        raise RuleError(f"rule parameters must be integers: {exc}") from None
    return TOWERS[name](**params)
