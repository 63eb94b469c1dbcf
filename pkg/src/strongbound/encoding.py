"""Extensions of a finite group G that realize an arbitrary function on tuples.

Given f on n-tuples of nontrivial elements of G, the quotient
H = (<c> * G) / N, with N the normal closure of the relators
``f(g)^-1 w(g, c)``, contains G, does not contain c, and satisfies
``w(g, c) = f(g)`` for every tuple g. Here

    u(x, y) = x0 y x1 y ... y x_{n-1}
    w(x, y) = y^k u y^(k-1) u ... y^2 u y u

All claims are checked mechanically: relator lengths, the C'(1/6) condition
with exact piece lengths, and the word identities via Dehn's algorithm.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping

from .groups import FactorGroup, load_group
from .small_cancellation import (
    Certificate,
    DehnSolver,
    PieceReport,
    SymmetrizedSet,
    Violation,
    check_cprime,
    enumerate_pieces,
    symmetrize,
)
from .words import (
    FreeProductContext,
    Letter,
    NormalForm,
    format_word,
    is_weakly_cyclically_reduced,
    normalize,
    weakly_cyclically_reduce,
)

C_FACTOR = 0
G_FACTOR = 1
DEFAULT_K = 32


class EncodingError(ValueError):
    def __init__(self, message: str, violation: Violation | None = None):
        super().__init__(message)
        self.violation = violation


@dataclass(frozen=True)
class EncodingSpec:
    G: FactorGroup
    n: int
    f: Mapping[tuple, object] = field(hash=False)
    k: int = DEFAULT_K

    def __post_init__(self):
        if not self.G.is_finite:
            raise EncodingError("G must be a finite group")
        if self.G.order < 2:
            raise EncodingError("G must be nontrivial: the tuple domain is empty")
        if self.n < 1:
            raise EncodingError("n must be at least 1")
        if self.k < 1:
            raise EncodingError("k must be at least 1")
        for g in self.tuples():
            if g not in self.f:
                raise EncodingError(f"f is undefined on {g}")
            if not self.G.contains(self.f[g]):
                raise EncodingError(f"f{g} = {self.f[g]!r} is not an element of {self.G.name}")

    def tuples(self):
        return itertools.product(self.G.nontrivial(), repeat=self.n)

    @classmethod
    def from_function(cls, G: FactorGroup, n: int, func: Callable[[tuple], object], k: int = DEFAULT_K):
        return cls(G, n, {g: func(g) for g in itertools.product(G.nontrivial(), repeat=n)}, k)


def extension_context(G: FactorGroup) -> FreeProductContext:
    return FreeProductContext((FactorGroup.infinite_cyclic("c"), G))


def _check_tuple(g: tuple, spec: EncodingSpec):
    if len(g) != spec.n:
        raise EncodingError(f"expected a {spec.n}-tuple, got {g}")
    for x in g:
        if not spec.G.contains(x) or x == spec.G.identity:
            raise EncodingError(f"tuple entries must be nontrivial elements of {spec.G.name}: {x!r}")


def build_u_word(g: tuple, spec: EncodingSpec, c_exponent: int = 1) -> tuple:
    _check_tuple(g, spec)
    letters = []
    for i, x in enumerate(g):
        if i:
            letters.append(Letter(C_FACTOR, c_exponent))
        letters.append(Letter(G_FACTOR, x))
    return tuple(letters)


def build_w_word(g: tuple, spec: EncodingSpec) -> NormalForm:
    u = build_u_word(g, spec)
    letters = []
    for m in range(spec.k, 0, -1):
        letters.append(Letter(C_FACTOR, m))
        letters.extend(u)
    return normalize(letters, extension_context(spec.G))


GENERIC = "generic"      # f(g) not in {1, g_{n-1}}: length 2nk + 1
REPLACED = "replaced"    # f(g) = g_{n-1}: length 2nk - 1
TRIVIAL = "trivial"      # f(g) = 1: length 2nk


def relator_case(g: tuple, spec: EncodingSpec) -> str:
    value = spec.f[g]
    if value == spec.G.identity:
        return TRIVIAL
    if value == g[-1]:
        return REPLACED
    return GENERIC


def expected_length(case: str, spec: EncodingSpec) -> int:
    base = 2 * spec.n * spec.k
    return {GENERIC: base + 1, REPLACED: base - 1, TRIVIAL: base}[case]


def build_relator(g: tuple, spec: EncodingSpec) -> NormalForm:
    ctx = extension_context(spec.G)
    w = build_w_word(g, spec)
    value = spec.f[g]
    if value == spec.G.identity:
        return w
    f_inv = Letter(G_FACTOR, spec.G.inv(value))
    if value == g[-1]:
        # f^-1 w would begin with the inverse of its last letter
        return weakly_cyclically_reduce(normalize(w.letters + (f_inv,), ctx), ctx)[0]
    return normalize((f_inv,) + w.letters, ctx)


def build_relators(spec: EncodingSpec) -> list[NormalForm]:
    return [build_relator(g, spec) for g in spec.tuples()]


@dataclass(frozen=True)
class ExtensionGroup:
    ctx: FreeProductContext = field(repr=False)
    relators: SymmetrizedSet = field(repr=False)
    spec: EncodingSpec
    gamma: tuple = field(repr=False)
    pieces: PieceReport = field(repr=False)

    @property
    def certificate(self) -> Certificate:
        return self.relators.certificate

    def solver(self, **kw) -> DehnSolver:
        return DehnSolver(self.relators, **kw)

    def c_letter(self, k: int = 1) -> Letter:
        return Letter(C_FACTOR, k)

    def g_letter(self, x) -> Letter:
        return Letter(G_FACTOR, x)


def build_extension(spec: EncodingSpec, eta=Fraction(1, 6)) -> ExtensionGroup:
    ctx = extension_context(spec.G)
    gamma = tuple(build_relators(spec))
    R = symmetrize(gamma, ctx)
    report = enumerate_pieces(R, ctx)
    result = check_cprime(R, eta, ctx, report=report)
    if isinstance(result, Violation):
        raise EncodingError(
            f"C'({result.eta}) fails, condition ({result.condition}): {result.detail}", violation=result)
    R = SymmetrizedSet(ctx=ctx, relators=R.relators, source=R.source, cyclic_words=R.cyclic_words,
                       duplicates=R.duplicates, certificate=result)
    return ExtensionGroup(ctx=ctx, relators=R, spec=spec, gamma=gamma, pieces=report)


@dataclass
class ClauseResult:
    clause: str
    description: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class ExtensionReport:
    clauses: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def lines(self) -> list[str]:
        out = []
        for c in self.clauses:
            status = "PASS" if c.passed else "FAIL"
            out.append(f"clause ({c.clause}): {status} {c.checks} checks - {c.description}")
            for w in c.failures[:5]:
                out.append(f"  failure: {w}")
        return out


def verify_extension(ext: ExtensionGroup) -> ExtensionReport:
    ctx, spec = ext.ctx, ext.spec
    G = spec.G
    solver = ext.solver()

    def show(letters):
        return format_word(normalize(letters, ctx), ctx) or "<empty>"

    a = ClauseResult("a", "g h^-1 is nontrivial in H for distinct g, h in G")
    for g, h in itertools.permutations(G.elements, 2):
        word = tuple(Letter(G_FACTOR, x) for x in (g, G.inv(h)) if x != G.identity)
        a.checks += 1
        if solver.is_identity(word):
            a.failures.append(show(word))

    b = ClauseResult("b", "c and c g^-1 are nontrivial in H for all g in G")
    for g in G.elements:
        word = (Letter(C_FACTOR, 1),)
        if g != G.identity:
            word += (Letter(G_FACTOR, G.inv(g)),)
        b.checks += 1
        if solver.is_identity(word):
            b.failures.append(show(word))

    c = ClauseResult("c", "f(g)^-1 w(g, c) is trivial in H for every tuple g")
    for t in spec.tuples():
        value = spec.f[t]
        word = build_w_word(t, spec).letters
        if value != G.identity:
            word = (Letter(G_FACTOR, G.inv(value)),) + word
        c.checks += 1
        if not solver.is_identity(word):
            c.failures.append(show(word))

    d = ClauseResult("d", "H is generated by G and c (generators of the free product)")
    d.checks = 1
    if [f.name for f in ctx.factors] != ["c", G.name]:
        d.failures.append("context factors are not <c>, G")
    return ExtensionReport([a, b, c, d])


@dataclass(frozen=True)
class GammaStepBound:
    word_length: int      # L(w) = 2nk free-product letters
    doubling_steps: int   # ceil(log2(2nk)) + 1


def gamma_step_bound(spec: EncodingSpec) -> GammaStepBound:
    j = 2 * spec.n * spec.k
    return GammaStepBound(j, math.ceil(math.log2(j)) + 1)


def relator_summary(spec: EncodingSpec, gamma=None) -> list[tuple]:
    """(tuple, case, expected length, actual length, weakly cyclically reduced?) per relator."""
    ctx = extension_context(spec.G)
    gamma = build_relators(spec) if gamma is None else gamma
    rows = []
    for t, r in zip(spec.tuples(), gamma):
        case = relator_case(t, spec)
        rows.append((t, case, expected_length(case, spec), len(r), is_weakly_cyclically_reduced(r, ctx)))
    return rows


# -- spec files ----------------------------------------------------------------
#
#   group: z3.grp        (path relative to the spec file)
#   n: 1
#   k: 32
#   a -> e
#   a2 -> e

def parse_spec(text: str, base: Path | None = None, group: FactorGroup | None = None) -> EncodingSpec:
    header: dict[str, str] = {}
    table: dict[tuple, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = line.split("->", 1)
            key = tuple(x.strip() for x in lhs.split(","))
            table[key] = rhs.strip()
        else:
            key, sep, value = line.partition(":")
            if not sep:
                raise EncodingError(f"cannot parse spec line {raw!r}")
            header[key.strip()] = value.strip()
    if group is None:
        if "group" not in header:
            raise EncodingError("spec file is missing 'group:'")
        path = Path(header["group"])
        if base is not None and not path.is_absolute():
            path = base / path
        group = load_group(path)
    try:
        n = int(header.get("n", "1"))
        k = int(header.get("k", str(DEFAULT_K)))
    except ValueError as exc:
        raise EncodingError(f"bad numeric field in spec: {exc}") from None
    return EncodingSpec(group, n, table, k)


def load_spec(path: str | Path) -> EncodingSpec:
    path = Path(path)
    return parse_spec(path.read_text(), base=path.parent)
