"""Symmetrized relator sets, pieces, the C'(eta) condition, and Dehn's algorithm.

A symmetrized set generated by cyclic words is infinite as a set of group
elements: besides the rotations of each cyclically reduced relator ``r`` it
contains every "split rotation" ``q x_{i+1} ... x_{i-1} p`` with ``pq = x_i``.
:class:`SymmetrizedSet` therefore keeps a finite listing (the letter rotations,
plus the input relators and their inverses) for display and iteration, and
decides membership and pieces against the full set by working with the
cyclic words directly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .words import (
    EMPTY,
    FreeProductContext,
    Letter,
    NormalForm,
    cyclically_reduce,
    format_word,
    invert,
    is_weakly_cyclically_reduced,
    normalize,
    parse_word,
)


class SmallCancellationError(ValueError):
    pass


def _canonical_rotation(letters: tuple) -> tuple:
    return min(letters[i:] + letters[:i] for i in range(len(letters)))


@dataclass(frozen=True)
class Certificate:
    eta: Fraction
    min_length: int
    max_piece: int
    worst_ratio: Fraction  # max over relators of (longest piece) / L(relator)
    exact: bool = True


@dataclass(frozen=True)
class Violation:
    eta: Fraction
    condition: int  # 1: relator too short, 2: piece too long
    relator: NormalForm
    piece: NormalForm
    detail: str


@dataclass(frozen=True)
class PieceReport:
    max_piece_length: int
    witness: tuple | None  # (piece, relator1, relator2)
    per_relator_min_length: int
    per_relator: tuple = ()  # (cyclic word, its length, longest piece starting in it)
    exact: bool = True


@dataclass(frozen=True)
class SymmetrizedSet:
    ctx: FreeProductContext = field(repr=False, compare=False)
    relators: frozenset
    source: tuple
    cyclic_words: tuple  # canonical cyclically reduced words, both orientations, sorted
    duplicates: tuple = ()
    certificate: Certificate | None = None

    def __contains__(self, w) -> bool:
        if not isinstance(w, NormalForm):
            w = normalize(w, self.ctx)
        if not w or not is_weakly_cyclically_reduced(w, self.ctx):
            return False
        r, _ = cyclically_reduce(w, self.ctx)
        letters = r.letters if len(r) == 1 else _canonical_rotation(r.letters)
        return letters in self._cyclic_set

    @property
    def _cyclic_set(self) -> frozenset:
        cached = self.__dict__.get("_cyc")
        if cached is None:
            cached = frozenset(self.cyclic_words)
            object.__setattr__(self, "_cyc", cached)
        return cached

    def sorted_relators(self) -> list[NormalForm]:
        return sorted(self.relators, key=lambda w: (len(w), w.letters))

    @property
    def min_length(self) -> int:
        return min(len(r) for r in self.cyclic_words)


def _cyclic_forms(w: NormalForm, ctx: FreeProductContext) -> set[tuple]:
    r, _ = cyclically_reduce(w, ctx)
    if len(r) >= 2:
        return {_canonical_rotation(r.letters)}
    (x,) = r.letters
    group = ctx.factor(x.factor)
    if not group.is_finite:
        return {(x,)}
    return {(Letter(x.factor, group.mul(group.mul(h, x.element), group.inv(h))),) for h in group.elements}


def symmetrize(gamma: Iterable, ctx: FreeProductContext) -> SymmetrizedSet:
    """Close ``gamma`` under weakly cyclically reduced conjugation and inversion."""
    source = []
    for g in gamma:
        w = g if isinstance(g, NormalForm) else normalize(g, ctx)
        if not w:
            raise SmallCancellationError("relators must be nontrivial")
        if not is_weakly_cyclically_reduced(w, ctx):
            raise SmallCancellationError(f"relator is not weakly cyclically reduced: {format_word(w, ctx)}")
        source.append(w)

    cyclic: set[tuple] = set()
    duplicates = []
    seen_classes: set[frozenset] = set()
    for w in source:
        forms = _cyclic_forms(w, ctx) | _cyclic_forms(invert(w, ctx), ctx)
        key = frozenset(forms)
        if key in seen_classes:
            duplicates.append(w)
        seen_classes.add(key)
        cyclic |= forms

    listing = set(source) | {invert(w, ctx) for w in source}
    for r in cyclic:
        for i in range(len(r)):
            listing.add(NormalForm(r[i:] + r[:i]))
    return SymmetrizedSet(
        ctx=ctx,
        relators=frozenset(listing),
        source=tuple(source),
        cyclic_words=tuple(sorted(cyclic, key=lambda r: (len(r), r))),
        duplicates=tuple(duplicates),
    )


# -- pieces --------------------------------------------------------------------

def semi_prefix_length(w1: Sequence, w2: Sequence) -> int:
    """Longest u that is a semi-reduced prefix of both normal forms.

    u's letters agree exactly except possibly the last, which only needs to
    lie in the same factor as both corresponding letters.
    """
    p = 0
    n = min(len(w1), len(w2))
    while p < n and w1[p] == w2[p]:
        p += 1
    if p < n and w1[p].factor == w2[p].factor:
        return p + 1
    return p


def is_semi_prefix(u: Sequence, w: Sequence) -> bool:
    """True iff w = u v is a semi-reduced form for some normal form v."""
    if not u:
        return True
    if len(u) > len(w):
        return False
    k = len(u) - 1
    return tuple(u[:k]) == tuple(w[:k]) and u[k].factor == w[k].factor


def _splittable(ctx: FreeProductContext, x: Letter) -> bool:
    group = ctx.factor(x.factor)
    return (not group.is_finite) or group.order >= 3


def _other_elements(ctx: FreeProductContext, factor: int, avoid: set, count: int = 1) -> list:
    group = ctx.factor(factor)
    out = []
    pool = group.elements if group.is_finite else itertools.count(1)
    for z in pool:
        if len(out) >= count:
            break
        if z != group.identity and z not in avoid:
            out.append(z)
    return out


def _element(ctx: FreeProductContext, x: Letter, body: tuple, q) -> tuple | None:
    """The member of R starting with q whose cyclic reduction is the rotation x.body."""
    if q == x.element:
        return (x,) + body
    if not body:
        return None
    group = ctx.factor(x.factor)
    p = group.mul(x.element, group.inv(q))
    return (Letter(x.factor, q),) + body + (Letter(x.factor, p),)


def _pair_exact(ctx, e1, e2) -> tuple[int, tuple | None]:
    """Exact longest common semi-prefix of two distinct members, one per entry."""
    (x1, b1), (x2, b2) = e1, e2
    if x1.factor != x2.factor:
        return 0, None
    best = (0, None)
    qs = {x1.element, x2.element}
    qs.update(_other_elements(ctx, x1.factor, qs | {ctx.factor(x1.factor).identity}))
    choices = [(x1.element, x2.element)] + [(q, q) for q in sorted(qs, key=repr)]
    for q1, q2 in choices:
        w1, w2 = _element(ctx, x1, b1, q1), _element(ctx, x2, b2, q2)
        if w1 is None or w2 is None or w1 == w2:
            continue
        d = semi_prefix_length(w1, w2)
        if d > best[0]:
            best = (d, (w1, w2))
    return best


def _self_pair(ctx, e) -> tuple[int, tuple | None]:
    x, body = e
    if not body or not _splittable(ctx, x):
        return 0, None
    (q,) = _other_elements(ctx, x.factor, {x.element})
    return 1, ((x,) + body, _element(ctx, x, body, q))


def enumerate_pieces(R: SymmetrizedSet, ctx: FreeProductContext | None = None) -> PieceReport:
    """Exact longest piece of the full symmetrized set.

    Every member is determined by a rotation ``x.body`` of a cyclic word and
    its first letter q (same factor as x).  Two members share a semi-prefix of
    length d >= 2 only if they start with the same q, so comparisons reduce to
    the bodies.  Entries are encoded as token sequences
    ``fac(x), fac(b0), b0, fac(b1), b1, ...`` (plus a trailing factor token
    when the member can end in a split letter) and sorted; the longest shared
    token prefix of an entry is attained at a sorted neighbour.
    """
    ctx = ctx or R.ctx
    entries = []
    for ci, r in enumerate(R.cyclic_words):
        for i in range(len(r)):
            x = r[i]
            body = r[i + 1:] + r[:i]
            entries.append((x, body, ci))
    uniq = {}
    for x, body, ci in entries:
        uniq.setdefault((x, body), ci)
    keys = list(uniq)

    def tokens(key):
        x, body = key
        out = [x.factor]
        for b in body:
            out.append(b.factor)
            out.append(b)
        if body and _splittable(ctx, x):
            out.append(x.factor)
        return tuple(out)

    seqs = [tokens(k) for k in keys]
    order = sorted(range(len(keys)), key=lambda j: seqs[j])

    def lcp(a, b):
        sa, sb = seqs[a], seqs[b]
        n = min(len(sa), len(sb))
        t = 0
        while t < n and sa[t] == sb[t]:
            t += 1
        return t

    bound = [0] * len(keys)
    partner = [None] * len(keys)
    for a, b in zip(order, order[1:]):
        t = lcp(a, b)
        for j, o in ((a, b), (b, a)):
            if t > bound[j]:
                bound[j], partner[j] = t, o

    def to_piece_len(t):
        return 0 if t == 0 else 1 + t // 2

    per_entry = [to_piece_len(t) for t in bound]
    for j, key in enumerate(keys):
        if per_entry[j] == 0 and _self_pair(ctx, key)[0]:
            per_entry[j] = 1

    # exact witness for the global maximum; the token bound can exceed the
    # exact value only when split tails must avoid too many elements
    exact = True
    best_len, witness = 0, None
    if keys:
        target = max(per_entry)
        for j in sorted(range(len(keys)), key=lambda j: -per_entry[j]):
            if per_entry[j] < target:
                break
            d, pair = _pair_exact(ctx, keys[j], keys[partner[j]]) if partner[j] is not None else (0, None)
            if d < 1:
                d, pair = _self_pair(ctx, keys[j])
            if d > best_len:
                best_len, witness = d, pair
            if best_len == target:
                break
        if best_len < target:
            exact = False
            best_len = target
    if witness is not None:
        w1, w2 = witness
        piece = w1[:best_len]
        witness = (NormalForm(piece), NormalForm(w1), NormalForm(w2))

    per_relator = {}
    for j, key in enumerate(keys):
        ci = uniq[key]
        per_relator[ci] = max(per_relator.get(ci, 0), per_entry[j])
    for (x, body, ci) in entries:
        per_relator.setdefault(ci, 0)
    rows = tuple((NormalForm(R.cyclic_words[ci]), len(R.cyclic_words[ci]), per_relator[ci])
                 for ci in sorted(per_relator))
    return PieceReport(
        max_piece_length=best_len,
        witness=witness,
        per_relator_min_length=R.min_length if R.cyclic_words else 0,
        per_relator=rows,
        exact=exact,
    )


def check_cprime(R: SymmetrizedSet, eta, ctx: FreeProductContext | None = None,
                 report: PieceReport | None = None) -> Certificate | Violation:
    """Verify C'(eta) with exact rational arithmetic."""
    ctx = ctx or R.ctx
    eta = Fraction(eta)
    if not 0 < eta < 1:
        raise SmallCancellationError("eta must lie strictly between 0 and 1")
    report = report or enumerate_pieces(R, ctx)
    for r, length, _ in report.per_relator:
        if not length > 1 / eta:
            return Violation(eta, 1, r, EMPTY, f"L = {length} is not > {1 / eta}")
    worst = Fraction(0)
    for r, length, piece in report.per_relator:
        ratio = Fraction(piece, length)
        worst = max(worst, ratio)
        if not ratio < eta:
            w1, w2 = _piece_witness_for(R, r, piece, ctx)
            return Violation(eta, 2, w1, w2,
                             f"piece of length {piece} is not < {eta} * {length} = {eta * length}")
    return Certificate(
        eta=eta,
        min_length=report.per_relator_min_length,
        max_piece=report.max_piece_length,
        worst_ratio=worst,
        exact=report.exact,
    )


def _piece_witness_for(R, r: NormalForm, piece_len: int, ctx) -> tuple[NormalForm, NormalForm]:
    """A member starting in cyclic word r and a piece of length piece_len prefixing it."""
    letters = r.letters
    best = None
    for i in range(len(letters)):
        key = (letters[i], letters[i + 1:] + letters[:i])
        for other in R.cyclic_words:
            for j in range(len(other)):
                okey = (other[j], other[j + 1:] + other[:j])
                if okey == key:
                    continue
                d, pair = _pair_exact(ctx, key, okey)
                if d >= piece_len and pair:
                    w1 = pair[0]
                    return NormalForm(w1), NormalForm(w1[:d])
        d, pair = _self_pair(ctx, key)
        if d >= piece_len and pair:
            best = (NormalForm(pair[0]), NormalForm(pair[0][:d]))
    if best:
        return best
    return r, NormalForm(letters[:piece_len])


def certify(R: SymmetrizedSet, eta=Fraction(1, 6)) -> SymmetrizedSet:
    """Return R with a C'(eta) certificate attached, or raise with the violation."""
    result = check_cprime(R, eta)
    if isinstance(result, Violation):
        raise SmallCancellationError(
            f"C'({result.eta}) fails, condition ({result.condition}): {result.detail}; "
            f"relator {format_word(result.relator, R.ctx)}")
    return replace(R, certificate=result)


# -- Dehn's algorithm ------------------------------------------------------------

class DehnSolver:
    """Length-decreasing rewriting with the relators of a certified C'(1/6) set.

    A rewrite finds a maximal exact run of some cyclic relator inside the word
    and replaces it by the inverse of the complementary part of the relator;
    the flanking letters merge through normalization, which realises matches
    beginning or ending inside a factor letter.  A rewrite is kept only when
    it strictly shortens the word, so every call terminates.
    """

    def __init__(self, R: SymmetrizedSet, max_word_len: int | None = None):
        cert = R.certificate
        if cert is None:
            raise SmallCancellationError("refusing to run Dehn's algorithm without a C'(1/6) certificate")
        if cert.eta > Fraction(1, 6):
            raise SmallCancellationError(f"certificate is for C'({cert.eta}); C'(1/6) is required")
        self.R = R
        self.ctx = R.ctx
        self.max_word_len = max_word_len
        self.words = R.cyclic_words
        index: dict[Letter, list[tuple[int, int]]] = {}
        for ri, r in enumerate(self.words):
            for i, x in enumerate(r):
                index.setdefault(x, []).append((ri, i))
        self.index = index
        self._inverse_complements: dict[tuple[int, int, int], tuple] = {}

    def _complement_inverse(self, ri: int, i: int, t: int) -> tuple:
        key = (ri, i, t)
        out = self._inverse_complements.get(key)
        if out is None:
            r = self.words[ri]
            L = len(r)
            comp = [r[(i + t + k) % L] for k in range(L - t)]
            out = tuple(self.ctx.inv_letter(x) for x in reversed(comp))
            self._inverse_complements[key] = out
        return out

    def _candidates(self, w: tuple, p: int, cyclic: bool):
        n = len(w)
        scored = []
        for ri, i in self.index.get(w[p], ()):
            r = self.words[ri]
            L = len(r)
            limit = min(L, n) if cyclic else min(L, n - p)
            t = 1
            while t < limit and w[(p + t) % n] == r[(i + t) % L]:
                t += 1
            if 2 * t >= L - 2:
                scored.append((-t, ri, i))
        scored.sort()
        return scored

    def _check_len(self, w):
        if self.max_word_len is not None and len(w) > self.max_word_len:
            raise ResourceLimitError(f"word length {len(w)} exceeds guard {self.max_word_len}")

    def step(self, w: NormalForm) -> NormalForm | None:
        letters = w.letters
        n = len(letters)
        for p in range(n):
            for negt, ri, i in self._candidates(letters, p, cyclic=False):
                t = -negt
                new = normalize(letters[:p] + self._complement_inverse(ri, i, t) + letters[p + t:], self.ctx)
                if len(new) < n:
                    return new
        return None

    def cyclic_step(self, w: NormalForm) -> NormalForm | None:
        """One rewrite on the cyclic word w (w must be cyclically reduced)."""
        letters = w.letters
        n = len(letters)
        for p in range(n):
            rotated = letters[p:] + letters[:p]
            for negt, ri, i in self._candidates(letters, p, cyclic=True):
                t = -negt
                new = normalize(self._complement_inverse(ri, i, t) + rotated[t:], self.ctx)
                new, _ = cyclically_reduce(new, self.ctx)
                if len(new) < n:
                    return new
        return None

    def reduce(self, w) -> NormalForm:
        nf = w if isinstance(w, NormalForm) else normalize(w, self.ctx)
        self._check_len(nf)
        while True:
            nxt = self.step(nf)
            if nxt is None:
                return nf
            nf = nxt

    def cyclic_reduce(self, w) -> NormalForm:
        nf = w if isinstance(w, NormalForm) else normalize(w, self.ctx)
        self._check_len(nf)
        r, _ = cyclically_reduce(nf, self.ctx)
        while r:
            nxt = self.cyclic_step(r)
            if nxt is None:
                break
            r = nxt
        return r

    def is_identity(self, w) -> bool:
        return not self.cyclic_reduce(w)


class ResourceLimitError(RuntimeError):
    pass


def dehn_reduce(w, R: SymmetrizedSet, ctx: FreeProductContext | None = None) -> NormalForm:
    return DehnSolver(R).reduce(w)


def is_identity(w, R: SymmetrizedSet, ctx: FreeProductContext | None = None) -> bool:
    return DehnSolver(R).is_identity(w)


# -- relator files ------------------------------------------------------------------

def parse_relators(text: str, ctx: FreeProductContext) -> list[NormalForm]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(normalize(parse_word(line, ctx), ctx))
    return out


def format_relators(words: Iterable[NormalForm], ctx: FreeProductContext) -> str:
    return "".join(format_word(w, ctx) + "\n" for w in words)


def format_certificate(result: Certificate | Violation, ctx: FreeProductContext) -> list[str]:
    if isinstance(result, Certificate):
        return [
            f"eta: {result.eta}",
            f"min_relator_length: {result.min_length}",
            f"max_piece_length: {result.max_piece}",
            f"worst_piece_ratio: {result.worst_ratio}",
            f"condition_1: {result.min_length} > {1 / result.eta}",
            f"condition_2: {result.max_piece} < {result.eta} * {result.min_length} = {result.eta * result.min_length}"
            if result.max_piece < result.eta * result.min_length
            else f"condition_2: per-relator ratio {result.worst_ratio} < {result.eta}",
            f"pieces_exact: {str(result.exact).lower()}",
        ]
    return [
        f"eta: {result.eta}",
        f"violated_condition: {result.condition}",
        f"detail: {result.detail}",
        f"relator: {format_word(result.relator, ctx)}",
        f"piece: {format_word(result.piece, ctx) or '<none>'}",
    ]
