"""Word algebra in a free product of factor groups.

A letter is a nontrivial element of one factor. Powers of the infinite cyclic
generator are stored as one letter carrying an integer exponent, so ``c^5``
counts as a single letter of free-product length.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .groups import FactorGroup


class Letter(NamedTuple):
    factor: int
    element: object


Word = tuple  # a finite sequence of Letter, not necessarily reduced


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class NormalForm:
    """A reduced word: no two consecutive letters come from the same factor."""

    letters: tuple = ()

    @property
    def length(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __bool__(self):
        return bool(self.letters)


EMPTY = NormalForm(())


class FreeProductContext:
    """An ordered list of factors; factor ids are list positions.

    At most one factor may be infinite cyclic; its letters are written ``c^k``
    in the token syntax.
    """

    def __init__(self, factors: Sequence[FactorGroup]):
        self.factors = tuple(factors)
        cyclic = [i for i, f in enumerate(self.factors) if not f.is_finite]
        if len(cyclic) > 1:
            raise WordError("at most one infinite cyclic factor is supported")
        self.cyclic_id = cyclic[0] if cyclic else None

    def factor(self, i: int) -> FactorGroup:
        try:
            return self.factors[i]
        except (IndexError, TypeError):
            raise WordError(f"unknown factor id {i!r}") from None

    def check_letter(self, x) -> Letter:
        if not isinstance(x, tuple) or len(x) != 2:
            raise WordError(f"not a letter: {x!r}")
        x = Letter(*x)
        group = self.factor(x.factor)
        if not group.contains(x.element):
            raise WordError(f"{x.element!r} is not an element of factor {x.factor} ({group.name})")
        if group.is_identity(x.element):
            raise WordError(f"identity letter {x.element!r}@{x.factor} is not allowed in a word")
        return x

    def inv_letter(self, x: Letter) -> Letter:
        return Letter(x.factor, self.factors[x.factor].inv(x.element))

    def merge(self, x: Letter, y: Letter):
        """Product of two letters of the same factor, or None if it is the identity."""
        group = self.factors[x.factor]
        z = group.mul(x.element, y.element)
        return None if group.is_identity(z) else Letter(x.factor, z)

    def letter(self, factor: int, element) -> Letter:
        return self.check_letter((factor, element))

    def c(self, k: int = 1) -> Letter:
        if self.cyclic_id is None:
            raise WordError("context has no infinite cyclic factor")
        return self.check_letter((self.cyclic_id, k))

    def word(self, letters: Iterable) -> NormalForm:
        return normalize(tuple(letters), self)


def normalize(w: Sequence, ctx: FreeProductContext) -> NormalForm:
    """Normal form of the product of the letters of ``w``.

    Identity letters and unknown factors are rejected.
    """
    stack: list[Letter] = []
    for raw in w:
        x = ctx.check_letter(raw)
        if stack and stack[-1].factor == x.factor:
            z = ctx.merge(stack.pop(), x)
            if z is not None:
                stack.append(z)
        else:
            stack.append(x)
    return NormalForm(tuple(stack))


def cancellation_depth(u: NormalForm, v: NormalForm, ctx: FreeProductContext) -> int:
    """The largest s with u's last s letters inverse to v's first s letters."""
    s = 0
    k = len(u)
    while s < k and s < len(v) and u[k - 1 - s] == ctx.inv_letter(v[s]):
        s += 1
    return s


def multiply(u: NormalForm, v: NormalForm, ctx: FreeProductContext) -> NormalForm:
    left = list(u.letters)
    right = v.letters
    i = 0
    while left and i < len(right):
        a, b = left[-1], right[i]
        if a.factor != b.factor:
            break
        left.pop()
        i += 1
        z = ctx.merge(a, b)
        if z is not None:
            left.append(z)
            break
    return NormalForm(tuple(left) + right[i:])


def multiply_all(words: Iterable[NormalForm], ctx: FreeProductContext) -> NormalForm:
    out = EMPTY
    for w in words:
        out = multiply(out, w, ctx)
    return out


def invert(w: NormalForm, ctx: FreeProductContext) -> NormalForm:
    return NormalForm(tuple(ctx.inv_letter(x) for x in reversed(w.letters)))


def conjugate(w: NormalForm, g: NormalForm, ctx: FreeProductContext) -> NormalForm:
    """g w g^-1"""
    return multiply(multiply(g, w, ctx), invert(g, ctx), ctx)


def is_semi_reduced(u: NormalForm, v: NormalForm, ctx: FreeProductContext) -> bool:
    """True iff forming uv cancels no letters (a boundary merge is allowed)."""
    return cancellation_depth(u, v, ctx) == 0


def is_weakly_cyclically_reduced(w: NormalForm, ctx: FreeProductContext) -> bool:
    return len(w) <= 1 or w[0] != ctx.inv_letter(w[-1])


def is_cyclically_reduced(w: NormalForm) -> bool:
    return len(w) <= 1 or w[0].factor != w[-1].factor


def weakly_cyclically_reduce(w: NormalForm, ctx: FreeProductContext) -> tuple[NormalForm, NormalForm]:
    """Return ``(r, g)`` with r weakly cyclically reduced and w = g r g^-1."""
    letters = w.letters
    lo, hi = 0, len(letters)
    while hi - lo >= 2 and letters[lo] == ctx.inv_letter(letters[hi - 1]):
        lo += 1
        hi -= 1
    return NormalForm(letters[lo:hi]), NormalForm(letters[:lo])


def cyclically_reduce(w: NormalForm, ctx: FreeProductContext) -> tuple[NormalForm, NormalForm]:
    """Return ``(r, g)`` with r cyclically reduced (ends in different factors) and w = g r g^-1."""
    r, g = weakly_cyclically_reduce(w, ctx)
    if len(r) >= 2 and r[0].factor == r[-1].factor:
        last = r[-1]
        z = ctx.merge(last, r[0])  # never None: r is weakly cyclically reduced
        r = NormalForm((z,) + r.letters[1:-1])
        g = multiply(g, NormalForm((ctx.inv_letter(last),)), ctx)
    return r, g


def rotations(w: NormalForm) -> list[tuple]:
    """All letter rotations of w (as raw letter tuples; not necessarily normal forms)."""
    letters = w.letters
    return [letters[i:] + letters[:i] for i in range(len(letters))] or [()]


# -- token syntax ------------------------------------------------------------

_CYCLIC_TOKEN = re.compile(r"^c(?:\^(-?\d+))?$")


def parse_word(text: str, ctx: FreeProductContext) -> Word:
    """Parse whitespace separated tokens ``c^<int>`` or ``<name>@<factor-id>``."""
    letters = []
    for tok in text.split():
        m = _CYCLIC_TOKEN.match(tok)
        if m:
            k = int(m.group(1)) if m.group(1) is not None else 1
            if k == 0:
                raise WordError("c^0 is the identity and is not a letter")
            letters.append(ctx.c(k))
            continue
        name, sep, fid = tok.rpartition("@")
        if not sep or not name:
            raise WordError(f"bad token {tok!r}")
        try:
            factor = int(fid)
        except ValueError:
            raise WordError(f"bad factor id in token {tok!r}") from None
        group = ctx.factor(factor)
        element: object = name
        if not group.is_finite:
            try:
                element = int(name)
            except ValueError:
                raise WordError(f"bad exponent in token {tok!r}") from None
        letters.append(ctx.check_letter((factor, element)))
    return tuple(letters)


def format_letter(x: Letter, ctx: FreeProductContext) -> str:
    if x.factor == ctx.cyclic_id:
        return f"c^{x.element}"
    return f"{x.element}@{x.factor}"


def format_word(w: Iterable, ctx: FreeProductContext) -> str:
    return " ".join(format_letter(Letter(*x), ctx) for x in w)
