import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import detected_nontrivial, two_generator_homs
from strongbound.encoding import (
    GENERIC,
    REPLACED,
    TRIVIAL,
    EncodingError,
    EncodingSpec,
    build_extension,
    build_relator,
    build_u_word,
    build_w_word,
    expected_length,
    extension_context,
    gamma_step_bound,
    load_spec,
    parse_spec,
    relator_case,
    relator_summary,
    verify_extension,
)
from strongbound.groups import cyclic_group, symmetric_group
from strongbound.words import (
    Letter,
    NormalForm,
    cyclically_reduce,
    format_word,
    invert,
    multiply,
    normalize,
    weakly_cyclically_reduce,
)

DATA = Path(__file__).resolve().parents[1] / "data"
Z2, Z3, S3 = cyclic_group(2), cyclic_group(3), symmetric_group(3)


def tables(G, n):
    """Three value tables: constant identity, last entry, and a mixed rule."""
    mixed = {}
    for i, t in enumerate(itertools.product(G.nontrivial(), repeat=n)):
        mixed[t] = [G.identity, t[-1], G.nontrivial()[0], G.mul(t[0], t[-1])][i % 4]
    return [
        EncodingSpec.from_function(G, n, lambda t: G.identity),
        EncodingSpec.from_function(G, n, lambda t: t[-1]),
        EncodingSpec(G, n, mixed),
    ]


def test_u_and_w_words_small():
    spec = EncodingSpec.from_function(S3, 2, lambda t: "e", k=2)
    u = build_u_word(("(12)", "(13)"), spec)
    assert u == (Letter(1, "(12)"), Letter(0, 1), Letter(1, "(13)"))
    w = build_w_word(("(12)", "(13)"), spec)
    assert format_word(w, extension_context(S3)) == "c^2 (12)@1 c^1 (13)@1 c^1 (12)@1 c^1 (13)@1"
    assert len(w) == 2 * 2 * 2


def cyclic_class(w, ctx):
    r, _ = cyclically_reduce(w, ctx)
    return frozenset(r.letters[i:] + r.letters[:i] for i in range(len(r)))


@pytest.mark.parametrize("G", [Z2, Z3, S3], ids=lambda G: G.name)
@pytest.mark.parametrize("n", [1, 2])
def test_length_trichotomy(G, n):
    for spec in tables(G, n):
        base = 2 * n * spec.k
        ctx = extension_context(G)
        for t in spec.tuples():
            r = build_relator(t, spec)
            value = spec.f[t]
            want = base if value == G.identity else base - 1 if value == t[-1] else base + 1
            assert len(r) == want == expected_length(relator_case(t, spec), spec)
            # r is a cyclic conjugate of f^-1 w
            word = build_w_word(t, spec)
            if value != G.identity:
                word = normalize((Letter(1, G.inv(value)),) + word.letters, ctx)
            assert cyclic_class(word, ctx) == cyclic_class(r, ctx)
            assert r == weakly_cyclically_reduce(r, ctx)[0]


def test_relator_conjugate_of_defining_word():
    spec = EncodingSpec.from_function(S3, 1, lambda t: t[-1], k=3)
    ctx = extension_context(S3)
    for t in spec.tuples():
        r = build_relator(t, spec)
        target = normalize((Letter(1, S3.inv(t[-1])),) + build_w_word(t, spec).letters, ctx)
        conj = NormalForm((Letter(1, t[-1]),))
        assert multiply(multiply(conj, target, ctx), invert(conj, ctx), ctx) == r


def test_cases_cover_all_three():
    spec = tables(S3, 1)[2]
    cases = {relator_case(t, spec) for t in spec.tuples()}
    assert cases == {GENERIC, REPLACED, TRIVIAL}


@pytest.mark.parametrize("G,n", [(Z3, 1), (S3, 1), (Z2, 2)], ids=["Z3-1", "S3-1", "Z2-2"])
def test_extension_certifies_and_verifies(G, n):
    for spec in tables(G, n):
        ext = build_extension(spec)
        cert = ext.certificate
        assert cert.max_piece <= 10 * n
        assert cert.min_length >= 64 * n - 2
        assert Fraction(10 * n) < Fraction(64 * n - 2, 6)
        report = verify_extension(ext)
        assert report.passed, report.lines()


def test_k1_negative_control():
    spec = EncodingSpec.from_function(Z2, 1, lambda t: "e", k=1)
    with pytest.raises(EncodingError) as info:
        build_extension(spec)
    v = info.value.violation
    assert v is not None and v.condition == 1 and len(v.relator) == 2


def test_spec_validation():
    with pytest.raises(EncodingError):
        EncodingSpec(cyclic_group(1), 1, {})
    with pytest.raises(EncodingError):
        EncodingSpec(Z2, 0, {})
    with pytest.raises(EncodingError, match="undefined"):
        EncodingSpec(Z3, 1, {("a",): "e"})
    with pytest.raises(EncodingError, match="not an element"):
        EncodingSpec(Z2, 1, {("a",): "b"})
    with pytest.raises(EncodingError):
        EncodingSpec(Z2, 1, {("a",): "e"}, k=0)
    spec = EncodingSpec(Z2, 1, {("a",): "e"})
    with pytest.raises(EncodingError):
        build_u_word(("e",), spec)


def test_spec_files():
    spec = load_spec(DATA / "z3_trivial.spec")
    assert spec.G.order == 3 and spec.n == 1 and spec.k == 32
    assert [row[3] for row in relator_summary(spec)] == [64, 64]
    with pytest.raises(EncodingError):
        parse_spec("n: 1\n", group=None)
    with pytest.raises(EncodingError):
        parse_spec("n: x\n", group=Z2)


def test_gamma_step_bound():
    b = gamma_step_bound(EncodingSpec.from_function(Z3, 2, lambda t: "e"))
    assert b.word_length == 128
    assert b.doubling_steps == 8


def test_dehn_nontriviality_against_quotients():
    spec = EncodingSpec.from_function(Z2, 1, lambda t: "e", k=10)
    ext = build_extension(spec)
    solver = ext.solver()
    homs = two_generator_homs([r.letters for r in ext.gamma], max_degree=6)
    assert homs
    rng = random.Random(11)
    gens = [Letter(1, "a"), Letter(0, 1), Letter(0, -1)]
    for _ in range(200):
        word = normalize([rng.choice(gens) for _ in range(rng.randint(0, 4))], ext.ctx)
        trivial = solver.is_identity(word)
        assert trivial != detected_nontrivial(word.letters, homs)
