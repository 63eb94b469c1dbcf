import random
from fractions import Fraction

import pytest

from oracles import brute_max_piece, s3_context
from strongbound.groups import FactorGroup, cyclic_group
from strongbound.small_cancellation import (
    Certificate,
    DehnSolver,
    ResourceLimitError,
    SmallCancellationError,
    Violation,
    certify,
    check_cprime,
    enumerate_pieces,
    format_relators,
    is_semi_prefix,
    parse_relators,
    semi_prefix_length,
    symmetrize,
)
from strongbound.words import (
    FreeProductContext,
    Letter,
    NormalForm,
    conjugate,
    invert,
    multiply,
    multiply_all,
    normalize,
)

CTX = s3_context()
Z3CTX = FreeProductContext((FactorGroup.infinite_cyclic(), cyclic_group(3)))


def nf(letters, ctx=CTX):
    return normalize(letters, ctx)


def c(k):
    return Letter(0, k)


def g(x):
    return Letter(1, x)


def test_symmetrize_two_letter_relator():
    R = symmetrize([nf([g("(12)"), c(1)])], CTX)
    listed = {w.letters for w in R.relators}
    assert listed == {(g("(12)"), c(1)), (c(1), g("(12)")), (c(-1), g("(12)")), (g("(12)"), c(-1))}


def test_membership_includes_split_rotations():
    R = symmetrize([nf([g("(12)"), c(3)])], CTX)
    assert nf([c(1), g("(12)"), c(2)]) in R
    assert nf([c(-5), g("(12)"), c(2)]) in R
    assert nf([c(1), g("(12)"), c(1)]) not in R
    assert nf([c(1), g("(12)"), c(-1)]) not in R  # not weakly cyclically reduced


def test_single_letter_class_in_finite_factor():
    R = symmetrize([nf([g("(12)")])], CTX)
    assert {w.letters for w in R.relators} >= {(g("(12)"),), (g("(13)"),), (g("(23)"),)}


def test_rejects_bad_relators():
    with pytest.raises(SmallCancellationError):
        symmetrize([NormalForm(())], CTX)
    with pytest.raises(SmallCancellationError):
        symmetrize([nf([c(1), g("(12)"), c(-1)])], CTX)


def test_duplicates_reported():
    r = nf([g("(12)"), c(2), g("(13)"), c(1)])
    R = symmetrize([r, invert(r, CTX)], CTX)
    assert len(R.duplicates) == 1


def test_semi_prefix_helpers():
    w = (c(3), g("(12)"), c(1))
    assert is_semi_prefix((c(5),), w)
    assert is_semi_prefix((c(3), g("(13)")), w)
    assert not is_semi_prefix((g("(13)"),), w)
    assert semi_prefix_length(w, (c(3), g("(13)"), c(2))) == 2
    assert semi_prefix_length(w, (c(-1), g("(13)"))) == 1


def test_cube_relator_has_piece_one_and_fails_length():
    R = symmetrize([nf([c(3)])], CTX)
    report = enumerate_pieces(R)
    assert report.max_piece_length == 1 and report.exact
    piece, w1, w2 = report.witness
    assert w1 != w2 and is_semi_prefix(piece, w1) and is_semi_prefix(piece, w2)
    result = check_cprime(R, Fraction(1, 6))
    assert isinstance(result, Violation) and result.condition == 1


def test_piece_condition_violation_has_witness():
    # r and a shift of r overlap in a long common block
    r = nf([c(1), g("a"), c(2), g("a"), c(3), g("a"), c(4), g("a2")], Z3CTX)
    s = nf([c(1), g("a"), c(2), g("a"), c(3), g("a"), c(5), g("a")], Z3CTX)
    R = symmetrize([r, s], Z3CTX)
    result = check_cprime(R, Fraction(1, 6))
    assert isinstance(result, Violation)
    assert result.condition in (1, 2)
    loose = check_cprime(R, Fraction(9, 10))
    assert isinstance(loose, Violation) and loose.condition == 2
    assert is_semi_prefix(loose.piece, loose.relator)
    assert "is not <" in loose.detail


@pytest.mark.parametrize("seed", range(6))
def test_pieces_match_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(12):
        words = []
        for _ in range(rng.randint(1, 2)):
            L = 2 * rng.randint(1, 3)
            words.append(nf([c(rng.choice([-2, -1, 1, 2])) if i % 2 == 0
                             else g(rng.choice(CTX.factors[1].nontrivial())) for i in range(L)]))
        R = symmetrize(words, CTX)
        report = enumerate_pieces(R)
        expected = brute_max_piece(R, CTX, spread=3)
        assert report.max_piece_length >= expected
        if report.exact:
            assert report.max_piece_length == expected


def test_eta_range():
    R = symmetrize([nf([c(3)])], CTX)
    for eta in (0, 1, Fraction(3, 2)):
        with pytest.raises(SmallCancellationError):
            check_cprime(R, eta)


def long_relators():
    # two relators of length 20 with short pieces
    words = []
    for shift in (0, 10):
        letters = []
        for i in range(10):
            letters += [c(i + 1 + shift), g("a" if i % 3 else "a2")]
        words.append(nf(letters, Z3CTX))
    return words


def test_certificate_and_dehn():
    R = certify(symmetrize(long_relators(), Z3CTX))
    cert = R.certificate
    assert isinstance(cert, Certificate)
    assert cert.max_piece < Fraction(1, 6) * cert.min_length
    solver = DehnSolver(R)
    rng = random.Random(3)
    for r in R.source:
        assert solver.is_identity(r)
        assert solver.reduce(r) == NormalForm(())
    for _ in range(30):
        parts = []
        for _ in range(rng.randint(1, 3)):
            r = rng.choice(R.source)
            if rng.random() < 0.5:
                r = invert(r, Z3CTX)
            conj = nf([c(rng.randint(1, 3)), g("a"), c(-rng.randint(1, 2))], Z3CTX)
            parts.append(conjugate(r, conj, Z3CTX))
        assert solver.is_identity(multiply_all(parts, Z3CTX))
    assert not solver.is_identity(nf([c(1)], Z3CTX))
    assert not solver.is_identity(nf([g("a")], Z3CTX))


def test_dehn_requires_certificate():
    R = symmetrize(long_relators(), Z3CTX)
    with pytest.raises(SmallCancellationError):
        DehnSolver(R)
    loose = certify(R, Fraction(1, 4))
    if loose.certificate.eta > Fraction(1, 6):
        with pytest.raises(SmallCancellationError):
            DehnSolver(loose)


def test_word_length_guard():
    R = certify(symmetrize(long_relators(), Z3CTX))
    with pytest.raises(ResourceLimitError):
        DehnSolver(R, max_word_len=5).reduce(R.source[0])


def test_relator_file_roundtrip():
    words = long_relators()
    assert parse_relators(format_relators(words, Z3CTX), Z3CTX) == words
    assert parse_relators("# comment\n\n", Z3CTX) == []
