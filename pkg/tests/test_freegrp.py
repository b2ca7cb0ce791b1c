"""Free group words and certified automorphisms."""

import random

import pytest

from resip import (
    FreeEndo,
    FreeWord,
    InvalidSpec,
    MappingTorusSpec,
    RankMismatch,
    abelianization_matrix,
    apply_endo,
    commutator,
    compose_endos,
    conjugate,
    endo_power,
    format_word,
    inner_automorphism,
    is_mod_p_torelli,
    nielsen_transvection,
    parse_word,
    word_inverse,
    word_multiply,
)


def _random_word(rng, rank, length):
    letters = [rng.choice([-1, 1]) * rng.randint(1, rank) for _ in range(length)]
    return FreeWord.from_letters(rank, letters)


def test_free_reduction():
    w = FreeWord.from_letters(2, [1, 2, -2, -1, 1])
    assert w.letters == (1,)
    assert FreeWord.from_letters(2, [1, -1]).is_identity()


def test_parse_and_format_round_trip():
    w = parse_word("x1 X2 x1", 3)
    assert w.letters == (1, -2, 1)
    assert format_word(w) == "x1 X2 x1"
    assert parse_word("1", 2).is_identity()
    assert format_word(FreeWord.identity(2)) == "1"
    with pytest.raises(InvalidSpec):
        parse_word("x0", 2)
    with pytest.raises(InvalidSpec):
        parse_word("x3", 2)
    with pytest.raises(InvalidSpec):
        parse_word("y1z", 2)


def test_word_group_axioms_random():
    rng = random.Random(3)
    for _ in range(80):
        u = _random_word(rng, 3, rng.randint(0, 12))
        v = _random_word(rng, 3, rng.randint(0, 12))
        w = _random_word(rng, 3, rng.randint(0, 12))
        assert word_multiply(word_multiply(u, v), w) == word_multiply(
            u, word_multiply(v, w)
        )
        assert word_multiply(u, word_inverse(u)).is_identity()
        assert word_inverse(word_inverse(u)) == u


def test_conjugate_and_commutator_shapes():
    x1 = FreeWord.generator(2, 1)
    x2 = FreeWord.generator(2, 2)
    assert conjugate(x1, x2).letters == (2, 1, -2)
    assert commutator(x1, x2).letters == (1, 2, -1, -2)
    assert commutator(x1, x1).is_identity()


def test_rank_mismatch_rejected():
    with pytest.raises(RankMismatch):
        word_multiply(FreeWord.generator(2, 1), FreeWord.generator(3, 1))


def test_endo_inverse_certificate_is_verified():
    good = FreeEndo(
        2,
        (parse_word("x1 x2", 2), parse_word("x2", 2)),
        (parse_word("x1 X2", 2), parse_word("x2", 2)),
    )
    assert good.is_certified
    with pytest.raises(InvalidSpec):
        FreeEndo(
            2,
            (parse_word("x1 x2", 2), parse_word("x2", 2)),
            (parse_word("x1", 2), parse_word("x2", 2)),
        )


def test_endo_application_is_homomorphic():
    rng = random.Random(5)
    phi = nielsen_transvection(3, 1, 2)
    for _ in range(50):
        u = _random_word(rng, 3, rng.randint(0, 10))
        v = _random_word(rng, 3, rng.randint(0, 10))
        assert apply_endo(phi, word_multiply(u, v)) == word_multiply(
            apply_endo(phi, u), apply_endo(phi, v)
        )
        assert apply_endo(phi, word_inverse(u)) == word_inverse(apply_endo(phi, u))


def test_composition_convention_rho_first():
    # phi: x1 -> x1 x2; rho: x1 -> x2, x2 -> x1 (swap)
    phi = nielsen_transvection(2, 1, 2)
    rho = FreeEndo(
        2,
        (parse_word("x2", 2), parse_word("x1", 2)),
        (parse_word("x2", 2), parse_word("x1", 2)),
    )
    comp = compose_endos(phi, rho)
    # (phi after rho)(x1) = phi(x2) = x2
    assert comp.images[0] == parse_word("x2", 2)
    assert comp.images[1] == parse_word("x1 x2", 2)
    # composed certified inverses stay certified
    assert comp.is_certified


def test_composition_matches_pointwise_application():
    rng = random.Random(9)
    phi = inner_automorphism(parse_word("x1 x2", 3))
    rho = nielsen_transvection(3, 2, 3)
    comp = compose_endos(phi, rho)
    for _ in range(30):
        w = _random_word(rng, 3, rng.randint(0, 8))
        assert apply_endo(comp, w) == apply_endo(phi, apply_endo(rho, w))


def test_endo_power_and_negative_power():
    phi = nielsen_transvection(2, 1, 2)
    sq = endo_power(phi, 2)
    assert sq.images[0] == parse_word("x1 x2 x2", 2)
    inv = endo_power(phi, -1)
    assert compose_endos(phi, inv).images == FreeEndo.identity(2).images


def test_abelianization_matrix_columns_are_images():
    phi = FreeEndo(
        2,
        (parse_word("x1 x2 x1", 2), parse_word("X2", 2)),
        None,
    )
    m = abelianization_matrix(phi)
    assert m.entries == ((2, 0), (1, -1))


def test_abelianization_is_functorial():
    rng = random.Random(12)
    for _ in range(20):
        phi = _random_automorphism(rng, 3)
        rho = _random_automorphism(rng, 3)
        lhs = abelianization_matrix(compose_endos(phi, rho))
        rhs = abelianization_matrix(phi) * abelianization_matrix(rho)
        assert lhs.entries == rhs.entries


def _random_automorphism(rng, rank):
    """Random product of transvections and inner automorphisms."""
    phi = FreeEndo.identity(rank)
    for _ in range(rng.randint(1, 5)):
        if rng.random() < 0.5:
            i, j = rng.sample(range(1, rank + 1), 2)
            step = nielsen_transvection(rank, i, j)
        else:
            u = FreeWord.from_letters(
                rank,
                [rng.choice([-1, 1]) * rng.randint(1, rank) for _ in range(3)],
            )
            step = inner_automorphism(u)
        phi = compose_endos(step, phi)
    return phi


def test_inner_automorphisms_are_mod_p_torelli():
    rng = random.Random(15)
    for _ in range(20):
        u = _random_word(rng, 3, rng.randint(1, 6))
        inner = inner_automorphism(u)
        for p in (2, 3, 5):
            assert is_mod_p_torelli(inner, p)
    # a transvection is not Torelli at any p
    assert not is_mod_p_torelli(nielsen_transvection(2, 1, 2), 3)
    # but its cube is Torelli mod 3
    assert is_mod_p_torelli(endo_power(nielsen_transvection(2, 1, 2), 3), 3)


def test_mapping_torus_spec_requires_certified_inverse():
    phi = FreeEndo(2, (parse_word("x1 x1", 2), parse_word("x2", 2)), None)
    with pytest.raises(InvalidSpec):
        MappingTorusSpec(phi)
    MappingTorusSpec(nielsen_transvection(2, 1, 2))  # certified, accepted
