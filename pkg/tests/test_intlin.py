"""Exact integer linear algebra: determinants, charpolys, unipotence,
orders mod p^k, and the stabilized lattice chain B^i(Z^n)."""

import random

import pytest
import sympy

from resip import (
    CapExceeded,
    IntMatrix,
    NotInvertibleMod,
    charpoly_exact,
    det_exact,
    is_unipotent_mod,
    lattice_chain_invariants,
    matrix_order_mod,
    poly_divmod,
    poly_pow_x_minus_one,
    rank_exact,
    smith_diagonal,
)

A_SOL = IntMatrix.from_rows([[2, 1], [1, 1]])
A_SOL_CUBED = IntMatrix.from_rows([[13, 8], [8, 5]])


def _random_matrix(rng, n, lo=-9, hi=9):
    return IntMatrix.from_rows(
        [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
    )


def test_matrix_construction_rejects_bad_shapes():
    with pytest.raises(Exception):
        IntMatrix.from_rows([[1, 2], [3]])
    with pytest.raises(Exception):
        IntMatrix.from_rows([])
    with pytest.raises(Exception):
        IntMatrix.from_rows([[1.5]])


def test_matrix_power_and_fixture_cube():
    assert (A_SOL ** 3).entries == A_SOL_CUBED.entries
    assert (A_SOL ** 0).entries == IntMatrix.identity(2).entries


def test_det_fixtures():
    assert det_exact(A_SOL.minus_identity()) == -1
    assert det_exact(IntMatrix.from_rows([[12, 8], [8, 4]])) == -16
    assert det_exact(IntMatrix.identity(4)) == 1


def test_det_multiplicative_random():
    rng = random.Random(7)
    for _ in range(100):
        m = _random_matrix(rng, 3)
        n = _random_matrix(rng, 3)
        assert det_exact(m * n) == det_exact(m) * det_exact(n)


def test_charpoly_fixtures():
    assert charpoly_exact(A_SOL) == (1, -3, 1)
    assert charpoly_exact(A_SOL_CUBED) == (1, -18, 1)
    assert charpoly_exact(IntMatrix.identity(2)) == (1, -2, 1)


def test_charpoly_matches_sympy_on_random_matrices():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 4)
        m = _random_matrix(rng, n)
        ours = charpoly_exact(m)
        theirs = sympy.Matrix(m.rows()).charpoly().all_coeffs()
        assert list(ours) == [int(c) for c in theirs]


def test_charpoly_constant_term_is_signed_det():
    rng = random.Random(13)
    for _ in range(40):
        n = rng.randint(1, 4)
        m = _random_matrix(rng, n)
        cp = charpoly_exact(m)
        assert cp[-1] == (-1) ** n * det_exact(m)


def test_unipotence_fixtures():
    assert is_unipotent_mod(A_SOL_CUBED, 2)
    assert not is_unipotent_mod(A_SOL, 2)
    res = is_unipotent_mod(IntMatrix.identity(3), 7)
    assert res and res.index == 1


def test_unipotence_agrees_with_direct_power():
    rng = random.Random(17)
    for _ in range(250):
        n = rng.randint(1, 4)
        p = rng.choice([2, 3, 5, 7])
        m = _random_matrix(rng, n, -6, 6)
        b = m.minus_identity()
        direct = all(
            x % p == 0 for row in (b ** n).entries for x in row
        )
        assert bool(is_unipotent_mod(m, p)) == direct


def test_unipotence_charpoly_characterization():
    # unipotent mod p iff charpoly = (x-1)^n mod p
    rng = random.Random(19)
    for _ in range(150):
        n = rng.randint(1, 4)
        p = rng.choice([2, 3, 5])
        m = _random_matrix(rng, n, -5, 5)
        gap = [
            (c - t) % p
            for c, t in zip(charpoly_exact(m), poly_pow_x_minus_one(n))
        ]
        assert bool(is_unipotent_mod(m, p)) == all(g == 0 for g in gap)


def test_matrix_order_fixtures():
    assert matrix_order_mod(A_SOL, 2, 1, 100) == 3
    assert matrix_order_mod(IntMatrix.identity(2), 5, 2, 10) == 1
    cycle = IntMatrix.from_rows([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert matrix_order_mod(cycle, 2, 1, 10) == 3


def test_matrix_order_errors():
    with pytest.raises(NotInvertibleMod):
        matrix_order_mod(IntMatrix.from_rows([[2, 0], [0, 1]]), 2, 1, 10)
    with pytest.raises(CapExceeded):
        matrix_order_mod(A_SOL, 5, 3, 2)


def test_matrix_order_is_the_least_period():
    rng = random.Random(23)
    found = 0
    while found < 30:
        m = _random_matrix(rng, 2, -4, 4)
        p, k = rng.choice([(2, 1), (3, 1), (3, 2), (5, 1)])
        if det_exact(m) % p == 0:
            continue
        found += 1
        order = matrix_order_mod(m, p, k, 10 ** 6)
        mod = p ** k
        power = m ** order
        assert all(
            power.entries[i][j] % mod == (1 if i == j else 0) % mod
            for i in range(2)
            for j in range(2)
        )
        for j in range(1, order):
            pj = m ** j
            assert any(
                pj.entries[r][c] % mod != (1 if r == c else 0) % mod
                for r in range(2)
                for c in range(2)
            )


def test_poly_divmod_exact():
    # (x^2-3x+1)(x^3-1) = x^5-3x^4+x^3-x^2+3x-1
    num = (1, -3, 1, -1, 3, -1)
    q, r = poly_divmod(num, (1, -3, 1))
    assert q == (1, 0, 0, -1) and all(c == 0 for c in r)
    q, r = poly_divmod((1, 0, 1), (1, 1))
    assert q == (1, -1) and r == (2,)


def test_lattice_chain_fixtures():
    fib = lattice_chain_invariants(IntMatrix.from_rows([[1, 1], [1, 0]]))
    assert (fib.stable_rank, fib.stable_index) == (2, 1)
    assert not fib.intersection_trivial

    bs4 = lattice_chain_invariants(IntMatrix.from_rows([[3]]))
    assert (bs4.stable_rank, bs4.stable_index) == (1, 3)
    assert bs4.intersection_trivial

    nil = lattice_chain_invariants(IntMatrix.from_rows([[0, 1], [0, 0]]))
    assert nil.stable_rank == 0 and nil.intersection_trivial


def test_lattice_chain_mixed_block_regression():
    """Companion blocks of x^2-x-1 and x^2+3x+3 glued diagonally.

    Both factors have constant term of absolute value 1 and are != x, so
    the chain intersection is all ofZ^4 in the first block's span even
    though the stable index d = 3 is >= 2.  Guards against reading d >= 2
    alone as triviality.
    """
    b = IntMatrix.from_rows(
        [
            [0, 1, 0, 0],
            [1, 1, 0, 0],
            [0, 0, 0, -3],
            [0, 0, 1, -3],
        ]
    )
    inv = lattice_chain_invariants(b)
    assert inv.stable_rank == 4
    assert inv.stable_index == 3
    assert not inv.intersection_trivial
    # the glued matrix is A - I for a genuine automorphism of Z^4
    a = b + IntMatrix.identity(4)
    assert det_exact(a) in (1, -1)


def test_lattice_chain_conjugation_invariance():
    rng = random.Random(29)
    b = IntMatrix.from_rows([[2, 1], [0, 3]])
    base = lattice_chain_invariants(b)
    for _ in range(10):
        # random GL_2(Z) conjugator from elementary moves
        u = IntMatrix.identity(2)
        for _ in range(6):
            e = IntMatrix.identity(2).rows()
            i, j = rng.sample([0, 1], 2)
            e[i][j] = rng.choice([-1, 1])
            u = u * IntMatrix.from_rows(e)
        uinv = _integer_inverse(u)
        conj = lattice_chain_invariants(u * b * uinv)
        assert (conj.stable_rank, conj.stable_index) == (
            base.stable_rank,
            base.stable_index,
        )
        assert conj.intersection_trivial == base.intersection_trivial


def _integer_inverse(u: IntMatrix) -> IntMatrix:
    d = det_exact(u)
    assert d in (1, -1)
    (a, b), (c, e) = u.entries
    return IntMatrix.from_rows([[e * d, -b * d], [-c * d, a * d]])


def test_rank_and_smith_basics():
    assert rank_exact(IntMatrix.from_rows([[1, 2], [2, 4]])) == 1
    assert rank_exact(IntMatrix.identity(3)) == 3
    assert smith_diagonal(IntMatrix.from_rows([[2, 0], [0, 3]])) == [1, 6]


def test_rank_agrees_with_sympy():
    rng = random.Random(31)
    for _ in range(40):
        n = rng.randint(1, 4)
        m = _random_matrix(rng, n, -5, 5)
        assert rank_exact(m) == sympy.Matrix(m.rows()).rank()
