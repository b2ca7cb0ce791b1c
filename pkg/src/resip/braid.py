"""Braids acting on free groups, and finite cyclic covers of the wedge.

Artin action of B_n on F_n = pi_1(n-punctured disk):
    sigma_i:   x_i -> x_i x_{i+1} x_i^-1,  x_{i+1} -> x_i
    sigma_i^-1: x_i -> x_{i+1},            x_{i+1} -> x_{i+1}^-1 x_i x_{i+1}

CONVENTION: in a braid word read left to right, the leftmost letter acts
first, so the endomorphism of "s1 S2" is (action of S2) after (action of s1).

Braid text syntax mirrors word syntax: "s1 S2" with uppercase = inverse.

Covers here are coset graphs of kernels of F_n -> Z/m (generator g sent to
assignment a_g).  The Schreier basis is fixed by a breadth-first spanning
tree from the base vertex with generators tried in index order, so induced
homology matrices are reproducible bit for bit.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Optional

from .errors import InvalidSpec, NotInvariant, NotTransitive, RankMismatch
from .freegrp import (
    FreeEndo,
    FreeWord,
    abelianization_matrix,
    apply_endo,
    compose_endos,
)
from .intlin import IntMatrix


@dataclass(frozen=True)
class BraidWord:
    """Word in B_strands; letters are signed generator indices in 1..strands-1."""

    strands: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.strands < 2:
            raise InvalidSpec("braid group needs at least 2 strands")
        for a in self.letters:
            if a == 0 or abs(a) > self.strands - 1:
                raise InvalidSpec(f"braid letter {a} out of range")

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-a for a in reversed(self.letters)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if self.strands != other.strands:
            raise RankMismatch("strand counts differ")
        return BraidWord(self.strands, self.letters + other.letters)

    def __pow__(self, k: int) -> "BraidWord":
        if k < 0:
            return self.inverse() ** (-k)
        return BraidWord(self.strands, self.letters * k)


_TOKEN = re.compile(r"^([sS])(\d+)$")


def parse_braid(text: str, strands: int) -> BraidWord:
    """Parse "s1 S2" style input; empty or "1" is the trivial braid."""
    tokens = text.split()
    if not tokens or tokens == ["1"]:
        return BraidWord(strands, ())
    letters = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise InvalidSpec(f"bad braid token {tok!r}")
        idx = int(m.group(2))
        letters.append(idx if m.group(1) == "s" else -idx)
    return BraidWord(strands, tuple(letters))


def format_braid(b: BraidWord) -> str:
    if not b.letters:
        return "1"
    return " ".join(f"s{a}" if a > 0 else f"S{-a}" for a in b.letters)


def _elementary_endo(strands: int, letter: int) -> FreeEndo:
    n = strands
    i = abs(letter)
    images = []
    inverses = []
    for g in range(1, n + 1):
        if g == i:
            images.append(FreeWord.from_letters(n, (i, i + 1, -i)))
            inverses.append(FreeWord.generator(n, i + 1))
        elif g == i + 1:
            images.append(FreeWord.generator(n, i))
            inverses.append(FreeWord.from_letters(n, (-(i + 1), i, i + 1)))
        else:
            images.append(FreeWord.generator(n, g))
            inverses.append(FreeWord.generator(n, g))
    endo = FreeEndo(n, tuple(images), tuple(inverses))
    return endo if letter > 0 else endo.inverse_endo()


def artin_endo(b: BraidWord) -> FreeEndo:
    """Automorphism of F_strands induced by the braid, with certified inverse."""
    endo = FreeEndo.identity(b.strands)
    for a in b.letters:
        endo = compose_endos(_elementary_endo(b.strands, a), endo)
    return endo


def braid_permutation(b: BraidWord) -> tuple[tuple[int, ...], bool]:
    """Image in S_n as a tuple (perm[i-1] = image of strand i), plus purity."""
    n = b.strands
    perm = list(range(1, n + 1))
    for a in b.letters:
        i = abs(a)
        # each generator induces the transposition (i, i+1)
        lo = perm.index(i)
        hi = perm.index(i + 1)
        perm[lo], perm[hi] = perm[hi], perm[lo]
    result = tuple(perm)
    return result, result == tuple(range(1, n + 1))


def permutation_order(perm: tuple[int, ...]) -> int:
    order = 1
    seen = set()
    for start in range(len(perm)):
        if start in seen:
            continue
        length = 0
        v = start
        while v not in seen:
            seen.add(v)
            v = perm[v] - 1
            length += 1
        order = order * length // gcd(order, length)
    return order


@dataclass(frozen=True)
class CoverGraph:
    """Coset graph of ker(F_rank -> Z/m), generator g acting by +a_g.

    Vertices are 0..m-1 with base 0; the edge labelled g at vertex v goes to
    v + a_g mod m.
    """

    rank: int
    modulus: int
    assignments: tuple[int, ...]

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidSpec("cover index must be >= 1")
        if len(self.assignments) != self.rank:
            raise RankMismatch("one assignment per generator required")
        if any(not 0 <= a < self.modulus for a in self.assignments):
            raise InvalidSpec("assignments must be reduced mod m")
        if gcd(self.modulus, *self.assignments) != 1 and self.modulus > 1:
            raise NotTransitive(
                f"assignments {self.assignments} do not generate Z/{self.modulus}"
            )

    @property
    def subgroup_rank(self) -> int:
        # Euler characteristic of the cover graph: rank = E - V + 1
        return self.modulus * (self.rank - 1) + 1

    def chi(self, w: FreeWord) -> int:
        """Image of w in Z/m."""
        total = 0
        for a in w.letters:
            total += self.assignments[abs(a) - 1] if a > 0 else -self.assignments[abs(a) - 1]
        return total % self.modulus

    def _spanning_tree(self) -> list[Optional[tuple[int, int]]]:
        """parent[v] = (u, g) for the BFS tree edge u --g--> v; None at base."""
        m = self.modulus
        parent: list[Optional[tuple[int, int]]] = [None] * m
        seen = [False] * m
        seen[0] = True
        queue = [0]
        while queue:
            v = queue.pop(0)
            for g in range(1, self.rank + 1):
                w = (v + self.assignments[g - 1]) % m
                if not seen[w]:
                    seen[w] = True
                    parent[w] = (v, g)
                    queue.append(w)
        if not all(seen):
            raise NotTransitive("cover graph disconnected")
        return parent

    def _tree_paths(self) -> list[tuple[int, ...]]:
        """Letter sequence of the tree path base -> v, for each vertex v."""
        parent = self._spanning_tree()
        paths: list[Optional[tuple[int, ...]]] = [None] * self.modulus
        paths[0] = ()

        def path(v: int) -> tuple[int, ...]:
            if paths[v] is None:
                u, g = parent[v]
                paths[v] = path(u) + (g,)
            return paths[v]

        for v in range(self.modulus):
            path(v)
        return paths  # type: ignore[return-value]

    def schreier_edges(self) -> list[tuple[int, int]]:
        """Non-tree edges (v, g), the index set of the Schreier basis,
        ordered by vertex then generator."""
        parent = self._spanning_tree()
        tree = {(pg[0], pg[1], v) for v, pg in enumerate(parent) if pg is not None}
        edges = []
        for v in range(self.modulus):
            for g in range(1, self.rank + 1):
                w = (v + self.assignments[g - 1]) % self.modulus
                if (v, g, w) not in tree:
                    edges.append((v, g))
        return edges

    def schreier_basis_words(self) -> list[FreeWord]:
        """The basis loops: tree path to v, edge g, tree path back."""
        paths = self._tree_paths()
        words = []
        for v, g in self.schreier_edges():
            w = (v + self.assignments[g - 1]) % self.modulus
            letters = paths[v] + (g,) + tuple(-a for a in reversed(paths[w]))
            words.append(FreeWord.from_letters(self.rank, letters))
        return words

    def trace_loop(self, w: FreeWord) -> tuple[int, ...]:
        """Read w as a loop at the base; return its letters in the Schreier
        basis (signed indices).  NotInvariant if w does not close up."""
        if w.rank != self.rank:
            raise RankMismatch("word rank differs from cover rank")
        index = {edge: i + 1 for i, edge in enumerate(self.schreier_edges())}
        out: list[int] = []
        v = 0
        for a in w.letters:
            g = abs(a)
            step = self.assignments[g - 1]
            if a > 0:
                edge = (v, g)
                v = (v + step) % self.modulus
                if edge in index:
                    out.append(index[edge])
            else:
                v = (v - step) % self.modulus
                edge = (v, g)
                if edge in index:
                    out.append(-index[edge])
        if v != 0:
            raise NotInvariant("word is not a loop at the base vertex")
        return tuple(out)


def cover_from_finite_quotient(rank: int, assignments, modulus: int) -> CoverGraph:
    """Cover attached to F_rank -> Z/modulus, x_g -> assignments[g-1]."""
    reduced = tuple(a % modulus for a in assignments)
    return CoverGraph(rank, modulus, reduced)


def endo_preserves_cover(phi: FreeEndo, cover: CoverGraph) -> bool:
    """Does phi map the cover subgroup into itself?

    Checked on the Schreier generators: each basis loop's image must again
    be readable as a loop, i.e. die under chi.  (Checking chi(phi(x_i)) =
    chi(x_i) for all i is sufficient but not necessary; the subgroup only
    needs chi(phi(w)) = 0 whenever chi(w) = 0.)
    """
    if phi.rank != cover.rank:
        raise RankMismatch("endo rank differs from cover rank")
    return all(
        cover.chi(apply_endo(phi, s)) == 0 for s in cover.schreier_basis_words()
    )


def induced_cover_homology(phi: FreeEndo, cover: CoverGraph) -> IntMatrix:
    """Matrix of phi on H_1 of the cover in the fixed Schreier basis.

    Column j is the abelianized rewrite of phi(basis loop j).
    """
    if not endo_preserves_cover(phi, cover):
        raise NotInvariant("endomorphism does not preserve the cover subgroup")
    basis = cover.schreier_basis_words()
    r = cover.subgroup_rank
    assert len(basis) == r
    cols = []
    for s in basis:
        letters = cover.trace_loop(apply_endo(phi, s))
        sums = [0] * r
        for a in letters:
            sums[abs(a) - 1] += 1 if a > 0 else -1
        cols.append(sums)
    return IntMatrix.from_rows([[cols[j][i] for j in range(r)] for i in range(r)])


def is_cyclotomic_product(coeffs: tuple[int, ...]) -> bool:
    """Does the monic integer polynomial divide a product of cyclotomics,
    i.e. are all its roots roots of unity?  Checked by exact factorization:
    every irreducible factor must be x or a cyclotomic polynomial."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(coeffs), x)
    if poly.degree() == 0:
        return True
    for factor, _ in poly.factor_list()[1]:
        if factor == sympy.Poly(x, x):
            return False  # root 0 is not a root of unity
        deg = factor.degree()
        found = False
        # cyclotomic_poly(k) has degree phi(k); phi(k) >= sqrt(k/2), so
        # k <= 2*deg^2 + 1 bounds the search
        for k in range(1, 2 * deg * deg + 2):
            if factor == sympy.Poly(sympy.cyclotomic_poly(k, x), x):
                found = True
                break
        if not found:
            return False
    return True


def beta_braid() -> BraidWord:
    """sigma_1 sigma_2^-1 in B_3, the once-punctured-torus monodromy braid."""
    return BraidWord(3, (1, -2))
