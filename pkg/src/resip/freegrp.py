"""Free-group words and endomorphisms.

Words live in a free group F_n with generators x1..xn.  Text syntax:
whitespace-separated letters, lowercase for a generator ("x1 x2"),
uppercase for its inverse ("X1"); "1" alone is the empty word.

CONVENTION: compose_endos(phi, rho) applies rho first, so
apply_endo(compose_endos(phi, rho), w) == apply_endo(phi, apply_endo(rho, w)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InvalidSpec, RankMismatch
from .intlin import IntMatrix

# A letter is a nonzero int: i means x_i, -i means x_i^-1.
Letter = int


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class FreeWord:
    """Freely reduced word in F_rank; letters are signed generator indices."""

    rank: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if self.rank < 1:
            raise InvalidSpec("rank must be >= 1")
        for a in self.letters:
            if a == 0 or abs(a) > self.rank:
                raise InvalidSpec(f"letter {a} out of range for rank {self.rank}")
        if any(a == -b for a, b in zip(self.letters, self.letters[1:])):
            raise InvalidSpec("word not freely reduced")

    @staticmethod
    def from_letters(rank: int, letters: Iterable[int]) -> "FreeWord":
        return FreeWord(rank, _reduce(letters))

    @staticmethod
    def identity(rank: int) -> "FreeWord":
        return FreeWord(rank, ())

    @staticmethod
    def generator(rank: int, i: int) -> "FreeWord":
        return FreeWord(rank, (i,))

    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return word_multiply(self, other)

    def inverse(self) -> "FreeWord":
        return word_inverse(self)

    def exponent_sums(self) -> list[int]:
        sums = [0] * self.rank
        for a in self.letters:
            sums[abs(a) - 1] += 1 if a > 0 else -1
        return sums


def word_multiply(u: FreeWord, v: FreeWord) -> FreeWord:
    if u.rank != v.rank:
        raise RankMismatch(f"ranks {u.rank} and {v.rank}")
    return FreeWord.from_letters(u.rank, u.letters + v.letters)


def word_inverse(u: FreeWord) -> FreeWord:
    return FreeWord(u.rank, tuple(-a for a in reversed(u.letters)))


def conjugate(u: FreeWord, by: FreeWord) -> FreeWord:
    """by * u * by^-1"""
    return word_multiply(word_multiply(by, u), word_inverse(by))


def commutator(u: FreeWord, v: FreeWord) -> FreeWord:
    """[u, v] = u v u^-1 v^-1"""
    return word_multiply(
        word_multiply(u, v), word_multiply(word_inverse(u), word_inverse(v))
    )


_TOKEN = re.compile(r"^([a-zA-Z])(\d+)$")


def parse_word(text: str, rank: int) -> FreeWord:
    """Parse "x1 X2 x1" style input; "1" or empty means the identity."""
    tokens = text.split()
    if not tokens or tokens == ["1"]:
        return FreeWord.identity(rank)
    letters = []
    for tok in tokens:
        m = _TOKEN.match(tok)
        if not m:
            raise InvalidSpec(f"bad word token {tok!r}")
        idx = int(m.group(2))
        if not 1 <= idx <= rank:
            raise InvalidSpec(f"generator index {idx} out of range 1..{rank}")
        letters.append(idx if m.group(1).islower() else -idx)
    return FreeWord.from_letters(rank, letters)


def format_word(w: FreeWord) -> str:
    if w.is_identity():
        return "1"
    return " ".join(f"x{a}" if a > 0 else f"X{-a}" for a in w.letters)


@dataclass(frozen=True)
class FreeEndo:
    """Endomorphism of F_rank by generator images.

    certified_inverse, when given, is checked: both compositions must fix
    every generator.  Classifiers require it (they only accept genuine
    automorphisms).
    """

    rank: int
    images: tuple[FreeWord, ...]
    certified_inverse: Optional[tuple[FreeWord, ...]] = None

    def __post_init__(self):
        if len(self.images) != self.rank:
            raise RankMismatch("need one image per generator")
        for w in self.images:
            if w.rank != self.rank:
                raise RankMismatch("image rank differs from endo rank")
        if self.certified_inverse is not None:
            inv = FreeEndo(self.rank, self.certified_inverse)
            for i in range(1, self.rank + 1):
                g = FreeWord.generator(self.rank, i)
                if apply_endo(inv, self.images[i - 1]) != g:
                    raise InvalidSpec(f"claimed inverse fails on x{i} (left)")
                if self.apply_raw(self.certified_inverse[i - 1]) != g:
                    raise InvalidSpec(f"claimed inverse fails on x{i} (right)")

    @staticmethod
    def identity(rank: int) -> "FreeEndo":
        gens = tuple(FreeWord.generator(rank, i) for i in range(1, rank + 1))
        return FreeEndo(rank, gens, gens)

    @staticmethod
    def from_images(
        images: Sequence[FreeWord],
        inverse_images: Optional[Sequence[FreeWord]] = None,
    ) -> "FreeEndo":
        rank = images[0].rank
        inv = tuple(inverse_images) if inverse_images is not None else None
        return FreeEndo(rank, tuple(images), inv)

    def apply_raw(self, w: FreeWord) -> FreeWord:
        letters: list[int] = []
        for a in w.letters:
            img = self.images[abs(a) - 1]
            letters.extend(img.letters if a > 0 else word_inverse(img).letters)
        return FreeWord.from_letters(self.rank, letters)

    @property
    def is_certified(self) -> bool:
        return self.certified_inverse is not None

    def inverse_endo(self) -> "FreeEndo":
        if self.certified_inverse is None:
            raise InvalidSpec("no certified inverse attached")
        return FreeEndo(self.rank, self.certified_inverse, self.images)


def apply_endo(phi: FreeEndo, w: FreeWord) -> FreeWord:
    if phi.rank != w.rank:
        raise RankMismatch(f"endo rank {phi.rank} vs word rank {w.rank}")
    return phi.apply_raw(w)


def compose_endos(phi: FreeEndo, rho: FreeEndo) -> FreeEndo:
    """phi after rho (rho acts first)."""
    if phi.rank != rho.rank:
        raise RankMismatch(f"ranks {phi.rank} and {rho.rank}")
    images = tuple(phi.apply_raw(w) for w in rho.images)
    inverse = None
    if phi.certified_inverse is not None and rho.certified_inverse is not None:
        rho_inv = FreeEndo(rho.rank, rho.certified_inverse)
        inverse = tuple(rho_inv.apply_raw(w) for w in phi.certified_inverse)
    return FreeEndo(phi.rank, images, inverse)


def endo_power(phi: FreeEndo, k: int) -> FreeEndo:
    if k < 0:
        return endo_power(phi.inverse_endo(), -k)
    result = FreeEndo.identity(phi.rank)
    for _ in range(k):
        result = compose_endos(phi, result)
    return result


def abelianization_matrix(phi: FreeEndo) -> IntMatrix:
    """Entry (i,j) = exponent sum of x_i in phi(x_j); columns are images."""
    n = phi.rank
    cols = [w.exponent_sums() for w in phi.images]
    return IntMatrix.from_rows([[cols[j][i] for j in range(n)] for i in range(n)])


def is_mod_p_torelli(phi: FreeEndo, p: int) -> bool:
    """Does phi act trivially on H_1 mod p?"""
    m = abelianization_matrix(phi)
    ident = IntMatrix.identity(phi.rank)
    return all(
        (a - b) % p == 0
        for ra, rb in zip(m.entries, ident.entries)
        for a, b in zip(ra, rb)
    )


def inner_automorphism(u: FreeWord) -> FreeEndo:
    """Conjugation w -> u w u^-1, with its obvious inverse."""
    rank = u.rank
    images = tuple(
        conjugate(FreeWord.generator(rank, i), u) for i in range(1, rank + 1)
    )
    inv = tuple(
        conjugate(FreeWord.generator(rank, i), word_inverse(u))
        for i in range(1, rank + 1)
    )
    return FreeEndo(rank, images, inv)


def nielsen_transvection(rank: int, i: int, j: int) -> FreeEndo:
    """x_i -> x_i x_j, other generators fixed.  Requires i != j."""
    if i == j:
        raise InvalidSpec("transvection needs distinct indices")
    images = []
    inverses = []
    for g in range(1, rank + 1):
        if g == i:
            images.append(FreeWord.from_letters(rank, (i, j)))
            inverses.append(FreeWord.from_letters(rank, (i, -j)))
        else:
            images.append(FreeWord.generator(rank, g))
            inverses.append(FreeWord.generator(rank, g))
    return FreeEndo(rank, tuple(images), tuple(inverses))


@dataclass(frozen=True)
class MappingTorusSpec:
    """A mapping torus of a free group: fiber F_n, monodromy a certified
    automorphism, stable letter t acting by the monodromy."""

    fiber: FreeEndo
    description: str = ""

    def __post_init__(self):
        if not self.fiber.is_certified:
            raise InvalidSpec("mapping torus monodromy must carry a certified inverse")

    @property
    def rank(self) -> int:
        return self.fiber.rank


@dataclass(frozen=True)
class MappingTorusElement:
    """Normal form t^m * w with w in the fiber."""

    t_exponent: int
    fiber_word: FreeWord

    def is_identity(self) -> bool:
        return self.t_exponent == 0 and self.fiber_word.is_identity()
