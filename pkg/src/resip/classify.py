"""Verdict logic for residual properties of mapping-torus groups.

Torus bundles G_A = Z^n x| Z: residually p iff A is unipotent mod p;
the set of good primes is exactly the prime divisors of
gcd(coefficients of charpoly(A) - (x-1)^n), with gcd 0 meaning all primes.

Free fibers (rank >= 2): unipotence of the H_1 action mod p is sufficient.
For necessity we run the finite-quotient obstruction: a residually-p
mapping torus must admit an M-invariant subspace W of F_p^n with
dim(F_p^n / W) >= 2 on which the induced action has p-power order
(equivalently, is unipotent).  No qualifying quotient = NotResiduallyP;
a qualifying quotient without unipotence on the full space = Undecided.

Residual nilpotence for semidirect products with Z^n fiber reduces to
triviality of the intersection of the chain B^i(Z^n), B = A - I.  That
intersection is trivial iff B has no unimodular piece: no irreducible
factor of charpoly(B) other than x may have constant term of absolute
value 1.  (The stable rank r and stable index d are reported too, but
r > 0 with d >= 2 does not by itself force triviality: B can mix a
unimodular block with a strictly expanding one, e.g. companion blocks of
x^2-x-1 and x^2+3x+3 give r = 4, d = 3 and a nontrivial intersection.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import sympy

from .caps import Caps, DEFAULT_CAPS
from .errors import (
    CapExceeded,
    InvalidQ,
    NotInvertible,
    NotInvertibleMod,
    RankTooSmall,
    SearchSpaceTooLarge,
)
from .freegrp import MappingTorusSpec, abelianization_matrix
from .intlin import (
    IntMatrix,
    ModMatrix,
    charpoly_exact,
    det_exact,
    is_unipotent_mod,
    lattice_chain_invariants,
    poly_pow_x_minus_one,
)
from .magnus import unipotent_over_Z

RESIDUALLY_P = "ResiduallyP"
NOT_RESIDUALLY_P = "NotResiduallyP"
UNDECIDED = "Undecided"


@dataclass(frozen=True)
class Verdict:
    """Per-prime classification with a re-checkable payload."""

    p: int
    outcome: str
    certificate: Optional[dict] = None
    obstruction: Optional[dict] = None
    reason: Optional[str] = None

    def __post_init__(self):
        if self.outcome not in (RESIDUALLY_P, NOT_RESIDUALLY_P, UNDECIDED):
            raise ValueError(f"unknown outcome {self.outcome}")
        populated = [
            self.certificate is not None,
            self.obstruction is not None,
            self.reason is not None,
        ]
        if sum(populated) != 1:
            raise ValueError("exactly one payload must be set")

    def to_dict(self) -> dict:
        out = {"p": self.p, "outcome": self.outcome}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def _require_automorphism(a: IntMatrix) -> None:
    if det_exact(a) not in (1, -1):
        raise NotInvertible("matrix is not in GL_n(Z)")


def torus_residually_p(a: IntMatrix, p: int) -> Verdict:
    """Is the torus bundle group Z^n x|_A Z residually p?

    For 2x2 determinant-1 input the det(A - I) criterion is computed as
    well and any disagreement with unipotence is a hard failure.
    """
    _require_automorphism(a)
    unip = is_unipotent_mod(a, p)
    if a.n == 2 and det_exact(a) == 1:
        det_door = det_exact(a.minus_identity()) % p == 0
        assert det_door == unip.unipotent, (
            "unipotence and det(A-I) criteria disagree on an SL2 input"
        )
    if unip:
        return Verdict(
            p,
            RESIDUALLY_P,
            certificate={
                "criterion": "unipotent_mod_p",
                "nilpotency_index": unip.index,
            },
        )
    charpoly_mod = tuple(c % p for c in charpoly_exact(a))
    return Verdict(
        p,
        NOT_RESIDUALLY_P,
        obstruction={
            "criterion": "not_unipotent_mod_p",
            "charpoly_mod_p": list(charpoly_mod),
            "target": list(c % p for c in poly_pow_x_minus_one(a.n)),
        },
    )


@dataclass(frozen=True)
class PrimeSet:
    """Either all primes, or the finite set listed."""

    all_primes: bool
    primes: tuple[int, ...]
    gcd_value: int

    def contains(self, p: int) -> bool:
        return self.all_primes or p in self.primes

    def to_dict(self) -> dict:
        return {
            "all_primes": self.all_primes,
            "primes": list(self.primes),
            "gcd": self.gcd_value,
        }


def _prime_set_from_charpoly_gap(a: IntMatrix) -> PrimeSet:
    diff = [
        c - t for c, t in zip(charpoly_exact(a), poly_pow_x_minus_one(a.n))
    ]
    g = 0
    for c in diff:
        g = sympy.gcd(g, abs(c))
    g = int(g)
    if g == 0:
        return PrimeSet(True, (), 0)
    primes = tuple(sorted(int(q) for q in sympy.factorint(g)))
    return PrimeSet(False, primes, g)


def residually_p_prime_set(a: IntMatrix) -> PrimeSet:
    """Exact set of primes p for which Z^n x|_A Z is residually p.

    A is unipotent mod p iff charpoly(A) = (x-1)^n mod p, so the good
    primes are the common prime divisors of the coefficient gap.
    """
    _require_automorphism(a)
    return _prime_set_from_charpoly_gap(a)


def torus_residually_nilpotent(a: IntMatrix) -> bool:
    """Is Z^n x|_A Z residually nilpotent (= omega-nilpotent here)?"""
    _require_automorphism(a)
    return lattice_chain_invariants(a.minus_identity()).intersection_trivial


def endo_semidirect_omega_nilpotent(a: IntMatrix) -> bool:
    """omega-nilpotence of Z^n x|_A Z for an endomorphism action; A need
    not be invertible (ascending HNN case, e.g. BS(1,q) at A = [q])."""
    return lattice_chain_invariants(a.minus_identity()).intersection_trivial


@dataclass(frozen=True)
class BSSpec:
    """Baumslag-Solitar group BS(1,q) = <s,t | s t s^-1 = t^q>."""

    q: int

    def __post_init__(self):
        if self.q <= 0:
            raise InvalidQ(f"q must be >= 1, got {self.q}")


@dataclass(frozen=True)
class BSReport:
    q: int
    residually_p_primes: PrimeSet
    omega_nilpotent: bool
    trivial_case: bool  # q = 1 is Z^2, flagged but still computed

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "residually_p_primes": self.residually_p_primes.to_dict(),
            "omega_nilpotent": self.omega_nilpotent,
            "trivial_case": self.trivial_case,
        }


def bs_classify(spec: BSSpec) -> BSReport:
    """BS(1,q): residually p exactly at primes dividing q - 1; omega-
    nilpotent iff q != 2.  Cross-validated against the 1x1 matrix logic."""
    q = spec.q
    m = IntMatrix.from_rows([[q]])
    primes = _prime_set_from_charpoly_gap(m)
    # charpoly gap for [q] is |q - 1|, so this is the q-1 divisor set
    assert primes.gcd_value == abs(q - 1)
    omega = endo_semidirect_omega_nilpotent(m)
    assert omega == (q != 2), "lattice-chain criterion disagrees on BS(1,q)"
    return BSReport(q, primes, omega, trivial_case=q == 1)


# ---------------------------------------------------------------------------
# Invariant-subspace obstruction for free fibers


def _rref_key(rows: list[list[int]], p: int) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form over F_p as a canonical subspace key."""
    mat = [row[:] for row in rows]
    cols = len(mat[0]) if mat else 0
    pivot_row = 0
    for col in range(cols):
        pivot = next((r for r in range(pivot_row, len(mat)) if mat[r][col] % p), None)
        if pivot is None:
            continue
        mat[pivot_row], mat[pivot] = mat[pivot], mat[pivot_row]
        inv = pow(mat[pivot_row][col], -1, p)
        mat[pivot_row] = [(x * inv) % p for x in mat[pivot_row]]
        for r in range(len(mat)):
            if r != pivot_row and mat[r][col] % p:
                f = mat[r][col] % p
                mat[r] = [(x - f * y) % p for x, y in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
    return tuple(tuple(row) for row in mat[:pivot_row])


def _apply(m: ModMatrix, v: tuple[int, ...]) -> tuple[int, ...]:
    p = m.modulus
    return tuple(
        sum(m.entries[i][j] * v[j] for j in range(m.n)) % p for i in range(m.n)
    )


def _span_contains(basis: tuple[tuple[int, ...], ...], v: tuple[int, ...], p: int) -> bool:
    reduced = list(v)
    for row in basis:
        col = next(i for i, x in enumerate(row) if x)  # pivot of RREF row
        f = reduced[col] % p
        if f:
            reduced = [(x - f * y) % p for x, y in zip(reduced, row)]
    return not any(x % p for x in reduced)


def _cyclic_subspace(m: ModMatrix, v: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    rows = [list(v)]
    key = _rref_key(rows, m.modulus)
    while True:
        grew = False
        for row in key:
            image = _apply(m, row)
            if not _span_contains(key, image, m.modulus):
                rows = [list(r) for r in key] + [list(image)]
                key = _rref_key(rows, m.modulus)
                grew = True
        if not grew:
            return key


@dataclass(frozen=True)
class ObstructionResult:
    exists: bool
    witness: Optional[dict]  # {"subspace": rows, "quotient_dim": d, "order": p^s}
    examined: int

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "witness": self.witness,
            "examined": self.examined,
        }


def _quotient_matrix(m: ModMatrix, w_basis: tuple[tuple[int, ...], ...]) -> IntMatrix:
    """Matrix of the action induced on F_p^n / W, in the coordinates of the
    non-pivot standard basis vectors."""
    p = m.modulus
    n = m.n
    pivots = [next(i for i, x in enumerate(row) if x) for row in w_basis]
    free = [j for j in range(n) if j not in pivots]

    def reduce_mod_w(v: tuple[int, ...]) -> list[int]:
        out = list(v)
        for row, c in zip(w_basis, pivots):
            f = out[c] % p
            if f:
                out = [(x - f * y) % p for x, y in zip(out, row)]
        return out

    cols = []
    for j in free:
        e = tuple(1 if i == j else 0 for i in range(n))
        image = reduce_mod_w(_apply(m, e))
        assert all(image[c] % p == 0 for c in pivots)
        cols.append([image[i] % p for i in free])
    d = len(free)
    return IntMatrix.from_rows([[cols[j][i] for j in range(d)] for i in range(d)])


def _unipotent_order(q: IntMatrix, p: int) -> int:
    """Order of a unipotent matrix mod p: the least power p^s with
    q^(p^s) = I."""
    power = ModMatrix.reduce(q, p)
    order = 1
    while not power.is_identity():
        power = power ** p
        order *= p
    return order


def p_power_order_quotient_exists(
    m: ModMatrix, p: int, caps: Caps = DEFAULT_CAPS
) -> ObstructionResult:
    """Search for an M-invariant subspace W of F_p^n with quotient
    dimension >= 2 on which the induced action has p-power order.

    In GL_d(F_p) having p-power order is the same as being unipotent, so
    the test per subspace is unipotence of the quotient action.  The
    enumeration is exhaustive: every invariant subspace is a join of
    cyclic subspaces, so closing the cyclic ones under pairwise join
    reaches all of them.  Deterministic lexicographic order throughout.
    """
    if m.modulus != p:
        raise ValueError("matrix must be over F_p")
    n = m.n
    if n < 2:
        raise RankTooSmall("obstruction needs dimension >= 2")
    if det_exact(IntMatrix.from_rows([list(r) for r in m.entries])) % p == 0:
        raise NotInvertibleMod("matrix not invertible mod p")
    unip = is_unipotent_mod(IntMatrix.from_rows([list(r) for r in m.entries]), p)
    if unip:
        # the zero subspace qualifies: quotient is the whole space
        order = _unipotent_order(IntMatrix.from_rows([list(r) for r in m.entries]), p)
        return ObstructionResult(
            True,
            {"subspace": [], "quotient_dim": n, "order": order},
            examined=1,
        )
    if p ** n > caps.subspace_vectors:
        raise SearchSpaceTooLarge(
            f"p^n = {p ** n} exceeds cap {caps.subspace_vectors}"
        )

    def projective_vectors():
        # one representative per line: first nonzero coordinate is 1
        v = [0] * n
        while True:
            i = n - 1
            while i >= 0 and v[i] == p - 1:
                v[i] = 0
                i -= 1
            if i < 0:
                return
            v[i] += 1
            first = next(x for x in v if x)
            if first == 1:
                yield tuple(v)

    # seed: cyclic subspaces, one per line (lines spanning the same cyclic
    # subspace collapse under the RREF key)
    seeds = set()
    for v in projective_vectors():
        seeds.add(_cyclic_subspace(m, v))
        if len(seeds) > caps.subspace_count:
            raise SearchSpaceTooLarge("invariant subspace count exceeds cap")
    # close under pairwise join
    family = set(seeds)
    family.add(())
    frontier = list(seeds)
    while frontier:
        new = []
        for a in frontier:
            for b in family.copy():
                if not b:
                    continue
                joined = _rref_key([list(r) for r in a + b], p)
                if joined not in family:
                    family.add(joined)
                    new.append(joined)
                    if len(family) > caps.subspace_count:
                        raise SearchSpaceTooLarge(
                            "invariant subspace count exceeds cap"
                        )
        frontier = new
    examined = 0
    for key in sorted(family):
        dim = len(key)
        if n - dim < 2:
            continue
        examined += 1
        q = _quotient_matrix(m, key)
        if is_unipotent_mod(q, p):
            return ObstructionResult(
                True,
                {
                    "subspace": [list(r) for r in key],
                    "quotient_dim": n - dim,
                    "order": _unipotent_order(q, p),
                },
                examined=examined,
            )
    return ObstructionResult(False, None, examined=examined)


def free_fiber_residually_p(
    spec: MappingTorusSpec, p: int, caps: Caps = DEFAULT_CAPS
) -> Verdict:
    """Three-valued verdict for a mapping torus with free fiber of rank >= 2.

    Reads only the abelianization mod p, which is what makes the verdict
    invariant under composition with mod-p Torelli automorphisms.
    """
    if spec.rank < 2:
        raise RankTooSmall("rank-1 fibers are torus/BS territory")
    a = abelianization_matrix(spec.fiber)
    unip = is_unipotent_mod(a, p)
    if unip:
        return Verdict(
            p,
            RESIDUALLY_P,
            certificate={
                "criterion": "unipotent_on_H1_mod_p",
                "nilpotency_index": unip.index,
                "abelianization": [list(r) for r in a.entries],
            },
        )
    try:
        obstruction = p_power_order_quotient_exists(ModMatrix.reduce(a, p), p, caps)
    except SearchSpaceTooLarge as exc:
        return Verdict(p, UNDECIDED, reason=f"obstruction search too large: {exc}")
    except NotInvertibleMod:
        # H_1 action degenerate mod p; the obstruction argument needs an
        # invertible action, so no decision either way
        return Verdict(p, UNDECIDED, reason="H_1 action not invertible mod p")
    if not obstruction.exists:
        return Verdict(
            p,
            NOT_RESIDUALLY_P,
            obstruction={
                "criterion": "no_p_power_invariant_quotient",
                "examined_subspaces": obstruction.examined,
                "abelianization": [list(r) for r in a.entries],
            },
        )
    return Verdict(
        p,
        UNDECIDED,
        reason=(
            "not unipotent mod p, but an invariant quotient with p-power "
            "order exists; no criterion applies"
        ),
    )


def sl2_power_divisibility(
    a: IntMatrix, p: int, cap: Optional[int] = None
) -> int:
    """Least k >= 1 with p | det(A^k - I), for A in SL_2(Z).

    The default cap p(p^2 - 1) always suffices: eigenvalue orders in
    F_{p^2}* divide p^2 - 1 and a unipotent part contributes p.
    """
    if a.n != 2 or det_exact(a) != 1:
        raise NotInvertible("need a 2x2 integer matrix of determinant 1")
    if cap is None:
        cap = p * (p * p - 1)
    base = ModMatrix.reduce(a, p)
    ident = ModMatrix.identity(2, p)
    power = base
    for k in range(1, cap + 1):
        diff_det = (
            (power.entries[0][0] - 1) * (power.entries[1][1] - 1)
            - power.entries[0][1] * power.entries[1][0]
        ) % p
        if diff_det == 0:
            return k
        power = power * base
    raise CapExceeded("sl2_power_divisibility", cap)


def rtfn_sufficient(
    spec: MappingTorusSpec, c: int, caps: Caps = DEFAULT_CAPS
) -> bool:
    """Sufficiency certificate for residual torsion-free nilpotence:
    unipotence over Z on all lower-central layers up to c.  False means
    "no certificate", not a refutation."""
    return unipotent_over_Z(spec.fiber, c, caps)


def primes_up_to(bound: int) -> list[int]:
    return [int(p) for p in sympy.primerange(2, bound + 1)]
