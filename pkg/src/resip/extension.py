"""Central extensions from 2-cocycles (factor functions).

Group law on A x Q: (a, g)(b, h) = (a + b + f(g, h), g + h), with f a
normalized 2-cocycle Q x Q -> A.  Two cocycle representations are
supported: a bilinear integer form on Q = Z^r (enough for the Heisenberg
group and all circle-bundle witnesses) and an explicit table on a small
finite group.  Everything is abelian-base here, written additively.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InvalidSpec, NotHomomorphism
from .intlin import IntMatrix


@dataclass(frozen=True)
class BilinearCocycle:
    """f(u, v) = u^T F v on Z^r, values in Z or Z/m.

    Bilinearity makes the cocycle identity automatic: both sides of
    f(g,h) + f(g+h,k) = f(h,k) + f(g,h+k) expand to
    f(g,h) + f(g,k) + f(h,k).
    """

    form: tuple[tuple[int, ...], ...]
    coeff_modulus: Optional[int] = None

    def __post_init__(self):
        r = len(self.form)
        if r == 0 or any(len(row) != r for row in self.form):
            raise InvalidSpec("bilinear form must be square and nonempty")

    @property
    def r(self) -> int:
        return len(self.form)

    def __call__(self, u: Sequence[int], v: Sequence[int]) -> int:
        if len(u) != self.r or len(v) != self.r:
            raise InvalidSpec("argument length differs from base rank")
        total = sum(
            u[i] * self.form[i][j] * v[j]
            for i in range(self.r)
            for j in range(self.r)
        )
        return total % self.coeff_modulus if self.coeff_modulus else total

    def base_add(self, u, v):
        return tuple(a + b for a, b in zip(u, v))

    def base_neg(self, u):
        return tuple(-a for a in u)

    def base_zero(self):
        return (0,) * self.r


@dataclass(frozen=True)
class TableCocycle:
    """Explicit cocycle on a small additive group given by element list.

    elements: hashable labels; add/neg give the group structure; table maps
    (g, h) to the coefficient value.
    """

    elements: tuple
    add: dict
    neg: dict
    zero: object
    table: dict
    coeff_modulus: Optional[int] = None

    def __call__(self, g, h):
        v = self.table[(g, h)]
        return v % self.coeff_modulus if self.coeff_modulus else v

    def base_add(self, g, h):
        return self.add[(g, h)]

    def base_neg(self, g):
        return self.neg[g]

    def base_zero(self):
        return self.zero


@dataclass(frozen=True)
class CocycleCheck:
    ok: bool
    violation: Optional[tuple] = None  # (g, h, k) with the identity broken


def verify_cocycle(f, samples: int = 200, seed: int = 0) -> CocycleCheck:
    """Check normalization and the cocycle identity.

    Table cocycles are checked exhaustively; bilinear ones on seeded
    sampled triples with entries in [-5, 5] (the identity also holds
    symbolically, which the bilinear docstring records).
    """
    if isinstance(f, TableCocycle):
        zero = f.base_zero()
        for g in f.elements:
            if f(zero, g) != 0 or f(g, zero) != 0:
                return CocycleCheck(False, (zero, g, zero))
        for g in f.elements:
            for h in f.elements:
                for k in f.elements:
                    lhs = f(g, h) + f(f.base_add(g, h), k)
                    rhs = f(h, k) + f(g, f.base_add(h, k))
                    if f.coeff_modulus:
                        lhs %= f.coeff_modulus
                        rhs %= f.coeff_modulus
                    if lhs != rhs:
                        return CocycleCheck(False, (g, h, k))
        return CocycleCheck(True)
    rng = random.Random(seed)
    zero = f.base_zero()
    for _ in range(samples):
        g, h, k = (
            tuple(rng.randint(-5, 5) for _ in range(f.r)) for _ in range(3)
        )
        if f(zero, g) != 0 or f(g, zero) != 0:
            return CocycleCheck(False, (zero, g, zero))
        lhs = f(g, h) + f(f.base_add(g, h), k)
        rhs = f(h, k) + f(g, f.base_add(h, k))
        if f.coeff_modulus:
            lhs %= f.coeff_modulus
            rhs %= f.coeff_modulus
        if lhs != rhs:
            return CocycleCheck(False, (g, h, k))
    return CocycleCheck(True)


@dataclass(frozen=True)
class ExtensionElement:
    central: int
    base: tuple


def _central_red(f, a: int) -> int:
    return a % f.coeff_modulus if f.coeff_modulus else a


def ext_identity(f) -> ExtensionElement:
    return ExtensionElement(0, f.base_zero())


def ext_multiply(x: ExtensionElement, y: ExtensionElement, f) -> ExtensionElement:
    a = _central_red(f, x.central + y.central + f(x.base, y.base))
    return ExtensionElement(a, f.base_add(x.base, y.base))


def ext_inverse(x: ExtensionElement, f) -> ExtensionElement:
    nb = f.base_neg(x.base)
    a = _central_red(f, -x.central - f(x.base, nb))
    return ExtensionElement(a, nb)


def ext_commutator(x: ExtensionElement, y: ExtensionElement, f) -> ExtensionElement:
    xy = ext_multiply(x, y, f)
    return ext_multiply(xy, ext_inverse(ext_multiply(y, x, f), f), f)


def ext_power(x: ExtensionElement, m: int, f) -> ExtensionElement:
    if m < 0:
        return ext_power(ext_inverse(x, f), -m, f)
    acc = ext_identity(f)
    for _ in range(m):
        acc = ext_multiply(acc, x, f)
    return acc


def heisenberg_cocycle() -> BilinearCocycle:
    """f((a,b),(c,d)) = a*d; the extension of Z^2 by Z it defines is the
    integral Heisenberg group."""
    return BilinearCocycle(((0, 1), (0, 0)))


@dataclass(frozen=True)
class CheckReport:
    checks: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [list(c) for c in self.checks]}


def heisenberg_checks() -> CheckReport:
    """Verify the presentation [x,y] = z, [x,z] = [y,z] = 1, nilpotency
    class exactly 2, and torsion-freeness on a sample grid."""
    f = heisenberg_cocycle()
    x = ExtensionElement(0, (1, 0))
    y = ExtensionElement(0, (0, 1))
    z = ExtensionElement(1, (0, 0))
    ident = ext_identity(f)
    checks = []
    checks.append(("cocycle_verified", verify_cocycle(f).ok))
    checks.append(("commutator_xy_is_z", ext_commutator(x, y, f) == z))
    checks.append(("z_commutes_with_x", ext_commutator(x, z, f) == ident))
    checks.append(("z_commutes_with_y", ext_commutator(y, z, f) == ident))
    checks.append(
        ("class_two_xyx", ext_commutator(ext_commutator(x, y, f), x, f) == ident)
    )
    checks.append(
        ("class_two_xyy", ext_commutator(ext_commutator(x, y, f), y, f) == ident)
    )
    # gamma_2 is central and infinite cyclic: commutators all land on the
    # central axis with value det-like pairing
    gamma2_central = True
    for a in range(-3, 4):
        for b in range(-3, 4):
            u = ExtensionElement(0, (a, b))
            for c in range(-3, 4):
                for d in range(-3, 4):
                    v = ExtensionElement(0, (c, d))
                    comm = ext_commutator(u, v, f)
                    if comm.base != (0, 0) or comm.central != a * d - b * c:
                        gamma2_central = False
    checks.append(("gamma2_central_with_det_pairing", gamma2_central))
    torsion_free = True
    for a in range(-5, 6):
        for u1 in range(-5, 6):
            for u2 in range(-5, 6):
                g = ExtensionElement(a, (u1, u2))
                if g == ident:
                    continue
                for m in range(1, 13):
                    if ext_power(g, m, f) == ident:
                        torsion_free = False
    checks.append(("torsion_free_sampled", torsion_free))
    return CheckReport(tuple(checks))


def pullback_equality_check(f, k, phi) -> bool:
    """Does f equal the pullback of k along phi?

    Bilinear case: phi is an integer matrix (rows x cols = rank of k's base
    x rank of f's base); pullback form is phi^T K phi and the comparison is
    exact matrix equality.  Table case: phi is a dict, verified to be a
    homomorphism, and pointwise equality is checked on all pairs.
    """
    if isinstance(f, BilinearCocycle) and isinstance(k, BilinearCocycle):
        # phi maps f's base into k's base, so it is k.r x f.r and may be
        # rectangular; IntMatrix (square-only) is deliberately not used
        rows = [list(r) for r in (phi.entries if isinstance(phi, IntMatrix) else phi)]
        if len(rows) != k.r or any(len(r) != f.r for r in rows):
            raise NotHomomorphism("matrix shape does not match the two bases")
        pulled = [
            [
                sum(
                    rows[i][a] * k.form[i][j] * rows[j][b]
                    for i in range(k.r)
                    for j in range(k.r)
                )
                for b in range(f.r)
            ]
            for a in range(f.r)
        ]
        if f.coeff_modulus:
            pulled = [[x % f.coeff_modulus for x in row] for row in pulled]
            target = [[x % f.coeff_modulus for x in row] for row in f.form]
            return pulled == target
        return pulled == [list(r) for r in f.form]
    if isinstance(f, TableCocycle) and isinstance(k, TableCocycle):
        for g in f.elements:
            for h in f.elements:
                if phi[f.base_add(g, h)] != k.base_add(phi[g], phi[h]):
                    raise NotHomomorphism(f"phi breaks addition at ({g}, {h})")
        return all(
            f(g, h) == k(phi[g], phi[h]) for g in f.elements for h in f.elements
        )
    raise InvalidSpec("mixed cocycle representations")


@dataclass(frozen=True)
class CircleBundleSpec:
    """Unit circle bundle over a genus-g surface with Euler number e."""

    genus: int
    euler: int

    def __post_init__(self):
        if self.genus < 1:
            raise InvalidSpec("genus must be >= 1")
        if self.euler == 0:
            raise InvalidSpec("Euler number must be nonzero")


def circle_bundle_cocycle(spec: CircleBundleSpec) -> BilinearCocycle:
    """k(u, v) = e * sum_i u_{a_i} v_{b_i} on Z^{2g}, pairing coordinate
    2i-1 with coordinate 2i."""
    r = 2 * spec.genus
    form = [[0] * r for _ in range(r)]
    for i in range(spec.genus):
        form[2 * i][2 * i + 1] = spec.euler
    return BilinearCocycle(tuple(tuple(row) for row in form))


def circle_bundle_central_witness(spec: CircleBundleSpec) -> CheckReport:
    """Central quotient witness for the surface-bundle presentation
    <a_1, b_1, .., a_g, b_g, z | prod [a_i, b_i] = z^e, z central>.

    The target is the extension Q of Z^{2g} by Z with the scaled cocycle
    above; a_i, b_i map to the standard base generators and z to (g, 0).
    Each [a_i, b_i] must land on (e, 0), the relator on (ge, 0) = image of
    z^e, and the z-image must have infinite order; Q is nilpotent of class
    2 and torsion-free on samples, exactly like the Heisenberg checks.
    """
    g, e = spec.genus, spec.euler
    f = circle_bundle_cocycle(spec)
    r = 2 * g
    ident = ext_identity(f)

    def basis(i: int) -> ExtensionElement:
        return ExtensionElement(0, tuple(1 if j == i else 0 for j in range(r)))

    a = [basis(2 * i) for i in range(g)]
    b = [basis(2 * i + 1) for i in range(g)]
    z = ExtensionElement(g, (0,) * r)
    checks = [("cocycle_verified", verify_cocycle(f).ok)]
    for i in range(g):
        checks.append(
            (
                f"commutator_a{i + 1}_b{i + 1}_is_(e,0)",
                ext_commutator(a[i], b[i], f) == ExtensionElement(e, (0,) * r),
            )
        )
    relator = ident
    for i in range(g):
        relator = ext_multiply(relator, ext_commutator(a[i], b[i], f), f)
    z_to_e = ext_power(z, e, f)
    checks.append(("relator_equals_z_power_e", relator == z_to_e))
    checks.append(
        ("relator_is_(ge,0)", relator == ExtensionElement(g * e, (0,) * r))
    )
    z_central = all(
        ext_commutator(z, basis(i), f) == ident for i in range(r)
    )
    checks.append(("z_central", z_central))
    infinite_order = all(
        ext_power(z, m, f) != ident for m in range(1, 21)
    )
    checks.append(("z_image_infinite_order", infinite_order))
    rng = random.Random(11)
    class_two = True
    torsion_free = True
    for _ in range(100):
        u = ExtensionElement(rng.randint(-3, 3), tuple(rng.randint(-3, 3) for _ in range(r)))
        v = ExtensionElement(rng.randint(-3, 3), tuple(rng.randint(-3, 3) for _ in range(r)))
        comm = ext_commutator(u, v, f)
        if comm.base != (0,) * r:
            class_two = False
        if ext_commutator(comm, u, f) != ident:
            class_two = False
        if u != ident and any(ext_power(u, m, f) == ident for m in range(1, 13)):
            torsion_free = False
    checks.append(("class_two_sampled", class_two))
    checks.append(("torsion_free_sampled", torsion_free))
    return CheckReport(tuple(checks))
