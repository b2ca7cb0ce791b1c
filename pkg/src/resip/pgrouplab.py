"""Brute-force finite p-group laboratory.

Small matrix groups over Z/p^k with explicit element closure.  This module
exists to validate the p-group lemmas the classifiers lean on (Frattini
quotients, cyclic-abelianization, towers) on concrete instances; nothing
here is meant to scale.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Optional

import sympy

from .caps import Caps, DEFAULT_CAPS
from .errors import CapExceeded, InvalidSpec, NotAPGroup, NotNormal

Element = tuple[tuple[int, ...], ...]  # matrix mod modulus


def _mmul(a: Element, b: Element, mod: int) -> Element:
    n = len(a)
    cols = list(zip(*b))
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) % mod for col in cols)
        for row in a
    )


def _identity(n: int) -> Element:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


class FinitePGroup:
    """Explicitly closed group of matrices over Z/p^k."""

    def __init__(self, modulus: int, generators: list[Element], cap: int):
        factors = sympy.factorint(modulus)
        if len(factors) != 1:
            raise InvalidSpec("modulus must be a prime power")
        self.modulus = modulus
        self.p = int(next(iter(factors)))
        self.dim = len(generators[0]) if generators else 1
        self.generators = tuple(generators)
        ident = _identity(self.dim)
        elements = [ident]
        index = {ident: 0}
        queue = [ident]
        while queue:
            g = queue.pop(0)
            for s in self.generators:
                h = _mmul(g, s, modulus)
                if h not in index:
                    if len(elements) >= cap:
                        raise CapExceeded("group_order", cap)
                    index[h] = len(elements)
                    elements.append(h)
                    queue.append(h)
        self.elements = tuple(elements)
        self.index = index
        order = len(elements)
        q = order
        while q % self.p == 0:
            q //= self.p
        if q != 1:
            raise NotAPGroup(f"order {order} is not a power of {self.p}")
        self._inv: dict[Element, Element] = {}
        self._center: Optional[frozenset] = None
        self._derived: Optional[frozenset] = None
        self._subgroups: Optional[tuple[frozenset, ...]] = None

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, a: Element, b: Element) -> Element:
        return _mmul(a, b, self.modulus)

    def inv(self, g: Element) -> Element:
        if g not in self._inv:
            power = g
            prev = _identity(self.dim)
            while power != _identity(self.dim):
                prev = power
                power = self.mul(power, g)
            self._inv[g] = prev if g != _identity(self.dim) else g
        return self._inv[g]

    def element_order(self, g: Element) -> int:
        ident = _identity(self.dim)
        power = g
        order = 1
        while power != ident:
            power = self.mul(power, g)
            order += 1
        return order

    def commutator(self, a: Element, b: Element) -> Element:
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def closure(self, gens: Iterable[Element]) -> frozenset:
        gens = list(gens)
        ident = _identity(self.dim)
        seen = {ident}
        queue = [ident]
        while queue:
            g = queue.pop(0)
            for s in gens:
                h = self.mul(g, s)
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
        return frozenset(seen)

    def center(self) -> frozenset:
        if self._center is None:
            self._center = frozenset(
                z
                for z in self.elements
                if all(self.mul(z, s) == self.mul(s, z) for s in self.generators)
            )
        return self._center

    def derived_subgroup(self) -> frozenset:
        if self._derived is None:
            comms = {
                self.commutator(a, b)
                for a in self.elements
                for b in self.elements
            }
            self._derived = self.closure(comms)
        return self._derived

    def all_subgroups(self, count_cap: int = 10_000) -> tuple[frozenset, ...]:
        """Every subgroup, by closing upward from the trivial one.

        Each subgroup is joined with single elements through a small
        generating set carried along the search; same lattice, far fewer
        multiplications than closing over whole element sets.
        """
        if self._subgroups is not None:
            return self._subgroups
        trivial = frozenset({_identity(self.dim)})
        found: dict[frozenset, tuple] = {trivial: ()}
        queue = [trivial]
        while queue:
            h = queue.pop(0)
            gens = found[h]
            for g in self.elements:
                if g in h:
                    continue
                k = self.closure(gens + (g,))
                if k not in found:
                    if len(found) >= count_cap:
                        raise CapExceeded("subgroup_count", count_cap)
                    found[k] = gens + (g,)
                    queue.append(k)
        self._subgroups = tuple(
            sorted(found, key=lambda s: (len(s), sorted(s)))
        )
        return self._subgroups

    def maximal_subgroups(self) -> list[frozenset]:
        # in a finite p-group, maximal = index p
        target = self.order // self.p
        return [h for h in self.all_subgroups() if len(h) == target]

    def is_normal(self, h: frozenset) -> bool:
        return all(
            self.mul(self.mul(s, k), self.inv(s)) in h
            for s in self.generators
            for k in h
        )

    def is_cyclic_subgroup(self, h: frozenset) -> bool:
        return any(self.element_order(g) == len(h) for g in h)


def generate_group(
    generators: list[Element], modulus: int, caps: Caps = DEFAULT_CAPS
) -> FinitePGroup:
    for g in generators:
        det = int(sympy.Matrix([list(r) for r in g]).det())
        p = int(next(iter(sympy.factorint(modulus))))
        if det % p == 0:
            raise InvalidSpec("generator not invertible mod the modulus")
    return FinitePGroup(modulus, generators, caps.group_order)


def ut3_group(p: int, caps: Caps = DEFAULT_CAPS) -> FinitePGroup:
    """Upper unitriangular 3x3 matrices over F_p, order p^3."""
    e12 = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    e23 = ((1, 0, 0), (0, 1, 1), (0, 0, 1))
    return generate_group([e12, e23], p, caps)


def cyclic_group_p2(p: int, caps: Caps = DEFAULT_CAPS) -> FinitePGroup:
    """Cyclic of order p^2, as the unipotent 2x2 matrix [[1,1],[0,1]] mod p^2."""
    gen = ((1, 1), (0, 1))
    return generate_group([gen], p * p, caps)


def elementary_abelian_p2(p: int, caps: Caps = DEFAULT_CAPS) -> FinitePGroup:
    """(Z/p)^2 realized by the commuting elementary matrices I+E12, I+E13."""
    a = ((1, 1, 0), (0, 1, 0), (0, 0, 1))
    b = ((1, 0, 1), (0, 1, 0), (0, 0, 1))
    return generate_group([a, b], p, caps)


def frattini_data(group: FinitePGroup) -> dict:
    """Frattini subgroup by brute-force intersection of maximal subgroups,
    cross-checked against P^p [P,P]; returns its order and the rank of the
    elementary abelian quotient P/Phi."""
    maximals = group.maximal_subgroups()
    if maximals:
        phi = frozenset.intersection(*maximals)
    else:
        phi = frozenset(group.elements)  # trivial group: Phi(P) = P
    powers = {_pow(group, g, group.p) for g in group.elements}
    agreement = group.closure(powers | set(group.derived_subgroup()))
    assert phi == agreement, "Frattini mismatch between definitions"
    quotient_order = group.order // len(phi)
    rank = 0
    while quotient_order > 1:
        assert quotient_order % group.p == 0
        quotient_order //= group.p
        rank += 1
    elementary = all(_pow(group, g, group.p) in phi for g in group.elements) and all(
        group.commutator(a, b) in phi for a in group.elements for b in group.elements
    )
    return {
        "frattini_order": len(phi),
        "rank": rank,
        "elementary_abelian_quotient": elementary,
    }


def _pow(group: FinitePGroup, g: Element, k: int) -> Element:
    result = _identity(group.dim)
    for _ in range(k):
        result = group.mul(result, g)
    return result


def _quotient_is_cyclic(group: FinitePGroup, h: frozenset, d: frozenset) -> bool:
    """Is H/D cyclic?  D must be normal in H (it is: derived subgroup)."""
    target = len(h) // len(d)
    for g in h:
        # order of gD in H/D = least m with g^m in D
        power = g
        m = 1
        while power not in d:
            power = group.mul(power, g)
            m += 1
        if m == target:
            return True
    return target == 1


def check_cyclic_abelianization(group: FinitePGroup) -> bool:
    """Instance check of: a finite p-group with cyclic abelianization is
    cyclic.  Runs over every subgroup; any violation returns False."""
    for h in group.all_subgroups():
        sub_comms = {
            group.commutator(a, b) for a in h for b in h
        }
        derived = group.closure(sub_comms)
        if _quotient_is_cyclic(group, h, derived):
            if not group.is_cyclic_subgroup(h):
                return False
    return True


def tower_lemma_check(group: FinitePGroup, k1: frozenset, k2: frozenset) -> bool:
    """Index of K1 n K2 must be a p-power for normal K1, K2 of p-power
    index.  In an ambient p-group this is automatic; the check validates
    the bookkeeping (normality verified, intersection computed)."""
    for name, k in (("K1", k1), ("K2", k2)):
        if not group.is_normal(k):
            raise NotNormal(f"{name} is not normal")
    meet = k1 & k2
    index = group.order // len(meet)
    while index % group.p == 0:
        index //= group.p
    return index == 1


def inner_automorphism_orders(group: FinitePGroup) -> list[int]:
    """Order of conjugation by g, for every g: least m with g^m central."""
    center = group.center()
    orders = []
    for g in group.elements:
        power = g
        m = 1
        while power not in center:
            power = group.mul(power, g)
            m += 1
        orders.append(m)
    return orders


def minimal_generating_size(group: FinitePGroup, size_cap: int = 4) -> int:
    """Exhaustive smallest generating set size (Burnside basis check)."""
    if group.order == 1:
        return 0
    candidates = [g for g in group.elements if g != _identity(group.dim)]
    for size in range(1, size_cap + 1):
        for subset in combinations(candidates, size):
            if len(group.closure(subset)) == group.order:
                return size
    raise CapExceeded("generating_set_size", size_cap)
