"""Positive certificates: finite p-group quotients where an element survives.

Two quotient routes, following the two shapes of a nontrivial element
t^m w of a mapping torus:

* m != 0: kill the fiber, map t to Z/p^j with p^j > |m|.  The element
  survives as the residue m.
* m = 0, w != 1: quotient the fiber by the mod-p dimension subgroup at
  the Magnus depth d of w (the least truncation degree where w is visible
  over F_p).  The kernel is fully invariant, so the monodromy descends;
  its induced order is computed by iterating the series substitution and
  must be a p-power whenever the monodromy is unipotent on H_1 mod p.
  The mapping torus then surjects onto (fiber quotient) x| Z/p^s, a
  finite p-group, and w survives by choice of d.

Certificates embed the monodromy and element, so they re-verify from the
stored JSON alone.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .caps import Caps, DEFAULT_CAPS
from .errors import (
    CapExceeded,
    InvalidSpec,
    MixedPrimes,
    NonPPowerOrder,
    NotUnipotentModP,
)
from .freegrp import (
    FreeEndo,
    FreeWord,
    MappingTorusElement,
    MappingTorusSpec,
    abelianization_matrix,
    apply_endo,
    conjugate,
    format_word,
    parse_word,
    word_multiply,
)
from .intlin import is_unipotent_mod
from .magnus import SeriesSubstitution, TruncatedSeries, magnus_depth, magnus_embed


def _is_p_power(n: int, p: int) -> bool:
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class PGroupQuotient:
    """A certified finite p-group quotient with a surviving element.

    kind "stable_letter": data has j, t_exponent, residue.
    kind "magnus": data has degree, precision, order_exponent, survivor
        word, surviving monomial and coefficient, fiber order bound.
    kind "product": components carry the actual certificates.
    """

    p: int
    kind: str
    rank: int
    monodromy_images: tuple[str, ...]
    monodromy_inverse: tuple[str, ...]
    survivor_t: int
    survivor_word: str
    data: dict = field(default_factory=dict)
    components: tuple["PGroupQuotient", ...] = ()

    def __post_init__(self):
        if self.kind not in ("stable_letter", "magnus", "product"):
            raise InvalidSpec(f"unknown certificate kind {self.kind}")

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "kind": self.kind,
            "rank": self.rank,
            "monodromy_images": list(self.monodromy_images),
            "monodromy_inverse": list(self.monodromy_inverse),
            "survivor_t": self.survivor_t,
            "survivor_word": self.survivor_word,
            "data": _jsonable(self.data),
        }
        if self.components:
            out["components"] = [c.to_dict() for c in self.components]
        return out

    @staticmethod
    def from_dict(d: dict) -> "PGroupQuotient":
        return PGroupQuotient(
            p=int(d["p"]),
            kind=d["kind"],
            rank=int(d["rank"]),
            monodromy_images=tuple(d["monodromy_images"]),
            monodromy_inverse=tuple(d["monodromy_inverse"]),
            survivor_t=int(d["survivor_t"]),
            survivor_word=d["survivor_word"],
            data=_unjsonable(d.get("data", {})),
            components=tuple(
                PGroupQuotient.from_dict(c) for c in d.get("components", ())
            ),
        )

    def monodromy(self) -> FreeEndo:
        images = tuple(parse_word(t, self.rank) for t in self.monodromy_images)
        inverse = tuple(parse_word(t, self.rank) for t in self.monodromy_inverse)
        return FreeEndo(self.rank, images, inverse)


def _jsonable(data: dict) -> dict:
    out = {}
    for k, v in data.items():
        if isinstance(v, int) and abs(v) >= 2 ** 53:
            out[k] = str(v)
        elif isinstance(v, tuple):
            out[k] = list(v)
        else:
            out[k] = v
    return out


def _unjsonable(data: dict) -> dict:
    out = {}
    for k, v in data.items():
        if isinstance(v, str) and (v.isdigit() or (v[:1] == "-" and v[1:].isdigit())):
            out[k] = int(v)
        elif isinstance(v, list):
            out[k] = tuple(v)
        else:
            out[k] = v
    return out


@dataclass(frozen=True)
class WitnessOutcome:
    status: str  # "certificate" | "undecided"
    certificate: Optional[PGroupQuotient] = None
    reason: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"status": self.status}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def _raw_induced_order(
    phi: FreeEndo, p: int, d: int, caps: Caps
) -> int:
    """Order of phi acting on the level-(p, d) Magnus quotient, by direct
    iteration of the series substitution on the generator images."""
    sub = SeriesSubstitution(phi, d, p, caps)
    start = [
        magnus_embed(FreeWord.generator(phi.rank, i), d, p, caps)
        for i in range(1, phi.rank + 1)
    ]
    current = list(start)
    for m in range(1, caps.order_iterations + 1):
        current = [sub(s) for s in current]
        if current == start:
            return m
    raise CapExceeded("order_iterations", caps.order_iterations)


def induced_automorphism_order(
    spec: MappingTorusSpec, p: int, d: int, caps: Caps = DEFAULT_CAPS
) -> int:
    """Order p^s of the monodromy on the level-(p, d) quotient.

    With a unipotent-mod-p H_1 action the order must come out a p-power;
    anything else is an invariant violation and aborts."""
    order = _raw_induced_order(spec.fiber, p, d, caps)
    if not _is_p_power(order, p):
        raise NonPPowerOrder(
            f"induced order {order} on level ({p},{d}) is not a power of {p}"
        )
    return order


def _monomial_count(rank: int, d: int) -> int:
    return sum(rank ** i for i in range(1, d + 1))


def _least_nonzero_evidence(series: TruncatedSeries, d: int) -> tuple[tuple[int, ...], int]:
    candidates = [(m, c) for m, c in series.table.items() if len(m) == d]
    if not candidates:
        raise InvalidSpec("no evidence at the claimed depth")
    return min(candidates)


def find_p_quotient_witness(
    spec: MappingTorusSpec,
    g: MappingTorusElement,
    p: int,
    caps: Caps = DEFAULT_CAPS,
    exploratory: bool = False,
) -> WitnessOutcome:
    """Search for a finite p-group quotient of the mapping torus where g
    survives.

    The certificate route needs the H_1 action unipotent mod p.  Without
    it the classifier gives no guarantee; exploratory mode still tries,
    reporting failure (a non-p-power induced order) as an undecided
    outcome rather than an error.
    """
    if g.is_identity():
        raise InvalidSpec("the surviving element must be nontrivial")
    phi = spec.fiber
    base = dict(
        p=p,
        rank=spec.rank,
        monodromy_images=tuple(format_word(w) for w in phi.images),
        monodromy_inverse=tuple(format_word(w) for w in phi.certified_inverse),
        survivor_t=g.t_exponent,
        survivor_word=format_word(g.fiber_word),
    )
    m = g.t_exponent
    if m != 0:
        j = 1
        while p ** j <= abs(m):
            j += 1
        cert = PGroupQuotient(
            kind="stable_letter",
            data={
                "j": j,
                "quotient_order": p ** j,
                "residue": m % p ** j,
            },
            **base,
        )
        return WitnessOutcome("certificate", certificate=cert)
    # the Magnus route needs the unipotence hypothesis; the stable-letter
    # route above does not (the fiber is killed outright)
    unip = is_unipotent_mod(abelianization_matrix(phi), p)
    if not unip and not exploratory:
        return WitnessOutcome(
            "undecided",
            reason=(
                f"H_1 action not unipotent mod {p}; the certificate route "
                "requires it (use exploratory mode to try anyway)"
            ),
        )
    w = g.fiber_word
    d = magnus_depth(w, p, caps.magnus_degree, caps)
    evidence_mon, evidence_coeff = _least_nonzero_evidence(
        magnus_embed(w, d, p, caps), d
    )
    try:
        order = induced_automorphism_order(spec, p, d, caps)
    except NonPPowerOrder as exc:
        if exploratory:
            return WitnessOutcome(
                "undecided",
                reason=f"exploratory search failed at depth {d}: {exc}",
            )
        raise
    s = 0
    o = order
    while o > 1:
        o //= p
        s += 1
    fiber_bound = p ** _monomial_count(spec.rank, d)
    cert = PGroupQuotient(
        kind="magnus",
        data={
            "degree": d,
            "precision": 1,
            "order_exponent": s,
            "induced_order": order,
            "evidence_monomial": evidence_mon,
            "evidence_coefficient": evidence_coeff,
            "fiber_order_bound": fiber_bound,
            "total_order_bound": fiber_bound * order,
        },
        **base,
    )
    return WitnessOutcome("certificate", certificate=cert)


def combine_witnesses(
    witnesses: list[PGroupQuotient], caps: Caps = DEFAULT_CAPS
) -> PGroupQuotient:
    """Direct-product certificate: all listed elements survive, the order
    bound multiplies."""
    if not witnesses:
        raise InvalidSpec("nothing to combine")
    if len(witnesses) == 1:
        return witnesses[0]
    if len(witnesses) > caps.combine_witnesses:
        raise CapExceeded("combine_witnesses", caps.combine_witnesses)
    p = witnesses[0].p
    if any(w.p != p for w in witnesses):
        raise MixedPrimes("all witnesses must share the prime")
    first = witnesses[0]
    if any(
        (w.rank, w.monodromy_images) != (first.rank, first.monodromy_images)
        for w in witnesses
    ):
        raise InvalidSpec("witnesses belong to different mapping tori")
    bound = 1
    for w in witnesses:
        bound *= _order_bound(w)
    return PGroupQuotient(
        p=p,
        kind="product",
        rank=first.rank,
        monodromy_images=first.monodromy_images,
        monodromy_inverse=first.monodromy_inverse,
        survivor_t=0,
        survivor_word="1",
        data={"total_order_bound": bound, "count": len(witnesses)},
        components=tuple(witnesses),
    )


def _order_bound(w: PGroupQuotient) -> int:
    if w.kind == "stable_letter":
        return w.data["quotient_order"]
    if w.kind == "magnus":
        return w.data["total_order_bound"]
    return w.data["total_order_bound"]


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[tuple[str, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [list(c) for c in self.checks]}


def _kernel_samples(rank: int, d: int, seed: int, count: int = 20) -> list[FreeWord]:
    """Random elements of gamma_{d+1}, hence of every level-(p, d) kernel:
    conjugated left-nested commutators of weight d + 1."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        letters = [rng.randint(1, rank) for _ in range(d + 1)]
        w = FreeWord.generator(rank, letters[-1])
        for a in letters[-2::-1]:
            x = FreeWord.generator(rank, a)
            w = word_multiply(
                word_multiply(x, w),
                word_multiply(x.inverse(), w.inverse()),
            )
        conj_letters = [
            rng.choice([1, -1]) * rng.randint(1, rank) for _ in range(rng.randint(0, 3))
        ]
        out.append(conjugate(w, FreeWord.from_letters(rank, conj_letters)))
    return out


def verify_witness(cert: PGroupQuotient, caps: Caps = DEFAULT_CAPS) -> VerificationReport:
    """Re-check a stored certificate from its own data.

    Survival, p-power order, and monodromy-invariance of the kernel are
    all recomputed; nothing is trusted from the original run."""
    checks: list[tuple[str, bool]] = []
    if cert.kind == "product":
        checks.append(("same_prime", all(c.p == cert.p for c in cert.components)))
        checks.append(
            ("count_within_cap", len(cert.components) <= caps.combine_witnesses)
        )
        bound = 1
        for c in cert.components:
            sub = verify_witness(c, caps)
            checks.append((f"component_{c.survivor_word or c.survivor_t}", sub.ok))
            bound *= _order_bound(c)
        checks.append(("order_bound_product", bound == cert.data["total_order_bound"]))
        return VerificationReport(tuple(checks))
    phi = cert.monodromy()  # certified-inverse check happens on reconstruction
    checks.append(("monodromy_reconstructed", True))
    p = cert.p
    if cert.kind == "stable_letter":
        j = cert.data["j"]
        m = cert.survivor_t
        checks.append(("modulus_beats_exponent", p ** j > abs(m) and m != 0))
        checks.append(("residue_nonzero", m % p ** j != 0))
        checks.append(("residue_stored", cert.data["residue"] == m % p ** j))
        checks.append(("quotient_order", cert.data["quotient_order"] == p ** j))
        return VerificationReport(tuple(checks))
    # magnus kind
    d = cert.data["degree"]
    w = parse_word(cert.survivor_word, cert.rank)
    checks.append(("element_in_fiber", cert.survivor_t == 0 and not w.is_identity()))
    depth = magnus_depth(w, p, max(d, caps.magnus_degree), caps)
    checks.append(("depth_minimal", depth == d))
    series = magnus_embed(w, d, p, caps)
    mon = tuple(cert.data["evidence_monomial"])
    checks.append(
        (
            "survival_coefficient",
            series.coefficient(mon) == cert.data["evidence_coefficient"] != 0,
        )
    )
    unip = is_unipotent_mod(abelianization_matrix(phi), p)
    checks.append(("h1_unipotent_mod_p", bool(unip)))
    order = _raw_induced_order(phi, p, d, caps)
    checks.append(("induced_order_matches", order == cert.data["induced_order"]))
    checks.append(("induced_order_p_power", _is_p_power(order, p)))
    checks.append(
        ("order_exponent", p ** cert.data["order_exponent"] == cert.data["induced_order"])
    )
    sub = SeriesSubstitution(phi, d, p, caps)
    invariant = True
    for sample in _kernel_samples(cert.rank, d, seed=p * 1009 + d):
        image = apply_endo(phi, sample)
        if not magnus_embed(image, d, p, caps).is_one():
            invariant = False
        if not sub(magnus_embed(sample, d, p, caps)).is_one():
            invariant = False
    checks.append(("kernel_invariance_sampled", invariant))
    checks.append(
        (
            "fiber_order_bound",
            cert.data["fiber_order_bound"] == p ** _monomial_count(cert.rank, d),
        )
    )
    return VerificationReport(tuple(checks))
