"""The nu invariant and the decision procedure for extending it to the
whole group.

nu is a conjugation-invariant homomorphism from a normal subgroup H of G
into the abelian group K.  Whether it extends to a homomorphism on all of
G is the load-bearing hypothesis of the classification, so the verdict is
a structured certificate: an explicit witness homomorphism when it
extends, and a named obstruction with a witness element when it does not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .abelian import AbelianGroup
from .errors import (
    NotActInvariant,
    NotAHomomorphism,
    NotCoprime,
    NotEquivariant,
)
from .groups import (
    DEFAULT_ENUM_CAP,
    FiniteGroup,
    GroupHom,
    Subgroup,
    abelianization,
    enumerate_homs,
    group_hom,
    require_normal,
    semidirect_product,
    subgroup,
    commutator_subgroup,
)
from .phases import ModularSystem

EXTENDS = "EXTENDS"
OBSTRUCTED = "OBSTRUCTED"

NON_EQUIVARIANT = "non_equivariant"
KILLS_COMMUTATOR_FAILS = "kills_commutator_fails"
ABELIAN_OBSTRUCTION = "abelian_obstruction"
NO_HOM_RESTRICTS = "no_hom_restricts"


@dataclass(frozen=True)
class NuInvariant:
    """nu: H -> K, stored as one K-tuple per sorted subgroup member."""

    subgroup: Subgroup
    target: AbelianGroup
    values: tuple[tuple[int, ...], ...]

    @property
    def group(self) -> FiniteGroup:
        return self.subgroup.parent

    def value(self, h: int) -> tuple[int, ...]:
        return self.values[self.subgroup.position[h]]

    @cached_property
    def value_indices(self) -> np.ndarray:
        """K element index per subgroup member position."""
        arr = np.array([self.target.index(v) for v in self.values], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def is_trivial(self) -> bool:
        return all(v == self.target.zero() for v in self.values)


def check_equivariant(
    h: Subgroup, target: AbelianGroup, values: Sequence[Sequence[int]]
) -> tuple[bool, Optional[tuple]]:
    """Is the candidate map a homomorphism with nu(g^-1 h g) = nu(h) for all g?

    Returns (verdict, witness); the witness is ("hom", (h1, h2)) or
    ("conjugation", (g, h)).  H must be normal.
    """
    g = h.parent
    require_normal(g, h)
    vals = [tuple(int(x) for x in v) for v in values]
    if len(vals) != h.order:
        raise ValueError(f"need {h.order} values, got {len(vals)}")
    by_member = dict(zip(h.members, vals))
    for v in vals:
        target._check(v)
    if by_member[g.identity] != target.zero():
        return False, ("hom", (g.identity, g.identity))
    for a in h.members:
        for b in h.members:
            if by_member[g.mul(a, b)] != target.add(by_member[a], by_member[b]):
                return False, ("hom", (a, b))
    for x in g.elements():
        for a in h.members:
            if by_member[g.conj(x, a)] != by_member[a]:
                return False, ("conjugation", (x, a))
    return True, None


def nu_invariant(h: Subgroup, target: AbelianGroup, values) -> NuInvariant:
    """Validated constructor; raises on non-homomorphism or non-equivariance."""
    vals = tuple(tuple(int(x) for x in v) for v in values)
    ok, witness = check_equivariant(h, target, vals)
    if not ok:
        kind, w = witness
        if kind == "hom":
            raise NotAHomomorphism(w)
        raise NotEquivariant(w)
    return NuInvariant(h, target, vals)


def trivial_nu(h: Subgroup, target: AbelianGroup) -> NuInvariant:
    return NuInvariant(h, target, tuple(target.zero() for _ in h.members))


@dataclass(frozen=True)
class Obstruction:
    kind: str
    witness: Optional[tuple] = None
    detail: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ExtensionCertificate:
    verdict: str  # EXTENDS | OBSTRUCTED
    witness: Optional[GroupHom] = None  # G -> K.as_table_group when EXTENDS
    obstruction: Optional[Obstruction] = None

    @property
    def extends(self) -> bool:
        return self.verdict == EXTENDS

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": list(self.witness.image) if self.witness else None,
            "obstruction": self.obstruction.to_json() if self.obstruction else None,
        }


def _certify_witness(nu: NuInvariant, image: Sequence[int]) -> ExtensionCertificate:
    """Wrap an image array as a validated witness restricting to nu exactly."""
    hom = group_hom(nu.group, nu.target.as_table_group, image)
    for h, v in zip(nu.subgroup.members, nu.values):
        if hom(h) != nu.target.index(v):
            raise AssertionError(f"witness does not restrict to nu at {h}")
    return ExtensionCertificate(EXTENDS, witness=hom)


def decide_extension(nu: NuInvariant) -> ExtensionCertificate:
    """Does nu extend to a homomorphism G -> K?  Total decision procedure.

    Stages: (0) re-check equivariance, (i) nu must kill H intersect [G,G],
    (ii) push to the abelianization, (iii) solve the per-coordinate linear
    congruence systems, (iv) pull the solution back and re-validate.
    """
    g = nu.group
    h = nu.subgroup
    kk = nu.target
    ok, witness = check_equivariant(h, kk, nu.values)
    if not ok:
        return ExtensionCertificate(OBSTRUCTED, obstruction=Obstruction(NON_EQUIVARIANT, witness[1]))
    comm = commutator_subgroup(g)
    for x in comm.members:
        if x in h.position and nu.value(x) != kk.zero():
            return ExtensionCertificate(
                OBSTRUCTED, obstruction=Obstruction(KILLS_COMMUTATOR_FAILS, (x,))
            )
    gab, proj = abelianization(g)
    hbar: dict[int, tuple[int, ...]] = {}
    for m, v in zip(h.members, nu.values):
        hbar.setdefault(proj(m), v)  # well-defined because nu kills H meet [G,G]
    # one linear system per K coordinate: unknowns x_a for a != identity of G_ab
    n = gab.order
    e_id = gab.identity
    cols = [a for a in range(n) if a != e_id]
    col_of = {a: i for i, a in enumerate(cols)}
    rows = []
    rhs_pattern: list[tuple[str, int]] = []  # ("zero", _) or ("value", member)
    for a in range(n):
        for b in range(n):
            row = [0] * len(cols)
            if a != e_id:
                row[col_of[a]] += 1
            if b != e_id:
                row[col_of[b]] += 1
            ab = gab.mul(a, b)
            if ab != e_id:
                row[col_of[ab]] -= 1
            rows.append(row)
            rhs_pattern.append(("zero", 0))
    for a, v in sorted(hbar.items()):
        if a == e_id:
            continue
        row = [0] * len(cols)
        row[col_of[a]] = 1
        rows.append(row)
        rhs_pattern.append(("member", a))
    if not cols:
        return _certify_witness(nu, [kk.index(kk.zero())] * g.order)
    system = ModularSystem(rows)
    coords: list[np.ndarray] = []
    for i, ni in enumerate(kk.cyclic_orders):
        b = []
        for kind, a in rhs_pattern:
            b.append(0 if kind == "zero" else hbar[a][i])
        x = system.solve(b, ni)
        if x is None:
            return ExtensionCertificate(
                OBSTRUCTED,
                obstruction=Obstruction(
                    ABELIAN_OBSTRUCTION,
                    detail={"coordinate": i, "cyclic_order": ni},
                ),
            )
        coords.append(x)
    image = []
    for a in range(g.order):
        abar = proj(a)
        if abar == e_id:
            image.append(kk.index(kk.zero()))
        else:
            j = col_of[abar]
            image.append(kk.index(tuple(int(x[j]) % ni for x, ni in zip(coords, kk.cyclic_orders))))
    return _certify_witness(nu, image)


def decide_extension_oracle(nu: NuInvariant, cap: int = DEFAULT_ENUM_CAP) -> ExtensionCertificate:
    """Independent brute force: exhaust Hom(G, K) and test restriction."""
    g = nu.group
    kk = nu.target
    targets = nu.value_indices
    for hom in enumerate_homs(g, kk.as_table_group, cap):
        if all(hom(h) == int(t) for h, t in zip(nu.subgroup.members, targets)):
            return ExtensionCertificate(EXTENDS, witness=hom)
    return ExtensionCertificate(OBSTRUCTED, obstruction=Obstruction(NO_HOM_RESTRICTS))


@dataclass(frozen=True)
class CyclicNuExtension:
    """Integer certificate for the cyclic case: an order-p subgroup map on Z
    extends because gcd(p, n) = 1 gives p*k + n*l = 1 and g -> g*k mod n."""

    p: int
    n: int
    k: int
    l: int
    multiplier: int

    def extension_value(self, g: int) -> int:
        """The extension evaluated at g in Z: the class g*k mod n."""
        return (g * self.k) % self.n

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "k": self.k, "l": self.l, "multiplier": self.multiplier}


def bezout_extension(p: int, n: int) -> CyclicNuExtension:
    """Produce p*k + n*l = 1 with k the canonical inverse of p mod n.

    The normalization picks k = p^-1 mod n (and k = 1 when n = 1), so the
    certificate is deterministic and p*k = 1 mod n holds on the nose.
    """
    p, n = int(p), int(n)
    if p < 1 or n < 1:
        raise ValueError(f"periods must be positive, got p={p}, n={n}")
    if math.gcd(p, n) != 1:
        raise NotCoprime(p, n)
    k = 1 if n == 1 else pow(p, -1, n)
    l = (1 - p * k) // n
    assert p * k + n * l == 1
    cert = CyclicNuExtension(p, n, k, l, k % n)
    for m in range(n):  # restriction check: extension(p*m) = m mod n
        if cert.extension_value(p * m) != m % n:
            raise AssertionError(f"restriction check failed at m={m}")
    return cert


def semidirect_extension(
    h: FiniteGroup,
    q: FiniteGroup,
    act: Sequence[Sequence[int]],
    nu_h: Sequence[Sequence[int]],
    target: AbelianGroup,
) -> ExtensionCertificate:
    """Extend nu along G = H x| Q by nu(h, q) := nu_H(h).

    Requires nu_H to be an action-invariant homomorphism; the returned
    witness is re-validated as a homomorphism on G, which replays the
    defining computation nu((h1,q1)(h2,q2)) = nu_H(h1) + nu_H(h2)
    mechanically.  Raises NotActInvariant with a witness (q, h) otherwise.
    """
    g = semidirect_product(h, q, act)
    vals = [tuple(int(x) for x in v) for v in nu_h]
    if len(vals) != h.order:
        raise ValueError(f"need {h.order} values, got {len(vals)}")
    h_embedded = subgroup(g, range(h.order))  # ids q*|H|+h put H x {e} first
    ok, witness = check_equivariant(h_embedded, target, vals)
    if not ok and witness[0] == "hom":
        raise NotAHomomorphism(witness[1])
    acts = [np.asarray(a, dtype=np.int64) for a in act]
    for qi in q.elements():
        for hi in h.elements():
            if vals[int(acts[qi][hi])] != vals[hi]:
                raise NotActInvariant((qi, hi))
    image = [target.index(vals[x % h.order]) for x in range(g.order)]
    nu = nu_invariant(h_embedded, target, vals)
    return _certify_witness(nu, image)
