"""Finite groups as validated multiplication tables.

Elements are dense ids 0..n-1; symbolic names live only in the file format.
Everything here is immutable after validation and pure, so tables can be
shared freely.  Scale target is desk size (order <= 24 for the search
helpers), guarded by enumeration caps.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import (
    ActionNotHomomorphic,
    EnumerationCapExceeded,
    NoIdentity,
    NotAHomomorphism,
    NotASubgroup,
    NotAssociative,
    NotAutomorphism,
    NotLatinSquare,
    NotNormalSubgroup,
)

DEFAULT_ENUM_CAP = 10**6


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A group of order n given by its table: table[a][b] = a*b."""

    table: np.ndarray
    identity: int
    inv: np.ndarray

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv_of(self, a: int) -> int:
        return int(self.inv[a])

    def conj(self, g: int, h: int) -> int:
        """g^-1 * h * g."""
        return int(self.table[self.table[self.inv[g], h], g])

    def elements(self) -> range:
        return range(self.order)

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv_of(a), -k)
        x = self.identity
        for _ in range(k):
            x = self.mul(x, a)
        return x

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return bool(np.array_equal(self.table, other.table))

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


def validate_group(table) -> FiniteGroup:
    """Validate a square id table and compute identity and inverses.

    Raises NotLatinSquare / NoIdentity / NotAssociative, each naming the
    first violating cell in row-major order.
    """
    arr = np.asarray(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"table must be square, got shape {arr.shape}")
    n = arr.shape[0]
    if n == 0:
        raise ValueError("table must be nonempty")
    if arr.min() < 0 or arr.max() >= n:
        bad = np.argwhere((arr < 0) | (arr >= n))[0]
        raise ValueError(f"entry out of range at cell {tuple(int(x) for x in bad)}")
    full = np.arange(n, dtype=np.int64)
    for i in range(n):
        seen: set[int] = set()
        for j in range(n):
            val = int(arr[i, j])
            if val in seen:
                raise NotLatinSquare((i, j))
            seen.add(val)
    for j in range(n):
        seen = set()
        for i in range(n):
            val = int(arr[i, j])
            if val in seen:
                raise NotLatinSquare((i, j))
            seen.add(val)
    identity = None
    for e in range(n):
        if np.array_equal(arr[e], full) and np.array_equal(arr[:, e], full):
            identity = e
            break
    if identity is None:
        raise NoIdentity()
    left = arr[arr, :]  # left[a,b,c]  = (a*b)*c
    right = arr[:, arr]  # right[a,b,c] = a*(b*c)
    bad = np.argwhere(left != right)
    if len(bad):
        raise NotAssociative(tuple(int(x) for x in bad[0]))
    inv = np.empty(n, dtype=np.int64)
    for a in range(n):
        inv[a] = int(np.argwhere(arr[a] == identity)[0])
    inv.setflags(write=False)
    arr.setflags(write=False)
    return FiniteGroup(arr, identity, inv)


# -- constructors ---------------------------------------------------------------


def trivial_group() -> FiniteGroup:
    return validate_group([[0]])


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise ValueError(f"order must be positive, got {n}")
    idx = np.arange(n)
    return validate_group((idx[:, None] + idx[None, :]) % n)


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Product group on pairs, encoded as a*|G2| + b."""
    n1, n2 = g1.order, g2.order
    a = np.arange(n1 * n2)
    x1, x2 = a // n2, a % n2
    table = g1.table[np.ix_(x1, x1)] * n2 + g2.table[np.ix_(x2, x2)]
    return validate_group(table)


def semidirect_product(h: FiniteGroup, q: FiniteGroup, act: Sequence[Sequence[int]]) -> FiniteGroup:
    """Semidirect product with product (h1,q1)(h2,q2) = (h1 * act[q1](h2), q1*q2).

    `act` maps each Q-id to a permutation of H-ids; it must be a
    homomorphism from Q into Aut(H).  Elements are encoded q*|H| + h, so
    H x {e} is the initial id block {0..|H|-1} when both identities are 0.
    """
    acts = [np.asarray(a, dtype=np.int64) for a in act]
    if len(acts) != q.order:
        raise ValueError(f"need one automorphism per Q element, got {len(acts)}")
    full = np.arange(h.order)
    for qi, perm in enumerate(acts):
        if perm.shape != (h.order,) or not np.array_equal(np.sort(perm), full):
            raise NotAutomorphism(qi, f"act[{qi}] is not a permutation of H")
        if not np.array_equal(perm[h.table], h.table[np.ix_(perm, perm)]):
            bad = np.argwhere(perm[h.table] != h.table[np.ix_(perm, perm)])[0]
            raise NotAutomorphism((qi, tuple(int(x) for x in bad)))
    for q1 in q.elements():
        for q2 in q.elements():
            if not np.array_equal(acts[q.mul(q1, q2)], acts[q1][acts[q2]]):
                raise ActionNotHomomorphic((q1, q2))
    n = h.order * q.order
    table = np.empty((n, n), dtype=np.int64)
    for q1 in q.elements():
        for h1 in h.elements():
            row = q.table[q1] * h.order  # q-part of products against all (h2,q2)
            h2_twisted = acts[q1]  # act[q1](h2) for each h2
            prod_h = h.table[h1][h2_twisted]  # h1 * act[q1](h2)
            table[q1 * h.order + h1] = (row[:, None] + prod_h[None, :]).reshape(-1)
    return validate_group(table)


def inversion_action(h: FiniteGroup) -> list[np.ndarray]:
    """The order-2 action of Z/2 on an abelian H by inversion."""
    if not h.is_abelian:
        raise NotAutomorphism(None, "inversion is an automorphism only for abelian H")
    return [np.arange(h.order, dtype=np.int64), h.inv.copy()]


def dihedral_group(n: int) -> FiniteGroup:
    """Dihedral group of order 2n, as Z/n twisted by inversion."""
    return semidirect_product(cyclic_group(n), cyclic_group(2), inversion_action(cyclic_group(n)))


def quaternion_group() -> FiniteGroup:
    """The 8-element quaternion group; ids are 1,-1,i,-i,j,-j,k,-k."""
    # sign in {0,1} for +,-, letter in {0:1, 1:i, 2:j, 3:k}; id = letter*2 + sign
    mul_letter = {
        (0, 0): (0, 0), (0, 1): (1, 0), (0, 2): (2, 0), (0, 3): (3, 0),
        (1, 0): (1, 0), (1, 1): (0, 1), (1, 2): (3, 0), (1, 3): (2, 1),
        (2, 0): (2, 0), (2, 1): (3, 1), (2, 2): (0, 1), (2, 3): (1, 0),
        (3, 0): (3, 0), (3, 1): (2, 0), (3, 2): (1, 1), (3, 3): (0, 1),
    }
    table = np.empty((8, 8), dtype=np.int64)
    for l1, s1, l2, s2 in itertools.product(range(4), range(2), range(4), range(2)):
        letter, extra = mul_letter[(l1, l2)]
        sign = (s1 + s2 + extra) % 2
        table[l1 * 2 + s1, l2 * 2 + s2] = letter * 2 + sign
    return validate_group(table)


# -- subgroups -------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    members: tuple[int, ...]  # sorted

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def position(self) -> dict[int, int]:
        """Member id -> index into the sorted member tuple."""
        return {g: i for i, g in enumerate(self.members)}

    def __contains__(self, g: int) -> bool:
        return g in self.position

    def __repr__(self) -> str:
        return f"Subgroup({list(self.members)})"


def subgroup(parent: FiniteGroup, members) -> Subgroup:
    mem = tuple(sorted(set(int(x) for x in members)))
    if not mem:
        raise NotASubgroup(None, "member set is empty")
    if any(x < 0 or x >= parent.order for x in mem):
        raise NotASubgroup(mem, "member id out of range")
    memset = set(mem)
    if parent.identity not in memset:
        raise NotASubgroup(parent.identity, "identity missing")
    for a in mem:
        if parent.inv_of(a) not in memset:
            raise NotASubgroup(a, f"inverse of {a} missing")
        for b in mem:
            if parent.mul(a, b) not in memset:
                raise NotASubgroup((a, b), f"product {a}*{b} escapes the set")
    return Subgroup(parent, mem)


def trivial_subgroup(parent: FiniteGroup) -> Subgroup:
    return Subgroup(parent, (parent.identity,))


def full_subgroup(parent: FiniteGroup) -> Subgroup:
    return Subgroup(parent, tuple(range(parent.order)))


def is_normal(g: FiniteGroup, h: Subgroup) -> bool:
    """True iff conj(x, member) stays in the member set for every x."""
    if h.parent != g:
        raise ValueError("subgroup belongs to a different group")
    memset = set(h.members)
    return all(g.conj(x, m) in memset for x in g.elements() for m in h.members)


def require_normal(g: FiniteGroup, h: Subgroup) -> None:
    if h.parent != g:
        raise ValueError("subgroup belongs to a different group")
    memset = set(h.members)
    for x in g.elements():
        for m in h.members:
            if g.conj(x, m) not in memset:
                raise NotNormalSubgroup((x, m))


def closure(g: FiniteGroup, seed) -> tuple[int, ...]:
    """Smallest subgroup member set containing the seed elements."""
    members = {g.identity}
    frontier = [int(x) for x in seed]
    members.update(frontier)
    while frontier:
        new = []
        for a in list(members):
            for b in frontier:
                for c in (g.mul(a, b), g.mul(b, a)):
                    if c not in members:
                        members.add(c)
                        new.append(c)
        for b in frontier:
            c = g.inv_of(b)
            if c not in members:
                members.add(c)
                new.append(c)
        frontier = new
    return tuple(sorted(members))


def commutator_subgroup(g: FiniteGroup) -> Subgroup:
    """Smallest subgroup containing all a^-1 b^-1 a b."""
    comms = set()
    for a in g.elements():
        for b in g.elements():
            comms.add(g.mul(g.mul(g.inv_of(a), g.inv_of(b)), g.mul(a, b)))
    return subgroup(g, closure(g, comms))


def quotient_group(g: FiniteGroup, n: Subgroup) -> tuple[FiniteGroup, "GroupHom"]:
    """Quotient by a normal subgroup; coset ids follow sorted minimal reps."""
    require_normal(g, n)
    coset_of = {}
    reps = []
    for a in g.elements():
        if a in coset_of:
            continue
        coset = sorted(g.mul(a, m) for m in n.members)
        for x in coset:
            coset_of[x] = len(reps)
        reps.append(coset[0])
    order_ids = sorted(range(len(reps)), key=lambda i: reps[i])
    relabel = {old: new for new, old in enumerate(order_ids)}
    proj = np.array([relabel[coset_of[a]] for a in g.elements()], dtype=np.int64)
    reps_sorted = sorted(reps)
    k = len(reps_sorted)
    table = np.empty((k, k), dtype=np.int64)
    for i, a in enumerate(reps_sorted):
        for j, b in enumerate(reps_sorted):
            table[i, j] = proj[g.mul(a, b)]
    quot = validate_group(table)
    return quot, group_hom(g, quot, proj)


def abelianization(g: FiniteGroup) -> tuple[FiniteGroup, "GroupHom"]:
    """G/[G,G] with the projection; for abelian G this is the identity map."""
    quot, proj = quotient_group(g, commutator_subgroup(g))
    assert quot.is_abelian
    return quot, proj


def all_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """Every subgroup, built by closing generator sets; sorted by (order, members)."""
    found = {(g.identity,)}
    frontier = [(g.identity,)]
    while frontier:
        nxt = []
        for mem in frontier:
            memset = set(mem)
            for x in g.elements():
                if x in memset:
                    continue
                grown = closure(g, mem + (x,))
                if grown not in found:
                    found.add(grown)
                    nxt.append(grown)
        frontier = nxt
    return [Subgroup(g, mem) for mem in sorted(found, key=lambda m: (len(m), m))]


def normal_subgroups(g: FiniteGroup) -> list[Subgroup]:
    return [h for h in all_subgroups(g) if is_normal(g, h)]


# -- homomorphisms ---------------------------------------------------------------


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.image[a]

    @property
    def is_bijective(self) -> bool:
        return len(set(self.image)) == self.source.order == self.target.order

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self o inner."""
        if inner.target != self.source:
            raise ValueError("composition shape mismatch")
        return GroupHom(inner.source, self.target, tuple(self.image[x] for x in inner.image))

    def __repr__(self) -> str:
        return f"GroupHom({list(self.image)})"


def group_hom(source: FiniteGroup, target: FiniteGroup, image) -> GroupHom:
    img = tuple(int(x) for x in image)
    if len(img) != source.order:
        raise NotAHomomorphism(None, f"image has {len(img)} entries for order {source.order}")
    if any(x < 0 or x >= target.order for x in img):
        raise NotAHomomorphism(None, "image id out of range")
    arr = np.asarray(img, dtype=np.int64)
    lhs = arr[source.table]
    rhs = target.table[np.ix_(arr, arr)]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise NotAHomomorphism(tuple(int(x) for x in bad[0]))
    if img[source.identity] != target.identity:
        raise NotAHomomorphism(source.identity, "identity not preserved")
    return GroupHom(source, target, img)


def identity_hom(g: FiniteGroup) -> GroupHom:
    return GroupHom(g, g, tuple(range(g.order)))


def generating_set(g: FiniteGroup) -> tuple[int, ...]:
    """A small generating set, chosen greedily and deterministically."""
    gens: tuple[int, ...] = ()
    generated = {g.identity}
    for x in g.elements():
        if x not in generated:
            gens = gens + (x,)
            generated = set(closure(g, gens))
            if len(generated) == g.order:
                break
    return gens


def _extend_from_generators(
    source: FiniteGroup, target: FiniteGroup, gens: Sequence[int], images: Sequence[int]
) -> Optional[tuple[int, ...]]:
    """Propagate generator images to a full map; None when inconsistent."""
    img = [-1] * source.order
    img[source.identity] = target.identity
    for a, b in zip(gens, images):
        if img[a] not in (-1, b):
            return None
        img[a] = b
    changed = True
    while changed:
        changed = False
        known = [a for a in source.elements() if img[a] >= 0]
        for a in known:
            for b in known:
                ab = source.mul(a, b)
                val = target.mul(img[a], img[b])
                if img[ab] == -1:
                    img[ab] = val
                    changed = True
                elif img[ab] != val:
                    return None
    if any(x == -1 for x in img):
        return None  # generators did not generate; cannot happen for generating_set
    return tuple(img)


def enumerate_homs(
    source: FiniteGroup, target: FiniteGroup, cap: int = DEFAULT_ENUM_CAP
) -> list[GroupHom]:
    """All homomorphisms source -> target, by brute force over generator images."""
    gens = generating_set(source)
    if not gens:
        return [GroupHom(source, target, tuple([target.identity] * source.order))]
    candidate_sets = []
    for a in gens:
        na = source.element_order(a)
        candidate_sets.append([x for x in target.elements() if na % target.element_order(x) == 0])
    total = 1
    for cs in candidate_sets:
        total *= len(cs)
        if total > cap:
            raise EnumerationCapExceeded(total, cap)
    homs = []
    for images in itertools.product(*candidate_sets):
        img = _extend_from_generators(source, target, gens, images)
        if img is not None:
            homs.append(img)
    homs = sorted(set(homs))
    return [GroupHom(source, target, img) for img in homs]


def enumerate_isomorphisms(
    g1: FiniteGroup, g2: FiniteGroup, cap: int = DEFAULT_ENUM_CAP
) -> list[GroupHom]:
    """All isomorphisms g1 -> g2 (brute force over generator images)."""
    if g1.order != g2.order:
        return []
    gens = generating_set(g1)
    if not gens:
        return [GroupHom(g1, g2, (g2.identity,))]
    candidate_sets = [
        [x for x in g2.elements() if g2.element_order(x) == g1.element_order(a)] for a in gens
    ]
    total = 1
    for cs in candidate_sets:
        total *= len(cs)
        if total > cap:
            raise EnumerationCapExceeded(total, cap)
    isos = []
    for images in itertools.product(*candidate_sets):
        img = _extend_from_generators(g1, g2, gens, images)
        if img is not None and len(set(img)) == g1.order:
            isos.append(img)
    return [GroupHom(g1, g2, img) for img in sorted(set(isos))]


def find_isomorphism(g1: FiniteGroup, g2: FiniteGroup, cap: int = DEFAULT_ENUM_CAP) -> Optional[GroupHom]:
    isos = enumerate_isomorphisms(g1, g2, cap)
    return isos[0] if isos else None


def automorphism_group(g: FiniteGroup, cap: int = DEFAULT_ENUM_CAP) -> tuple[FiniteGroup, list[GroupHom]]:
    """Aut(G) as a table group plus the list of automorphisms it indexes.

    Composition convention: table[i][j] is the index of auts[i] o auts[j].
    """
    auts = enumerate_isomorphisms(g, g, cap)
    index = {a.image: i for i, a in enumerate(auts)}
    k = len(auts)
    table = np.empty((k, k), dtype=np.int64)
    for i, a in enumerate(auts):
        for j, b in enumerate(auts):
            table[i, j] = index[a.compose(b).image]
    return validate_group(table), auts
