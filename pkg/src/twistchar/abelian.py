"""Finite abelian groups in decomposed form, their dual pairing, and bicharacters.

The group K is always given as a direct sum of cyclic factors; elements are
exponent tuples.  The dual is identified with K coordinate-wise through the
pairing <k,p> = exp(2*pi*i * sum k_i p_i M/n_i / M), M = lcm(n_i), so no
decomposition-independent dual is ever needed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    EnumerationCapExceeded,
    NotBimultiplicative,
    NotCyclic,
    NotGenerator,
    ShapeMismatch,
)
from .groups import DEFAULT_ENUM_CAP, FiniteGroup, GroupHom, validate_group
from .phases import Phase, PhaseFunction


@dataclass(frozen=True)
class AbelianGroup:
    cyclic_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.cyclic_orders)
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic orders must be positive, got {orders}")
        object.__setattr__(self, "cyclic_orders", orders)

    @property
    def rank(self) -> int:
        return len(self.cyclic_orders)

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    @property
    def exponent(self) -> int:
        return math.lcm(*self.cyclic_orders) if self.cyclic_orders else 1

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, a, b) -> tuple[int, ...]:
        self._check(a), self._check(b)
        return tuple((x + y) % n for x, y, n in zip(a, b, self.cyclic_orders))

    def neg(self, a) -> tuple[int, ...]:
        self._check(a)
        return tuple((-x) % n for x, n in zip(a, self.cyclic_orders))

    def scale(self, m: int, a) -> tuple[int, ...]:
        self._check(a)
        return tuple((m * x) % n for x, n in zip(a, self.cyclic_orders))

    def element_order(self, a) -> int:
        self._check(a)
        return math.lcm(*(n // math.gcd(x, n) for x, n in zip(a, self.cyclic_orders))) if a else 1

    def elements(self):
        return itertools.product(*(range(n) for n in self.cyclic_orders))

    def index(self, a) -> int:
        """Mixed-radix index of an element tuple (big-endian, matches elements())."""
        self._check(a)
        i = 0
        for x, n in zip(a, self.cyclic_orders):
            i = i * n + x
        return i

    def element(self, i: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.cyclic_orders):
            out.append(i % n)
            i //= n
        return tuple(reversed(out))

    def _check(self, a) -> None:
        if len(a) != self.rank:
            raise ShapeMismatch(f"element {a} does not match orders {self.cyclic_orders}")

    @cached_property
    def coordinate_matrix(self) -> np.ndarray:
        """Row i = coordinates of the element with index i."""
        arr = np.array([self.element(i) for i in range(self.order)], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @cached_property
    def as_table_group(self) -> FiniteGroup:
        """The same group as a multiplication table; id i <-> element(i)."""
        n = self.order
        table = np.empty((n, n), dtype=np.int64)
        for i in range(n):
            a = self.element(i)
            for j in range(n):
                table[i, j] = self.index(self.add(a, self.element(j)))
        return validate_group(table)

    def to_json(self) -> list[int]:
        return list(self.cyclic_orders)


def pairing(k_group: AbelianGroup, k, p) -> Phase:
    """Dual pairing <k,p> at modulus exponent(K)."""
    k_group._check(k)
    k_group._check(p)
    m = k_group.exponent
    e = sum(ki * pi * (m // n) for ki, pi, n in zip(k, p, k_group.cyclic_orders))
    return Phase(e, m)


@dataclass(frozen=True)
class Bicharacter:
    """A function on K x K, multiplicative in each slot, as a phase table
    indexed by element indices."""

    group: AbelianGroup
    values: PhaseFunction

    def value(self, h, k) -> Phase:
        return self.values.value(self.group.index(h), self.group.index(k))

    def rescale(self, modulus: int) -> "Bicharacter":
        return Bicharacter(self.group, self.values.rescale(modulus))

    def is_trivial(self) -> bool:
        return self.values.is_one()


def validate_bicharacter(k_group: AbelianGroup, values: PhaseFunction) -> Bicharacter:
    """Check bimultiplicativity on all triples; the witness names the first
    violating (a, b, c) and the failing slot."""
    n = k_group.order
    if values.shape != (n, n):
        raise ShapeMismatch(f"values shape {values.shape}, expected {(n, n)}")
    table = k_group.as_table_group.table
    exps, m = values.exps, values.modulus
    lhs = exps[table, :]  # lhs[a,b,c] = kappa(a+b, c)
    rhs = (exps[:, None, :] + exps[None, :, :]) % m
    bad = np.argwhere((lhs - rhs) % m != 0)
    if len(bad):
        raise NotBimultiplicative(("left", tuple(int(x) for x in bad[0])))
    lhs = exps[:, table]  # lhs[a,b,c] = kappa(a, b+c)
    rhs = (exps[:, :, None] + exps[:, None, :]) % m
    bad = np.argwhere((lhs - rhs) % m != 0)
    if len(bad):
        raise NotBimultiplicative(("right", tuple(int(x) for x in bad[0])))
    return Bicharacter(k_group, values)


def trivial_bicharacter(k_group: AbelianGroup) -> Bicharacter:
    return Bicharacter(k_group, PhaseFunction.ones((k_group.order, k_group.order)))


def bicharacter_from_generators(k_group: AbelianGroup, gen_matrix, modulus: int | None = None) -> Bicharacter:
    """Build the full table from values on generator pairs.

    gen_matrix[i][j] is the exponent of kappa(e_i, e_j) at the given modulus
    (default exponent(K)).  Each entry must kill both generator orders,
    i.e. be a multiple of modulus/gcd(n_i, n_j); otherwise no bicharacter
    has these generator values.
    """
    m = k_group.exponent if modulus is None else int(modulus)
    b = np.asarray(gen_matrix, dtype=np.int64) % m
    r = k_group.rank
    if b.shape != (r, r):
        raise ShapeMismatch(f"generator matrix shape {b.shape}, expected {(r, r)}")
    for i, ni in enumerate(k_group.cyclic_orders):
        for j, nj in enumerate(k_group.cyclic_orders):
            if (b[i, j] * ni) % m != 0 or (b[i, j] * nj) % m != 0:
                raise NotBimultiplicative(("generators", (i, j)))
    coords = k_group.coordinate_matrix
    exps = (coords @ b @ coords.T) % m
    return Bicharacter(k_group, PhaseFunction(exps, m))


def generator_matrix(kappa: Bicharacter) -> np.ndarray:
    """Exponents of kappa on generator pairs, at the table's modulus."""
    kk = kappa.group
    gens = [kk.index(tuple(int(i == j) for j in range(kk.rank))) for i in range(kk.rank)]
    return kappa.values.exps[np.ix_(gens, gens)].copy()


def enumerate_bicharacters(k_group: AbelianGroup, cap: int = DEFAULT_ENUM_CAP) -> list[Bicharacter]:
    """All bicharacters of K; count is the product of gcd(n_i, n_j)."""
    m = k_group.exponent
    orders = k_group.cyclic_orders
    r = k_group.rank
    steps = [[m // math.gcd(ni, nj) for nj in orders] for ni in orders]
    total = math.prod(math.gcd(ni, nj) for ni in orders for nj in orders)
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    out = []
    choices = [range(math.gcd(orders[i], orders[j])) for i in range(r) for j in range(r)]
    for picks in itertools.product(*choices):
        b = np.array(picks, dtype=np.int64).reshape(r, r)
        for i in range(r):
            for j in range(r):
                b[i, j] *= steps[i][j]
        out.append(bicharacter_from_generators(k_group, b, m))
    return out


def pairing_bicharacter(k_group: AbelianGroup) -> Bicharacter:
    """The dual pairing itself, as a bicharacter table."""
    m = k_group.exponent
    n = k_group.order
    exps = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        a = k_group.element(i)
        for j in range(n):
            exps[i, j] = pairing(k_group, a, k_group.element(j)).rescale(m).exponent
    return Bicharacter(k_group, PhaseFunction(exps, m))


def enumerate_automorphisms(k_group: AbelianGroup, cap: int = 16) -> list[GroupHom]:
    """All automorphisms of K, as table-group homomorphisms (cap on |K|)."""
    if k_group.order > cap:
        raise EnumerationCapExceeded(k_group.order, cap)
    tg = k_group.as_table_group
    elements = list(k_group.elements())
    candidate_sets = []
    for ni in k_group.cyclic_orders:
        candidate_sets.append([e for e in elements if ni % k_group.element_order(e) == 0])
    out = []
    for images in itertools.product(*candidate_sets):
        seen = set()
        img = []
        for a in elements:
            val = k_group.zero()
            for ai, im in zip(a, images):
                val = k_group.add(val, k_group.scale(ai, im))
            img.append(k_group.index(val))
        if len(set(img)) == k_group.order:
            out.append(GroupHom(tg, tg, tuple(img)))
    return sorted(out, key=lambda h: h.image)


def is_aut_invariant(kappa: Bicharacter, theta: GroupHom) -> bool:
    """True iff kappa(theta h, theta k) = kappa(h, k) for all h, k."""
    tg = kappa.group.as_table_group
    if theta.source != tg or theta.target != tg or not theta.is_bijective:
        raise ValueError("theta must be an automorphism of K's table group")
    perm = np.asarray(theta.image, dtype=np.int64)
    exps, m = kappa.values.exps, kappa.values.modulus
    return bool(np.array_equal(exps[np.ix_(perm, perm)] % m, exps % m))


def cyclic_power_identity(kappa: Bicharacter, g, m: int, n: int) -> bool:
    """Self-check: kappa(g^m, g^n) equals kappa(g,g)^(m*n) on cyclic K.

    Holds for every valid bicharacter; exposed so tests can exercise it.
    """
    kk = kappa.group
    if kk.exponent != kk.order:
        raise NotCyclic(f"orders {kk.cyclic_orders} give a non-cyclic group")
    kk._check(g)
    if kk.element_order(g) != kk.order:
        raise NotGenerator(f"{g} does not generate K")
    lhs = kappa.value(kk.scale(m, g), kk.scale(n, g))
    rhs = kappa.value(g, g) ** (m * n)
    return lhs == rhs
