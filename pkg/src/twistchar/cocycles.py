"""2-cocycles and coboundaries valued in roots of unity.

Covers the change-of-lifting algebra: antisymmetrizing a 2-cocycle into a
bicharacter, twisting a bicharacter by a re-lifting cocycle, and the
constructive witness that a symmetric cocycle on an abelian group is a
coboundary.  Cohomology class counting is modulus-relative and every
report carries the modulus; H^2(., Z/m) at a fixed m is not H^2(., T).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .abelian import AbelianGroup, Bicharacter, validate_bicharacter
from .errors import (
    CocycleIdentityFails,
    EnumerationCapExceeded,
    NotNormalized,
    NotSymmetric,
    ShapeMismatch,
    WitnessNotFound,
)
from .groups import DEFAULT_ENUM_CAP, FiniteGroup
from .phases import ModularSystem, PhaseFunction

GroupLike = Union[FiniteGroup, AbelianGroup]


def _as_table(grp: GroupLike) -> FiniteGroup:
    return grp.as_table_group if isinstance(grp, AbelianGroup) else grp


@dataclass(frozen=True)
class TwoCocycle:
    group: GroupLike
    values: PhaseFunction  # (n, n) by element index

    @property
    def table_group(self) -> FiniteGroup:
        return _as_table(self.group)

    def value(self, a: int, b: int):
        return self.values.value(a, b)

    def rescale(self, modulus: int) -> "TwoCocycle":
        return TwoCocycle(self.group, self.values.rescale(modulus))

    def mul(self, other: "TwoCocycle") -> "TwoCocycle":
        return TwoCocycle(self.group, self.values.mul(other.values))

    def conj(self) -> "TwoCocycle":
        return TwoCocycle(self.group, self.values.conj())

    def is_symmetric(self) -> bool:
        e, m = self.values.exps, self.values.modulus
        return bool(np.all((e - e.T) % m == 0))


def validate_2cocycle(grp: GroupLike, values: PhaseFunction) -> TwoCocycle:
    """Check normalization and the cocycle identity
    mu(h,k) mu(hk,l) = mu(k,l) mu(h,kl) over all triples."""
    table = _as_table(grp).table
    n = table.shape[0]
    if values.shape != (n, n):
        raise ShapeMismatch(f"values shape {values.shape}, expected {(n, n)}")
    e_id = _as_table(grp).identity
    exps, m = values.exps, values.modulus
    bad = np.argwhere(exps[e_id, :] % m != 0)
    if len(bad):
        raise NotNormalized((e_id, int(bad[0][0])))
    bad = np.argwhere(exps[:, e_id] % m != 0)
    if len(bad):
        raise NotNormalized((int(bad[0][0]), e_id))
    lhs = (exps[:, :, None] + exps[table, :]) % m  # mu(h,k) + mu(hk,l)
    rhs = (exps[None, :, :] + exps[:, table]) % m  # mu(k,l) + mu(h,kl)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        raise CocycleIdentityFails(tuple(int(x) for x in bad[0]))
    return TwoCocycle(grp, values)


def trivial_cocycle(grp: GroupLike, modulus: int = 1) -> TwoCocycle:
    n = _as_table(grp).order
    return TwoCocycle(grp, PhaseFunction.ones((n, n), modulus))


def coboundary(grp: GroupLike, c_exps, modulus: int) -> TwoCocycle:
    """The coboundary of c: (h,k) -> c(h) c(k) conj(c(hk)); c(e) forced to 1."""
    table = _as_table(grp).table
    e_id = _as_table(grp).identity
    c = np.asarray(c_exps, dtype=np.int64) % modulus
    if c.shape != (table.shape[0],):
        raise ShapeMismatch(f"c has shape {c.shape}, expected ({table.shape[0]},)")
    if c[e_id] % modulus != 0:
        raise NotNormalized((e_id,), "c(e) must be 1")
    exps = (c[:, None] + c[None, :] - c[table]) % modulus
    return validate_2cocycle(grp, PhaseFunction(exps, modulus))


def antisymmetrize(mu: TwoCocycle) -> Bicharacter:
    """(h,k) -> mu(h,k) conj(mu(k,h)), validated as a bicharacter.

    The validation is the point: for any 2-cocycle on an abelian group this
    must come out bimultiplicative.
    """
    if not isinstance(mu.group, AbelianGroup):
        raise ValueError("antisymmetrize needs a cocycle on an AbelianGroup")
    exps, m = mu.values.exps, mu.values.modulus
    return validate_bicharacter(mu.group, PhaseFunction((exps - exps.T) % m, m))


def twist_kappa(kappa: Bicharacter, mu: TwoCocycle) -> Bicharacter:
    """The bicharacter of the re-lifted choice: kappa * antisymmetrize(mu)."""
    if not isinstance(mu.group, AbelianGroup) or mu.group != kappa.group:
        raise ShapeMismatch("kappa and mu must live on the same AbelianGroup")
    twisted = kappa.values.mul(antisymmetrize(mu).values)
    return validate_bicharacter(kappa.group, twisted)


@dataclass(frozen=True)
class CoboundaryWitness:
    c: PhaseFunction  # shape (n,), c(e) = 1
    target: TwoCocycle

    def check(self) -> bool:
        table = self.target.table_group.table
        m = math.lcm(self.c.modulus, self.target.values.modulus)
        c = self.c.rescale(m).exps
        mu = self.target.values.rescale(m).exps
        return bool(np.all((c[:, None] + c[None, :] - c[table] - mu) % m == 0))


_witness_systems: dict[FiniteGroup, ModularSystem] = {}


def _witness_system(tg: FiniteGroup) -> ModularSystem:
    """Rows: one equation c(h)+c(k)-c(hk) per (h,k); unknowns c on non-identity
    elements.  Integer matrix, so one Smith form serves every modulus stage."""
    sys_ = _witness_systems.get(tg)
    if sys_ is not None:
        return sys_
    n = tg.order
    e_id = tg.identity
    cols = [a for a in range(n) if a != e_id]
    col_of = {a: i for i, a in enumerate(cols)}
    rows = []
    for h in range(n):
        for k in range(n):
            row = [0] * len(cols)
            if h != e_id:
                row[col_of[h]] += 1
            if k != e_id:
                row[col_of[k]] += 1
            hk = tg.mul(h, k)
            if hk != e_id:
                row[col_of[hk]] -= 1
            rows.append(row)
    sys_ = ModularSystem(rows)
    _witness_systems[tg] = sys_
    return sys_


def symmetric_witness(mu: TwoCocycle) -> CoboundaryWitness:
    """Constructive witness that a symmetric normalized 2-cocycle on an
    abelian group is a coboundary.

    Poses c(h)+c(k)-c(hk) = log mu(h,k) additively and solves it at modulus
    M, 2M, 3M, ... up to M*exponent(K), enlarging until solvable; the
    witness is re-verified exactly before returning.
    """
    if not isinstance(mu.group, AbelianGroup):
        raise ValueError("symmetric_witness needs a cocycle on an AbelianGroup")
    exps, m = mu.values.exps, mu.values.modulus
    bad = np.argwhere((exps - exps.T) % m != 0)
    if len(bad):
        raise NotSymmetric(tuple(int(x) for x in bad[0]))
    tg = mu.group.as_table_group
    e_id = tg.identity
    n = tg.order
    cols = [a for a in range(n) if a != e_id]
    sys_ = _witness_system(tg)
    b_base = [int(exps[h, k]) for h in range(n) for k in range(n)]
    stages = max(1, mu.group.exponent)
    for s in range(1, stages + 1):
        mm = m * s
        x = sys_.solve([v * s for v in b_base], mm)
        if x is None:
            continue
        c = np.zeros(n, dtype=np.int64)
        for a, val in zip(cols, x):
            c[a] = int(val)
        witness = CoboundaryWitness(PhaseFunction(c, mm), mu)
        if not witness.check():  # solver contract violated; never expected
            raise AssertionError("witness failed re-verification")
        return witness
    raise WitnessNotFound(
        {
            "cyclic_orders": list(mu.group.cyclic_orders),
            "modulus": m,
            "stages_tried": stages,
            "values": exps.tolist(),
        }
    )


def enumerate_cocycles(grp: GroupLike, modulus: int, cap: int = DEFAULT_ENUM_CAP) -> list[TwoCocycle]:
    """All normalized 2-cocycles with values in the modulus-th roots of unity."""
    tg = _as_table(grp)
    n = tg.order
    e_id = tg.identity
    cells = [(h, k) for h in range(n) for k in range(n) if h != e_id and k != e_id]
    col_of = {cell: i for i, cell in enumerate(cells)}

    def coeff_row():
        return [0] * len(cells)

    rows = []
    for h in range(n):
        for k in range(n):
            hk = tg.mul(h, k)
            for l in range(n):
                kl = tg.mul(k, l)
                row = coeff_row()
                for sign, cell in ((1, (h, k)), (1, (hk, l)), (-1, (k, l)), (-1, (h, kl))):
                    if cell in col_of:
                        row[col_of[cell]] += sign
                if any(row):
                    rows.append(row)
    if not rows:
        rows = [coeff_row()]
    space = ModularSystem(rows).solution_space([0] * len(rows), modulus)
    assert space is not None  # homogeneous
    if space.count() > cap:
        raise EnumerationCapExceeded(space.count(), cap)
    out = []
    for x in sorted(tuple(int(v) for v in s) for s in space.iterate()):
        exps = np.zeros((n, n), dtype=np.int64)
        for cell, val in zip(cells, x):
            exps[cell] = val
        out.append(TwoCocycle(grp, PhaseFunction(exps, modulus)))
    return out


def enumerate_coboundaries(grp: GroupLike, modulus: int, cap: int = DEFAULT_ENUM_CAP) -> list[TwoCocycle]:
    """All coboundaries of c-functions valued in the modulus-th roots."""
    tg = _as_table(grp)
    n = tg.order
    free = n - 1
    if modulus**free > cap:
        raise EnumerationCapExceeded(modulus**free, cap)
    e_id = tg.identity
    seen = set()
    out = []
    import itertools as _it

    for vals in _it.product(range(modulus), repeat=free):
        c = np.zeros(n, dtype=np.int64)
        i = 0
        for a in range(n):
            if a != e_id:
                c[a] = vals[i]
                i += 1
        cob = coboundary(grp, c, modulus)
        key = bytes(cob.values.exps)
        if key not in seen:
            seen.add(key)
            out.append(cob)
    return out


def cohomology_reps(grp: GroupLike, modulus: int, cap: int = DEFAULT_ENUM_CAP) -> list[TwoCocycle]:
    """One canonical representative per coboundary class at the given modulus.

    Class counting is modulus-relative: a cocycle trivialized only by
    enlarging the modulus still counts as nontrivial here.  Representatives
    are the lexicographically least table in each class, sorted.
    """
    tg = _as_table(grp)
    n = tg.order
    cocycles = enumerate_cocycles(grp, modulus, cap)
    coboundaries = enumerate_coboundaries(grp, modulus, cap)
    shifts = [cob.values.exps for cob in coboundaries]
    reps = {}
    for z in cocycles:
        ze = z.values.exps
        best = min(tuple(int(v) for v in ((ze + s) % modulus).reshape(-1)) for s in shifts)
        if best not in reps:
            reps[best] = TwoCocycle(grp, PhaseFunction(np.array(best, dtype=np.int64).reshape(n, n), modulus))
    return [reps[k] for k in sorted(reps)]
