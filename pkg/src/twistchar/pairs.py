"""Twisted characteristic pairs and their classification data.

A pair is (lambda: G x H -> T, mu: H x H -> T) subject to five relations;
the bicharacter kappa enters only through relation (4),
lambda(h,k) = mu(h, h^-1 k h) conj(mu(k,h) kappa(nu(k), nu(h))),
which is what separates the twisted theory from the classical one.

Relation (3) is read with lambda(g,k) in its third factor; the variable l
printed there is unbound (it is bound only in relation (1)), and the
relation compares lambda(g,hk) against lambda(g,h)lambda(g,k).  Every
machine-readable validation report carries this note.

All five relations, and the re-choice of transversal unitaries
(lambda'(g,h) = lambda(g,h) c(g^-1 h g) conj(c(h)),
 mu'(h,k) = mu(h,k) c(h) c(k) conj(c(hk))),
are linear in the phase exponents, so enumeration and equivalence are
solved exactly with the modular linear solver instead of raw search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .abelian import AbelianGroup, Bicharacter, trivial_bicharacter
from .errors import (
    ContextMismatch,
    EnumerationCapExceeded,
    ExtensionObstructed,
    NotAnExtension,
    RelationFails,
    ShapeMismatch,
)
from .extend import NuInvariant, decide_extension
from .groups import DEFAULT_ENUM_CAP, FiniteGroup, GroupHom, Subgroup, require_normal
from .phases import ModularSystem, PhaseFunction

RELATION_3_NOTE = "relation (3) read with lambda(g,k) in place of the unbound lambda(g,l)"


@dataclass(frozen=True)
class PairContext:
    """Everything a pair is validated against: (G, H, K, kappa, nu, modulus)."""

    group: FiniteGroup
    subgroup: Subgroup
    target: AbelianGroup
    kappa: Bicharacter
    nu: NuInvariant
    modulus: int

    @cached_property
    def members(self) -> np.ndarray:
        return np.array(self.subgroup.members, dtype=np.int64)

    @cached_property
    def e_h(self) -> int:
        """Index of the identity inside the sorted member tuple."""
        return self.subgroup.position[self.group.identity]

    @cached_property
    def h_table(self) -> np.ndarray:
        """h_table[i,j] = member index of members[i] * members[j]."""
        pos = self.subgroup.position
        mem = self.subgroup.members
        return np.array([[pos[self.group.mul(a, b)] for b in mem] for a in mem], dtype=np.int64)

    @cached_property
    def conj_index(self) -> np.ndarray:
        """conj_index[g, i] = member index of g^-1 * members[i] * g."""
        pos = self.subgroup.position
        mem = self.subgroup.members
        return np.array(
            [[pos[self.group.conj(g, a)] for a in mem] for g in self.group.elements()],
            dtype=np.int64,
        )

    @cached_property
    def kappa_nu(self) -> np.ndarray:
        """kappa_nu[i, j] = exponent of kappa(nu(h_i), nu(h_j)) at self.modulus."""
        idx = self.nu.value_indices
        kexp = self.kappa.values.rescale(self.modulus).exps
        return kexp[np.ix_(idx, idx)]

    @cached_property
    def lambda_cells(self) -> list[tuple[int, int]]:
        """Free lambda entries (g, member index), identity row and column excluded."""
        e_g = self.group.identity
        return [
            (g, i)
            for g in self.group.elements()
            if g != e_g
            for i in range(self.subgroup.order)
            if i != self.e_h
        ]

    @cached_property
    def mu_cells(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.subgroup.order)
            if i != self.e_h
            for j in range(self.subgroup.order)
            if j != self.e_h
        ]

    @cached_property
    def perturbation_matrix(self) -> list[list[int]]:
        """Rows: effect of c on each free cell; columns: c on non-identity members."""
        n_h = self.subgroup.order
        c_cols = [i for i in range(n_h) if i != self.e_h]
        col_of = {i: j for j, i in enumerate(c_cols)}
        rows = []
        for g, i in self.lambda_cells:
            row = [0] * len(c_cols)
            ci = int(self.conj_index[g, i])
            if ci != self.e_h:
                row[col_of[ci]] += 1
            row[col_of[i]] -= 1
            rows.append(row)
        for i, j in self.mu_cells:
            row = [0] * len(c_cols)
            row[col_of[i]] += 1
            row[col_of[j]] += 1
            ij = int(self.h_table[i, j])
            if ij != self.e_h:
                row[col_of[ij]] -= 1
            rows.append(row)
        return rows


def pair_context(
    group: FiniteGroup,
    subgroup_: Subgroup,
    target: AbelianGroup,
    kappa: Bicharacter,
    nu: NuInvariant,
    modulus: Optional[int] = None,
) -> PairContext:
    """Validated context; the working modulus defaults to lcm(|G|, exponent(K))
    and always absorbs kappa's modulus."""
    require_normal(group, subgroup_)
    if kappa.group != target:
        raise ContextMismatch("kappa lives on a different K")
    if nu.subgroup != subgroup_ or nu.target != target:
        raise ContextMismatch("nu does not match (H, K)")
    m = math.lcm(group.order, target.exponent) if modulus is None else int(modulus)
    m = math.lcm(m, kappa.values.modulus)
    return PairContext(group, subgroup_, target, kappa, nu, m)


@dataclass(frozen=True)
class CharacteristicPair:
    context: PairContext
    lam: PhaseFunction  # (|G|, |H|)
    mu: PhaseFunction  # (|H|, |H|)

    @property
    def modulus(self) -> int:
        return self.lam.modulus

    def vector(self) -> tuple[int, ...]:
        """Free entries as one flat exponent vector (lambda cells, then mu cells)."""
        ctx = self.context
        lam, mu = self.lam.exps, self.mu.exps
        out = [int(lam[g, i]) for g, i in ctx.lambda_cells]
        out.extend(int(mu[i, j]) for i, j in ctx.mu_cells)
        return tuple(out)


def _first_failure(delta: np.ndarray, modulus: int) -> Optional[tuple[int, ...]]:
    bad = np.argwhere(delta % modulus != 0)
    if len(bad):
        return tuple(int(x) for x in bad[0])
    return None


def validate_pair(ctx: PairContext, lam: PhaseFunction, mu: PhaseFunction) -> CharacteristicPair:
    """Check relations (1)-(5) exactly; raises RelationFails(index, witness).

    Witnesses name group element ids (members for H slots).  Tables are
    rescaled to a common working modulus and stored at it.
    """
    n_g, n_h = ctx.group.order, ctx.subgroup.order
    if lam.shape != (n_g, n_h):
        raise ShapeMismatch(f"lambda shape {lam.shape}, expected {(n_g, n_h)}")
    if mu.shape != (n_h, n_h):
        raise ShapeMismatch(f"mu shape {mu.shape}, expected {(n_h, n_h)}")
    m = math.lcm(ctx.modulus, lam.modulus, mu.modulus)
    lam = lam.rescale(m)
    mu = mu.rescale(m)
    el, eu = lam.exps, mu.exps
    mem = ctx.members
    ht = ctx.h_table
    ci = ctx.conj_index
    gt = ctx.group.table

    # (1) mu(h,k) mu(hk,l) = mu(k,l) mu(h,kl)
    delta = (eu[:, :, None] + eu[ht, :]) - (eu[None, :, :] + eu[:, ht])
    w = _first_failure(delta, m)
    if w:
        raise RelationFails(1, (int(mem[w[0]]), int(mem[w[1]]), int(mem[w[2]])))
    # (2) lambda(g1 g2, h) = lambda(g1, h) lambda(g2, g1^-1 h g1)
    t3 = el[:, ci].transpose(1, 0, 2)  # [g1, g2, h] = lambda(g2, conj(g1, h))
    delta = el[gt, :] - el[:, None, :] - t3
    w = _first_failure(delta, m)
    if w:
        raise RelationFails(2, (w[0], w[1], int(mem[w[2]])))
    # (3) lambda(g,hk) conj(lambda(g,h) lambda(g,k)) = mu(h,k) conj(mu(g^-1hg, g^-1kg))
    conj_mu = eu[ci[:, :, None], ci[:, None, :]]
    delta = el[:, ht] - el[:, :, None] - el[:, None, :] - eu[None, :, :] + conj_mu
    w = _first_failure(delta, m)
    if w:
        raise RelationFails(3, (w[0], int(mem[w[1]]), int(mem[w[2]])))
    # (4) lambda(h,k) = mu(h, h^-1 k h) conj(mu(k,h) kappa(nu(k), nu(h)))
    kn = (ctx.kappa_nu * (m // ctx.modulus)) % m
    ci_h = ci[mem, :]  # [i, j] = index of h_i^-1 h_j h_i
    mu_h = eu[np.arange(n_h)[:, None], ci_h]
    delta = el[mem, :] - mu_h + eu.T + kn.T
    w = _first_failure(delta, m)
    if w:
        raise RelationFails(4, (int(mem[w[0]]), int(mem[w[1]])))
    # (5) lambda(e,h) = lambda(g,e) = mu(e,k) = mu(h,e) = 1
    e_g, e_h = ctx.group.identity, ctx.e_h
    for tag, line in (
        ("lambda_row", el[e_g, :]),
        ("lambda_col", el[:, e_h]),
        ("mu_row", eu[e_h, :]),
        ("mu_col", eu[:, e_h]),
    ):
        bad = np.argwhere(line % m != 0)
        if len(bad):
            raise RelationFails(5, (tag, int(bad[0][0])))
    return CharacteristicPair(ctx, lam, mu)


def trivial_pair(ctx: PairContext) -> CharacteristicPair:
    n_g, n_h = ctx.group.order, ctx.subgroup.order
    return validate_pair(
        ctx, PhaseFunction.ones((n_g, n_h), ctx.modulus), PhaseFunction.ones((n_h, n_h), ctx.modulus)
    )


def perturb_pair(pair: CharacteristicPair, c: PhaseFunction) -> CharacteristicPair:
    """Re-choose the transversal unitaries by c: H -> T with c(e) = 1."""
    ctx = pair.context
    n_h = ctx.subgroup.order
    if c.shape != (n_h,):
        raise ShapeMismatch(f"c has shape {c.shape}, expected ({n_h},)")
    m = math.lcm(pair.modulus, c.modulus)
    ce = c.rescale(m).exps
    if ce[ctx.e_h] % m != 0:
        raise ValueError("c(e) must be 1")
    el = pair.lam.rescale(m).exps
    eu = pair.mu.rescale(m).exps
    new_lam = (el + ce[ctx.conj_index] - ce[None, :]) % m
    new_mu = (eu + ce[:, None] + ce[None, :] - ce[ctx.h_table]) % m
    return validate_pair(ctx, PhaseFunction(new_lam, m), PhaseFunction(new_mu, m))


def equivalent(
    p: CharacteristicPair, q: CharacteristicPair
) -> tuple[bool, Optional[PhaseFunction]]:
    """Are the pairs related by some c-perturbation?  Returns the witness c.

    Solved as coset membership: the perturbation deltas are the image of a
    linear map in c, so equivalence is one exact linear solve.
    """
    if p.context != q.context:
        raise ContextMismatch("pairs live in different contexts")
    ctx = p.context
    m = math.lcm(p.modulus, q.modulus)
    pv = np.array(CharacteristicPair(ctx, p.lam.rescale(m), p.mu.rescale(m)).vector(), dtype=np.int64)
    qv = np.array(CharacteristicPair(ctx, q.lam.rescale(m), q.mu.rescale(m)).vector(), dtype=np.int64)
    d = (qv - pv) % m
    rows = ctx.perturbation_matrix
    if not rows or not rows[0]:
        return (bool(np.all(d == 0)), PhaseFunction.ones((ctx.subgroup.order,), m))
    x = ModularSystem(rows).solve(list(d), m)
    if x is None:
        return False, None
    n_h = ctx.subgroup.order
    ce = np.zeros(n_h, dtype=np.int64)
    j = 0
    for i in range(n_h):
        if i != ctx.e_h:
            ce[i] = int(x[j])
            j += 1
    return True, PhaseFunction(ce, m)


def perturbation_subgroup(ctx: PairContext, cap: int = DEFAULT_ENUM_CAP) -> np.ndarray:
    """All perturbation deltas in free-cell coordinates, one row each.

    This is the translation subgroup whose cosets are the equivalence
    classes; every class has exactly len(rows) members at the working
    modulus.
    """
    m = ctx.modulus
    n_free = ctx.subgroup.order - 1
    total = m**n_free
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    t = np.array(ctx.perturbation_matrix, dtype=np.int64)
    if n_free == 0:
        return np.zeros((1, t.shape[0]), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(m)] * n_free), indexing="ij")
    cs = np.stack([g.reshape(-1) for g in grids], axis=1)  # (m^n_free, n_free)
    deltas = cs @ t.T % m
    return np.unique(deltas, axis=0)


@dataclass(frozen=True)
class InvariantTriple:
    """The full classification datum: H, a canonical pair representative, nu."""

    subgroup: Subgroup
    pair: CharacteristicPair
    nu: NuInvariant

    @property
    def context(self) -> PairContext:
        return self.pair.context


def make_triple(pair: CharacteristicPair, cap: int = DEFAULT_ENUM_CAP) -> InvariantTriple:
    """Canonicalize the pair to the lexicographically least member of its class."""
    ctx = pair.context
    pv = np.array(pair.vector(), dtype=np.int64)
    w = perturbation_subgroup(ctx, cap)
    m = pair.modulus
    orbit = (pv[None, :] + w) % m
    order = np.lexsort(orbit.T[::-1])
    rep = orbit[order[0]]
    canonical = _pair_from_vector(ctx, rep, m)
    return InvariantTriple(ctx.subgroup, canonical, ctx.nu)


def _pair_from_vector(ctx: PairContext, vec, modulus: int) -> CharacteristicPair:
    n_g, n_h = ctx.group.order, ctx.subgroup.order
    lam = np.zeros((n_g, n_h), dtype=np.int64)
    mu = np.zeros((n_h, n_h), dtype=np.int64)
    k = 0
    for g, i in ctx.lambda_cells:
        lam[g, i] = int(vec[k])
        k += 1
    for i, j in ctx.mu_cells:
        mu[i, j] = int(vec[k])
        k += 1
    return validate_pair(ctx, PhaseFunction(lam, modulus), PhaseFunction(mu, modulus))


def enumerate_lambda_group(ctx: PairContext, cap: int = DEFAULT_ENUM_CAP) -> list[InvariantTriple]:
    """All valid pairs in the context, one canonical representative per
    equivalence class, sorted by representative vector.

    The relation set is linear in the exponents, so candidates are the
    solution space of one modular system; classes are cosets of the
    perturbation subgroup inside it.
    """
    m = ctx.modulus
    lam_cells, mu_cells = ctx.lambda_cells, ctx.mu_cells
    col_of: dict[tuple[str, int, int], int] = {}
    for idx, (g, i) in enumerate(lam_cells):
        col_of[("l", g, i)] = idx
    base = len(lam_cells)
    for idx, (i, j) in enumerate(mu_cells):
        col_of[("m", i, j)] = base + idx
    n_vars = len(lam_cells) + len(mu_cells)

    rows: list[list[int]] = []
    rhs: list[int] = []

    def add(row_terms, b):
        row = [0] * n_vars
        for key, coeff in row_terms:
            col = col_of.get(key)
            if col is not None:  # identity cells are pinned to exponent 0
                row[col] += coeff
        rows.append(row)
        rhs.append(b % m)

    n_g, n_h = ctx.group.order, ctx.subgroup.order
    ht, ci, gt, mem = ctx.h_table, ctx.conj_index, ctx.group.table, ctx.members
    for i in range(n_h):
        for j in range(n_h):
            for k in range(n_h):
                add(
                    [
                        (("m", i, j), 1),
                        (("m", int(ht[i, j]), k), 1),
                        (("m", j, k), -1),
                        (("m", i, int(ht[j, k])), -1),
                    ],
                    0,
                )
    for g1 in range(n_g):
        for g2 in range(n_g):
            g12 = int(gt[g1, g2])
            for i in range(n_h):
                add(
                    [
                        (("l", g12, i), 1),
                        (("l", g1, i), -1),
                        (("l", g2, int(ci[g1, i])), -1),
                    ],
                    0,
                )
    for g in range(n_g):
        for i in range(n_h):
            for j in range(n_h):
                add(
                    [
                        (("l", g, int(ht[i, j])), 1),
                        (("l", g, i), -1),
                        (("l", g, j), -1),
                        (("m", i, j), -1),
                        (("m", int(ci[g, i]), int(ci[g, j])), 1),
                    ],
                    0,
                )
    kn = ctx.kappa_nu
    for i in range(n_h):
        g_i = int(mem[i])
        for j in range(n_h):
            add(
                [
                    (("l", g_i, j), 1),
                    (("m", i, int(ci[g_i, j])), -1),
                    (("m", j, i), 1),
                ],
                -int(kn[j, i]),
            )
    if n_vars == 0:
        return [InvariantTriple(ctx.subgroup, trivial_pair(ctx), ctx.nu)]
    space = ModularSystem(rows).solution_space(rhs, m)
    if space is None:
        return []
    if space.count() > cap:
        raise EnumerationCapExceeded(space.count(), cap)
    sols = space.as_array()
    w = perturbation_subgroup(ctx, cap)
    reps: dict[tuple[int, ...], None] = {}
    for sol in sols:
        orbit = (sol[None, :] + w) % m
        order = np.lexsort(orbit.T[::-1])
        reps[tuple(int(x) for x in orbit[order[0]])] = None
    if len(reps) * w.shape[0] != sols.shape[0]:
        raise AssertionError("perturbation orbits do not partition the solution set")
    return [
        InvariantTriple(ctx.subgroup, _pair_from_vector(ctx, rep, m), ctx.nu)
        for rep in sorted(reps)
    ]


# -- untwisting and the bar transformation --------------------------------------


def _resolve_extension(ctx: PairContext, extension: Optional[GroupHom]) -> GroupHom:
    if extension is None:
        cert = decide_extension(ctx.nu)
        if not cert.extends:
            raise ExtensionObstructed(cert)
        return cert.witness
    tg = ctx.target.as_table_group
    if extension.source != ctx.group or extension.target != tg:
        raise ContextMismatch("extension is not a homomorphism G -> K")
    for h, v in zip(ctx.subgroup.members, ctx.nu.values):
        if extension(h) != ctx.target.index(v):
            raise NotAnExtension(h)
    return extension


def _kappa_factor(ctx: PairContext, extension: GroupHom, modulus: int) -> np.ndarray:
    """factor[g, i] = exponent of kappa(nu(h_i), extension(g)) at the modulus."""
    kexp = ctx.kappa.values.rescale(modulus).exps
    ext_idx = np.asarray(extension.image, dtype=np.int64)
    return kexp[np.ix_(ctx.nu.value_indices, ext_idx)].T  # (|G|, |H|)


def untwist(pair: CharacteristicPair, extension: Optional[GroupHom] = None) -> CharacteristicPair:
    """Map a kappa-twisted pair to a classical one:
    lambda'(g,n) = kappa(nu(n), ext(g)) lambda(g,n), mu unchanged.

    Needs nu to extend to G; with extension=None the decision procedure is
    run and ExtensionObstructed raised if it fails.  The output is validated
    in the trivial-kappa context, which is the machine-checked content of
    the untwisting claim.
    """
    ctx = pair.context
    ext = _resolve_extension(ctx, extension)
    m = pair.modulus
    factor = _kappa_factor(ctx, ext, m)
    new_lam = (pair.lam.exps + factor) % m
    new_ctx = pair_context(
        ctx.group, ctx.subgroup, ctx.target, trivial_bicharacter(ctx.target), ctx.nu, ctx.modulus
    )
    return validate_pair(new_ctx, PhaseFunction(new_lam, m), pair.mu)


def twist(
    pair: CharacteristicPair, kappa: Bicharacter, extension: Optional[GroupHom] = None
) -> CharacteristicPair:
    """Inverse of untwist: divide lambda by the kappa factor and validate in
    the kappa-twisted context."""
    ctx = pair.context
    new_ctx = pair_context(ctx.group, ctx.subgroup, ctx.target, kappa, ctx.nu, ctx.modulus)
    ext = _resolve_extension(new_ctx, extension)
    m = math.lcm(pair.modulus, new_ctx.modulus)
    factor = _kappa_factor(new_ctx, ext, m)
    new_lam = (pair.lam.rescale(m).exps - factor) % m
    return validate_pair(new_ctx, PhaseFunction(new_lam, m), pair.mu.rescale(m))


def bar_transform(pair: CharacteristicPair, extension: GroupHom) -> CharacteristicPair:
    """The invariant of the sigma-absorbed action:
    lambda_bar(g,n) = kappa(ext(g), nu(n)) lambda(g,n),
    mu_bar(m,n) = kappa(nu(m), nu(n)) mu(m,n),
    validated in the classical (trivial-kappa) context."""
    ctx = pair.context
    ext = _resolve_extension(ctx, extension)
    m = pair.modulus
    kexp = ctx.kappa.values.rescale(m).exps
    idx = ctx.nu.value_indices
    mu_factor = kexp[np.ix_(idx, idx)]
    new_lam = (pair.lam.exps + _kappa_factor_swapped(ctx, ext, m)) % m
    new_mu = (pair.mu.exps + mu_factor) % m
    new_ctx = pair_context(
        ctx.group, ctx.subgroup, ctx.target, trivial_bicharacter(ctx.target), ctx.nu, ctx.modulus
    )
    return validate_pair(new_ctx, PhaseFunction(new_lam, m), PhaseFunction(new_mu, m))


def _kappa_factor_swapped(ctx: PairContext, extension: GroupHom, modulus: int) -> np.ndarray:
    """factor[g, i] = exponent of kappa(extension(g), nu(h_i)) at the modulus."""
    kexp = ctx.kappa.values.rescale(modulus).exps
    ext_idx = np.asarray(extension.image, dtype=np.int64)
    return kexp[np.ix_(ext_idx, ctx.nu.value_indices)]  # (|G|, |H|)


# -- the classification verdict --------------------------------------------------

SAME_INVARIANTS = "SAME_INVARIANTS"
DIFFERENT = "DIFFERENT"


@dataclass(frozen=True)
class ClassifyVerdict:
    verdict: str
    differs_in: Optional[str]  # "H" | "nu" | "lambda"
    extension_certified: bool
    witness: Optional[PhaseFunction] = None  # equivalence witness when pairs match

    @property
    def same_invariants(self) -> bool:
        return self.verdict == SAME_INVARIANTS

    @property
    def stably_conjugate(self) -> bool:
        """The theorem's conclusion; meaningful when extension_certified."""
        return self.same_invariants

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "differs_in": self.differs_in,
            "extension_certified": self.extension_certified,
            "witness": self.witness.to_json() if self.witness is not None else None,
        }


def classify(a: InvariantTriple, b: InvariantTriple) -> ClassifyVerdict:
    """Compare two invariant triples over the same (G, K, kappa).

    SAME_INVARIANTS means stably conjugate under the classification theorem,
    whose hypothesis (nu extends to G) is checked and reported alongside.
    Components are compared H, nu, pair class; pair equivalence is only
    well-posed once H and nu agree.
    """
    ca, cb = a.context, b.context
    if ca.group != cb.group or ca.target != cb.target or not (ca.kappa.values == cb.kappa.values):
        raise ContextMismatch("triples live over different (G, K, kappa)")
    cert = decide_extension(a.nu)
    if a.subgroup.members != b.subgroup.members:
        return ClassifyVerdict(DIFFERENT, "H", cert.extends)
    if a.nu.values != b.nu.values:
        return ClassifyVerdict(DIFFERENT, "nu", cert.extends)
    pa, pb = a.pair, b.pair
    if ca.modulus != cb.modulus:
        m = math.lcm(ca.modulus, cb.modulus)
        ctx = pair_context(ca.group, ca.subgroup, ca.target, ca.kappa, ca.nu, m)
        pa = validate_pair(ctx, pa.lam, pa.mu)
        pb = validate_pair(ctx, pb.lam, pb.mu)
    ok, c = equivalent(pa, pb)
    if not ok:
        return ClassifyVerdict(DIFFERENT, "lambda", cert.extends)
    return ClassifyVerdict(SAME_INVARIANTS, None, cert.extends, witness=c)
