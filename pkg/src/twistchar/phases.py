"""Exact arithmetic in the circle group, restricted to roots of unity.

A value exp(2*pi*i * e/M) is stored as the integer pair (e, M); products
rescale both operands to the lcm of their moduli, so every computation in
the package is integer arithmetic with zero tolerance.  The second half of
the module is a solver for linear systems A*x = b (mod M), done by integer
elimination with divisibility bookkeeping (Smith-normal-form style); it is
the engine behind coboundary witnesses, extension decisions and the
characteristic-pair enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import ModulusOverflow, ShapeMismatch

DEFAULT_MODULUS_CAP = 10**6

# Solution sets up to this size are enumerated outright to find the
# lexicographically least solution; larger sets fall back to coordinate
# restriction.
_LEX_ENUM_CAP = 1 << 17


def _check_modulus(m: int, cap: int = DEFAULT_MODULUS_CAP) -> int:
    if m > cap:
        raise ModulusOverflow(m, cap)
    return m


@dataclass(frozen=True)
class Phase:
    """The root of unity exp(2*pi*i * exponent/modulus)."""

    exponent: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError(f"modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "exponent", int(self.exponent) % int(self.modulus))
        object.__setattr__(self, "modulus", int(self.modulus))

    @staticmethod
    def one(modulus: int = 1) -> "Phase":
        return Phase(0, modulus)

    def reduced(self) -> "Phase":
        """Lowest-terms representative, the canonical form behind == and hash."""
        if self.exponent == 0:
            return Phase(0, 1)
        g = math.gcd(self.exponent, self.modulus)
        return Phase(self.exponent // g, self.modulus // g)

    def rescale(self, modulus: int) -> "Phase":
        if modulus % self.modulus != 0:
            raise ValueError(f"cannot rescale modulus {self.modulus} to {modulus}")
        return Phase(self.exponent * (modulus // self.modulus), modulus)

    def conj(self) -> "Phase":
        return Phase(-self.exponent, self.modulus)

    def __mul__(self, other: "Phase") -> "Phase":
        return phase_mul(self, other)

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.exponent * int(k), self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Phase):
            return NotImplemented
        a, b = self.reduced(), other.reduced()
        return a.exponent == b.exponent and a.modulus == b.modulus

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.exponent, r.modulus))

    def __repr__(self) -> str:
        return f"Phase({self.exponent}/{self.modulus})"

    def is_one(self) -> bool:
        return self.exponent == 0

    def order(self) -> int:
        """Multiplicative order as a root of unity."""
        return self.modulus // math.gcd(self.exponent, self.modulus)

    def to_json(self) -> dict:
        return {"num": self.exponent, "den": self.modulus}

    @staticmethod
    def from_json(obj: dict) -> "Phase":
        return Phase(int(obj["num"]), int(obj["den"]))


def phase_mul(a: Phase, b: Phase, cap: int = DEFAULT_MODULUS_CAP) -> Phase:
    """Product of two roots of unity, exact, at the lcm of the moduli."""
    m = _check_modulus(math.lcm(a.modulus, b.modulus), cap)
    return Phase(a.exponent * (m // a.modulus) + b.exponent * (m // b.modulus), m)


def phase_conj(a: Phase) -> Phase:
    return a.conj()


class PhaseFunction:
    """A dense table of roots of unity sharing one modulus.

    Carrier for the lambda, mu, kappa and c tables; `shape` is the domain
    shape (e.g. (|G|, |H|) for lambda).  Immutable.
    """

    __slots__ = ("shape", "exps", "modulus")

    def __init__(self, exps, modulus: int):
        if modulus < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        arr = np.asarray(exps, dtype=np.int64) % modulus
        arr.setflags(write=False)
        object.__setattr__(self, "exps", arr)
        object.__setattr__(self, "shape", tuple(arr.shape))
        object.__setattr__(self, "modulus", int(modulus))

    def __setattr__(self, name, value):
        raise AttributeError("PhaseFunction is immutable")

    @staticmethod
    def ones(shape: Sequence[int], modulus: int = 1) -> "PhaseFunction":
        return PhaseFunction(np.zeros(tuple(shape), dtype=np.int64), modulus)

    def value(self, *index: int) -> Phase:
        return Phase(int(self.exps[index]), self.modulus)

    def rescale(self, modulus: int) -> "PhaseFunction":
        if modulus % self.modulus != 0:
            raise ValueError(f"cannot rescale modulus {self.modulus} to {modulus}")
        return PhaseFunction(self.exps * (modulus // self.modulus), modulus)

    def mul(self, other: "PhaseFunction", cap: int = DEFAULT_MODULUS_CAP) -> "PhaseFunction":
        if self.shape != other.shape:
            raise ShapeMismatch(f"shapes differ: {self.shape} vs {other.shape}")
        m = _check_modulus(math.lcm(self.modulus, other.modulus), cap)
        return PhaseFunction(self.rescale(m).exps + other.rescale(m).exps, m)

    def conj(self) -> "PhaseFunction":
        return PhaseFunction(-self.exps, self.modulus)

    def __mul__(self, other: "PhaseFunction") -> "PhaseFunction":
        return self.mul(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseFunction):
            return NotImplemented
        if self.shape != other.shape:
            return False
        m = math.lcm(self.modulus, other.modulus)
        return bool(np.array_equal(self.rescale(m).exps, other.rescale(m).exps))

    def __repr__(self) -> str:
        return f"PhaseFunction(shape={self.shape}, modulus={self.modulus})"

    def is_one(self) -> bool:
        return bool(np.all(self.exps == 0))

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "values": self.exps.tolist()}

    @staticmethod
    def from_json(obj: dict) -> "PhaseFunction":
        return PhaseFunction(obj["values"], int(obj["modulus"]))


# -- modular linear algebra ----------------------------------------------------


def smith_normal_form(matrix) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Diagonalize an integer matrix: returns (U, D, V) with U*A*V = D.

    U and V are unimodular; D is diagonal with non-negative entries (no
    divisibility chain, which the solver does not need).  Pure Python
    integers throughout, so intermediate growth is harmless.
    """
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_sub(i, j, q):  # row_i -= q * row_j
        ai, aj = a[i], a[j]
        for c in range(n):
            ai[c] -= q * aj[c]
        ui, uj = u[i], u[j]
        for c in range(m):
            ui[c] -= q * uj[c]

    def col_sub(i, j, q):  # col_i -= q * col_j
        for r in range(m):
            a[r][i] -= q * a[r][j]
        for r in range(n):
            v[r][i] -= q * v[r][j]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in range(m):
            a[r][i], a[r][j] = a[r][j], a[r][i]
        for r in range(n):
            v[r][i], v[r][j] = v[r][j], v[r][i]

    for t in range(min(m, n)):
        # smallest nonzero entry of the trailing block becomes the pivot
        pivot = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                val = abs(a[i][j])
                if val and (best is None or val < best):
                    best, pivot = val, (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            if a[t][t] < 0:
                row_sub(t, t, 2)  # negate the pivot row
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    row_sub(i, t, q)
                    if a[i][t]:  # remainder is a smaller pivot
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    col_sub(j, t, q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if done:
                break
    return u, a, v


class SolutionSpace:
    """All solutions of A*x = b (mod M): a particular solution plus kernel
    generators with periods.

    For spaces produced by ModularSystem.solution_space the parametrization
    is faithful: distinct parameter tuples give distinct solutions, so
    count() is exact and iterate() has no duplicates.
    """

    __slots__ = ("modulus", "x0", "kernel")

    def __init__(self, modulus: int, x0: np.ndarray, kernel: list[tuple[np.ndarray, int]]):
        self.modulus = modulus
        self.x0 = x0 % modulus
        self.kernel = kernel  # list of (vector, period), period >= 2

    def count(self) -> int:
        c = 1
        for _, period in self.kernel:
            c *= period
        return c

    def iterate(self) -> Iterator[np.ndarray]:
        """Yield every solution; deterministic mixed-radix order."""
        m = self.modulus
        ranges = [range(p) for _, p in self.kernel]
        vecs = [v for v, _ in self.kernel]
        for ts in itertools.product(*ranges):
            x = self.x0.copy()
            for t, v in zip(ts, vecs):
                x = x + t * v
            yield x % m

    def as_array(self) -> np.ndarray:
        """All solutions as a (count, n) array; mind count() before calling."""
        m = self.modulus
        arr = self.x0[None, :].copy()
        for v, period in self.kernel:
            steps = np.arange(period, dtype=np.int64)[:, None, None] * v[None, None, :]
            arr = (arr[None, :, :] + steps).reshape(-1, arr.shape[1])
        return arr % m

    def lex_min(self) -> np.ndarray:
        """Lexicographically least solution."""
        if not self.kernel:
            return self.x0.copy()
        if self.count() <= _LEX_ENUM_CAP:
            arr = self.as_array()
            order = np.lexsort(arr.T[::-1])  # primary key = coordinate 0
            return arr[order[0]]
        return _lex_min_greedy(self)


def _restrict_space(space: SolutionSpace, prefix: Sequence[int]) -> Optional[SolutionSpace]:
    """Solutions of `space` whose first len(prefix) coordinates equal prefix.

    Set semantics only: the returned kernel may be a redundant generating
    set, so count()/iterate() on the result can repeat solutions.  Good
    enough for the greedy lex-min, which only needs x0 and per-coordinate
    gcds of the kernel.
    """
    k = len(prefix)
    m = space.modulus
    want = np.asarray(prefix, dtype=np.int64) % m
    if not space.kernel:
        return space if np.array_equal(space.x0[:k] % m, want) else None
    # solve for the parameters: prefix = x0[:k] + sum_i t_i * v_i[:k]  (mod M)
    t_matrix = [[int(v[r]) for v, _ in space.kernel] for r in range(k)]
    rhs = [int(want[r] - space.x0[r]) % m for r in range(k)]
    t_space = ModularSystem(t_matrix).solution_space(rhs, m)
    if t_space is None:
        return None
    vecs = np.stack([v for v, _ in space.kernel])  # (n_t, n)
    x0 = (space.x0 + t_space.x0 @ vecs) % m
    kernel = []
    for tv, period in t_space.kernel:
        xv = (tv @ vecs) % m
        if np.any(xv):
            kernel.append((xv, period))
    return SolutionSpace(m, x0, kernel)


def _lex_min_greedy(space: SolutionSpace) -> np.ndarray:
    # Fix coordinates left to right: achievable values of coordinate j form
    # the coset x0[j] + d*(Z/M) with d = gcd(M, kernel entries at j), whose
    # least member in [0, M) is x0[j] mod d.
    m = space.modulus
    n = len(space.x0)
    fixed: list[int] = []
    current = space
    for j in range(n):
        d = m
        for v, _ in current.kernel:
            d = math.gcd(d, int(v[j]))
        fixed.append(int(current.x0[j]) % d if d else int(current.x0[j]))
        if j == n - 1:
            break
        nxt = _restrict_space(current, fixed)
        if nxt is None:  # unreachable: fixed[j] is achievable by construction
            raise AssertionError("lex-min restriction lost feasibility")
        current = nxt
    return np.array(fixed, dtype=np.int64)


class ModularSystem:
    """A*x = b (mod M) for a fixed A and varying b, M.

    The Smith form of A is computed once; each solve is then divisibility
    checks plus back-substitution.
    """

    def __init__(self, matrix):
        rows = [[int(x) for x in row] for row in matrix]
        self.n_rows = len(rows)
        self.n_cols = len(rows[0]) if rows else 0
        self.u, d, self.v = smith_normal_form(rows)
        self.diag = [abs(d[i][i]) for i in range(min(self.n_rows, self.n_cols))]

    def solution_space(self, b, modulus: int) -> Optional[SolutionSpace]:
        m = int(modulus)
        if m < 1:
            raise ValueError(f"modulus must be positive, got {modulus}")
        bb = [int(x) for x in b]
        if len(bb) != self.n_rows:
            raise ShapeMismatch(f"rhs length {len(bb)} != {self.n_rows} rows")
        c = [sum(u_ij * b_j for u_ij, b_j in zip(u_i, bb)) % m for u_i in self.u]
        z0 = [0] * self.n_cols
        kernel: list[tuple[np.ndarray, int]] = []
        for j in range(self.n_cols):
            d = self.diag[j] if j < len(self.diag) else 0
            cj = c[j] if j < self.n_rows else 0
            g = math.gcd(d, m)  # g == m when d == 0
            if cj % g != 0:
                return None
            step = m // g
            if d != 0:
                z0[j] = ((cj // g) * pow(d // g, -1, step)) % step if step > 1 else 0
            if g > 1:
                vec = np.array([self.v[r][j] for r in range(self.n_cols)], dtype=np.int64)
                kernel.append(((vec * step) % m, g))
        # constraint rows beyond the variable count must vanish outright
        for i in range(self.n_cols, self.n_rows):
            if c[i] % m != 0:
                return None
        x0 = np.array(
            [sum(self.v[r][j] * z0[j] for j in range(self.n_cols)) % m for r in range(self.n_cols)],
            dtype=np.int64,
        )
        return SolutionSpace(m, x0, kernel)

    def solve(self, b, modulus: int) -> Optional[np.ndarray]:
        space = self.solution_space(b, modulus)
        if space is None:
            return None
        return space.lex_min()


def solve_linear_mod(matrix, b, modulus: int) -> Optional[np.ndarray]:
    """Solve A*x = b (mod M) exactly.

    Returns the lexicographically least solution, or None when the system is
    infeasible (the proof-of-no-solution flag).  Callers needing the full
    solution set use ModularSystem.solution_space.
    """
    return ModularSystem(matrix).solve(b, modulus)
