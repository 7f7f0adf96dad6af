"""Exact integer and rational linear algebra.

Matrices are immutable tuples of tuples of Python ints (row-major), so all
arithmetic is arbitrary precision and values can be shared freely across
threads.  The module provides Smith and Hermite normal forms, integer kernels
and cokernels, sublattices with saturation/intersection/sum/index, and base
change of finitely generated abelian groups along the coefficient groups used
downstream (Z, Q, a field of characteristic p, and the units k* of an
algebraically closed field).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import IndexInfinite, SublatticeNotContained

Mat = tuple[tuple[int, ...], ...]
Vec = tuple[int, ...]


# ---------------------------------------------------------------------------
# basic matrix helpers


def freeze(rows) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in rows)


def zeros(rows: int, cols: int) -> Mat:
    return tuple((0,) * cols for _ in range(rows))


def identity(n: int) -> Mat:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def shape(a: Mat) -> tuple[int, int]:
    return len(a), len(a[0]) if a else 0


def transpose(a: Mat) -> Mat:
    return tuple(zip(*a)) if a else ()


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def mat_vec(a: Mat, v) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def det(a: Mat) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def vec_gcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def integral_length(v) -> int:
    """gcd of the entries; 0 for the zero vector."""
    return vec_gcd(v)


def primitive_vector(v) -> Vec | None:
    """v divided by its integral length, or None for the zero vector."""
    g = vec_gcd(v)
    if g == 0:
        return None
    return tuple(x // g for x in v)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SNFResult:
    """U @ A @ V == D with U, V unimodular and D diagonal with a
    divisibility chain d1 | d2 | ..."""

    U: Mat
    D: Mat
    V: Mat
    divisors: tuple[int, ...]


def snf(a: Mat) -> SNFResult:
    """Smith normal form over Z.

    Pivoting is deterministic: the smallest nonzero absolute value in the
    remaining submatrix wins, ties broken in row-major order.
    """
    a = freeze(a)
    m, n = shape(a)
    d = [list(row) for row in a]
    u = [list(row) for row in identity(m)]
    v = [list(row) for row in identity(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row dst -= q * row src
        d[dst] = [x - q * y for x, y in zip(d[dst], d[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        for row in d:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    def negate_row(i):
        d[i] = [-x for x in d[i]]
        u[i] = [-x for x in u[i]]

    def pick_pivot(t):
        best = None
        pos = None
        for i in range(t, m):
            for j in range(t, n):
                val = abs(d[i][j])
                if val and (best is None or val < best):
                    best = val
                    pos = (i, j)
        return pos

    t = 0
    while t < min(m, n):
        pos = pick_pivot(t)
        if pos is None:
            break
        while True:
            i, j = pos
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            if d[t][t] < 0:
                negate_row(t)
            p = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(t, i, d[i][t] // p)
                    if d[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(t, j, d[t][j] // p)
                    if d[t][j]:
                        dirty = True
            if dirty:
                pos = pick_pivot(t)
                continue
            # cross is clear; enforce the divisibility chain
            p = d[t][t]
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if d[i][j] % p:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, -1)
            pos = pick_pivot(t)
        t += 1

    divisors = tuple(d[i][i] for i in range(min(m, n)) if d[i][i] != 0)
    return SNFResult(freeze(u), freeze(d), freeze(v), divisors)


def kernel_basis(a: Mat) -> Mat:
    """Basis of the integer kernel {x : A x = 0}, saturated by construction
    (the basis vectors are columns of a unimodular matrix)."""
    a = freeze(a)
    m, n = shape(a)
    if n == 0:
        return ()
    res = snf(a)
    r = len(res.divisors)
    vt = transpose(res.V)
    return vt[r:]


def rank(a: Mat) -> int:
    return len(snf(a).divisors)


# ---------------------------------------------------------------------------
# Hermite normal form (row style) for canonical lattice bases


def hnf(rows, ncols: int) -> Mat:
    """Row-style Hermite normal form: pivots positive and strictly to the
    right as you go down, entries above a pivot reduced into [0, pivot).
    Zero rows are dropped, so equal lattices have equal HNFs."""
    work = [list(r) for r in rows if any(r)]
    pr = 0
    for col in range(ncols):
        if pr >= len(work):
            break
        while True:
            pivots = [i for i in range(pr, len(work)) if work[i][col] != 0]
            if not pivots:
                break
            best = min(pivots, key=lambda i: (abs(work[i][col]), i))
            work[pr], work[best] = work[best], work[pr]
            if work[pr][col] < 0:
                work[pr] = [-x for x in work[pr]]
            p = work[pr][col]
            done = True
            for i in range(pr + 1, len(work)):
                if work[i][col]:
                    q = work[i][col] // p
                    work[i] = [x - q * y for x, y in zip(work[i], work[pr])]
                    if work[i][col]:
                        done = False
            if done:
                break
        if pr < len(work) and work[pr][col] != 0:
            p = work[pr][col]
            for i in range(pr):
                q = work[i][col] // p
                if q:
                    work[i] = [x - q * y for x, y in zip(work[i], work[pr])]
            pr += 1
        work = [r for r in work if any(r)]
    return freeze(r for r in work if any(r))


# ---------------------------------------------------------------------------
# rational linear solving (used for membership and coordinates)


def solve_rational(a_rows, target):
    """Solve x @ A = target over Q for the row vector x, where A is given by
    its rows.  Returns a tuple of Fractions or None when inconsistent."""
    rows = [[Fraction(x) for x in r] for r in a_rows]
    t = [Fraction(x) for x in target]
    ncols = len(t)
    # Gaussian elimination on the transposed system A^T x^T = target^T
    aug = [[rows[j][i] for j in range(len(rows))] + [t[i]] for i in range(ncols)]
    nvars = len(rows)
    pivot_of_var = [-1] * nvars
    r = 0
    for c in range(nvars):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivot_of_var[c] = r
        r += 1
    for i in range(r, len(aug)):
        if aug[i][-1] != 0:
            return None
    sol = []
    for c in range(nvars):
        sol.append(aug[pivot_of_var[c]][-1] if pivot_of_var[c] >= 0 else Fraction(0))
    return tuple(sol)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FGAbelianGroup:
    """Canonical form: free rank plus invariant factors >= 2 in a
    divisibility chain.  Unique per isomorphism class."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a chain")
        if any(t < 2 for t in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def torsion_order(self) -> int:
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        return None if self.rank else self.torsion_order

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def cokernel_group(a: Mat) -> FGAbelianGroup:
    """Z^rows / column span of A, in canonical form."""
    a = freeze(a)
    m, _ = shape(a)
    divisors = snf(a).divisors
    return FGAbelianGroup(m - len(divisors), tuple(d for d in divisors if d > 1))


# ---------------------------------------------------------------------------
# sublattices


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^ambient_rank given by a basis (rows).  The basis is
    canonicalized to HNF at construction, so equal lattices compare equal."""

    ambient_rank: int
    basis: Mat

    def __post_init__(self):
        canon = hnf(self.basis, self.ambient_rank)
        if len(canon) != len([r for r in self.basis if any(r)]):
            raise ValueError("basis rows must be linearly independent")
        object.__setattr__(self, "basis", canon)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def corank(self) -> int:
        return self.ambient_rank - self.rank

    def contains(self, v) -> bool:
        sol = solve_rational(self.basis, v)
        return sol is not None and all(x.denominator == 1 for x in sol)

    def spans(self, v) -> bool:
        """Membership in the Q-span."""
        return solve_rational(self.basis, v) is not None


def zero_lattice(n: int) -> Sublattice:
    return Sublattice(n, ())


def full_lattice(n: int) -> Sublattice:
    return Sublattice(n, identity(n))


def saturation(lat: Sublattice) -> Sublattice:
    """Smallest sublattice containing lat with torsion-free quotient:
    the Q-span intersected with Z^n, computed as a double kernel."""
    if lat.rank == 0:
        return lat
    ann = kernel_basis(lat.basis)
    if not ann:
        return full_lattice(lat.ambient_rank)
    return Sublattice(lat.ambient_rank, kernel_basis(ann))


def is_saturated(lat: Sublattice) -> bool:
    return saturation(lat) == lat


def lattice_intersect(l1: Sublattice, l2: Sublattice) -> Sublattice:
    if l1.ambient_rank != l2.ambient_rank:
        raise ValueError("ambient ranks differ")
    if l1.rank == 0 or l2.rank == 0:
        return zero_lattice(l1.ambient_rank)
    cols = [list(row) for row in transpose(l1.basis)]
    for i, row in enumerate(transpose(l2.basis)):
        cols[i].extend(-x for x in row)
    combos = kernel_basis(freeze(cols))
    gens = []
    for combo in combos:
        coeffs = combo[: l1.rank]
        gens.append(tuple(
            sum(c * row[j] for c, row in zip(coeffs, l1.basis))
            for j in range(l1.ambient_rank)
        ))
    return Sublattice(l1.ambient_rank, hnf(gens, l1.ambient_rank))


def lattice_sum(l1: Sublattice, l2: Sublattice) -> Sublattice:
    if l1.ambient_rank != l2.ambient_rank:
        raise ValueError("ambient ranks differ")
    return Sublattice(l1.ambient_rank, hnf(l1.basis + l2.basis, l1.ambient_rank))


def lattice_index(outer: Sublattice, inner: Sublattice) -> int:
    """Index [outer : inner] for inner a finite-index sublattice of outer."""
    if outer.ambient_rank != inner.ambient_rank:
        raise ValueError("ambient ranks differ")
    if outer.rank != inner.rank:
        raise IndexInfinite("sublattice ranks differ, index is infinite")
    coords = []
    for row in inner.basis:
        sol = solve_rational(outer.basis, row)
        if sol is None or any(x.denominator != 1 for x in sol):
            raise SublatticeNotContained("inner lattice not contained in outer")
        coords.append(tuple(int(x) for x in sol))
    d = det(freeze(coords))
    if d == 0:
        raise IndexInfinite("degenerate basis")
    return abs(d)


def lattice_intersect_span(lat: Sublattice, space: Sublattice) -> Sublattice:
    """lat intersected with the Q-span of space."""
    if space.rank == 0 or lat.rank == 0:
        return zero_lattice(lat.ambient_rank)
    ann = kernel_basis(space.basis)
    if not ann:
        return lat
    # rows of lat.basis whose combos are killed by every annihilator
    m = mat_mul(freeze(ann), transpose(lat.basis))
    combos = kernel_basis(m)
    gens = []
    for combo in combos:
        gens.append(tuple(
            sum(c * row[j] for c, row in zip(combo, lat.basis))
            for j in range(lat.ambient_rank)
        ))
    return Sublattice(lat.ambient_rank, hnf(gens, lat.ambient_rank))


def quotient_presentation(lat: Sublattice) -> Mat:
    """Matrix Q (corank x n) presenting Z^n / lat -> Z^corank for a
    saturated lat: x maps to Q @ x.  Deterministic via the SNF of the basis."""
    n = lat.ambient_rank
    if lat.rank == 0:
        return identity(n)
    res = snf(lat.basis)
    if any(d != 1 for d in res.divisors):
        raise ValueError("quotient presentation requires a saturated lattice")
    vt = transpose(res.V)
    return vt[lat.rank:]


# ---------------------------------------------------------------------------
# coefficient groups and base change


@dataclass(frozen=True)
class CoeffGroup:
    """Z, Q, a field k of characteristic p, or the units k* of an
    algebraically closed field of characteristic p."""

    kind: str  # "Z" | "Q" | "field" | "kstar"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Q", "field", "kstar"):
            raise ValueError(f"unknown coefficient group kind {self.kind!r}")
        if self.p and not _is_prime(self.p):
            raise ValueError("characteristic must be zero or prime")

    @staticmethod
    def integers() -> "CoeffGroup":
        return CoeffGroup("Z")

    @staticmethod
    def rationals() -> "CoeffGroup":
        return CoeffGroup("Q")

    @staticmethod
    def field(p: int = 0) -> "CoeffGroup":
        return CoeffGroup("field", p)

    @staticmethod
    def units(p: int = 0) -> "CoeffGroup":
        return CoeffGroup("kstar", p)

    def __str__(self):
        if self.kind == "Z":
            return "Z"
        if self.kind == "Q":
            return "Q"
        if self.kind == "field":
            return f"k(char {self.p})"
        return f"k*(char {self.p})"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_to_part(d: int, p: int) -> int:
    """Largest divisor of d coprime to p (d itself when p = 0)."""
    if p <= 1:
        return d
    while d % p == 0:
        d //= p
    return d


@dataclass(frozen=True)
class GroupSize:
    """Size of a group built from copies of a coefficient group G plus a
    finite part.  free_rank counts copies of G (G = Z or k*), kdim is a
    k-vector-space dimension, finite_order is the order when the whole group
    is finite and None otherwise."""

    free_rank: int = 0
    kdim: int = 0
    finite_order: int | None = 1

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and self.kdim == 0 and self.finite_order == 1

    @property
    def is_finite(self) -> bool:
        return self.finite_order is not None

    def __str__(self):
        if self.kdim or self.free_rank:
            bits = []
            if self.free_rank:
                bits.append(f"G^{self.free_rank}")
            if self.kdim:
                bits.append(f"k^{self.kdim}")
            return " + ".join(bits)
        return str(self.finite_order)


def base_change(group: FGAbelianGroup, g: CoeffGroup, mode: str) -> GroupSize:
    """A (x) G for mode="tensor" and Tor^1(A, G) for mode="tor".

    Z/d (x) k is k iff p | d and 0 otherwise; Z/d (x) k* = 0 and
    Z/d (x) Q = 0; Tor(Z/d, k*) = mu_d whose order is the prime-to-p part
    of d; Tor(free, G) = 0.
    """
    if mode not in ("tensor", "tor"):
        raise ValueError("mode must be 'tensor' or 'tor'")
    p_torsion = sum(1 for d in group.torsion if g.p and d % g.p == 0)
    if mode == "tensor":
        if g.kind == "Z":
            order = None if group.rank else group.torsion_order
            return GroupSize(free_rank=group.rank, finite_order=order)
        if g.kind == "Q":
            return GroupSize(kdim=group.rank,
                             finite_order=1 if group.rank == 0 else None)
        if g.kind == "field":
            dim = group.rank + p_torsion
            return GroupSize(kdim=dim, finite_order=1 if dim == 0 else None)
        # k*: divisible, so all torsion dies
        return GroupSize(free_rank=group.rank,
                         finite_order=1 if group.rank == 0 else None)
    # Tor^1: the free part never contributes
    if g.kind in ("Z", "Q"):
        return GroupSize()
    if g.kind == "field":
        return GroupSize(kdim=p_torsion, finite_order=1 if p_torsion == 0 else None)
    order = 1
    for d in group.torsion:
        order *= prime_to_part(d, g.p)
    return GroupSize(finite_order=order)


def combine_sizes(a: GroupSize, b: GroupSize) -> GroupSize:
    """Size of an extension of b by a (both over the same G)."""
    free = a.free_rank + b.free_rank
    kdim = a.kdim + b.kdim
    if a.finite_order is None or b.finite_order is None:
        order = None
    else:
        order = a.finite_order * b.finite_order
    if free or kdim:
        order = None
    return GroupSize(free_rank=free, kdim=kdim, finite_order=order)


__all__ = [
    "Mat", "Vec", "freeze", "zeros", "identity", "shape", "transpose",
    "mat_mul", "mat_vec", "det", "vec_gcd", "integral_length",
    "primitive_vector", "SNFResult", "snf", "kernel_basis", "rank", "hnf",
    "solve_rational", "FGAbelianGroup", "cokernel_group", "Sublattice",
    "zero_lattice", "full_lattice", "saturation", "is_saturated",
    "lattice_intersect", "lattice_sum", "lattice_index",
    "lattice_intersect_span", "quotient_presentation", "CoeffGroup",
    "prime_to_part", "GroupSize", "base_change", "combine_sizes",
]
