"""Lattice values: bases, sizes, volumes and a brute-force minima oracle."""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    EnumerationBudgetExceeded,
    RadiusTooSmall,
    SingularBasis,
)
from .linalg import (
    IntegerMatrix,
    _PIVOT_PRIME,
    dot,
    gram,
    gram_det,
    rank_mod,
    rank_over_q,
    rational_inverse,
)

ENUMERATION_BUDGET = 10**7


def log2_int(x):
    """log2 of a positive integer of any size."""
    x = int(x)
    if x <= 0:
        raise ValueError("log2 of a non-positive number")
    b = x.bit_length()
    if b <= 1000:
        return math.log2(x)
    shift = b - 64
    return math.log2(x >> shift) + shift


def log2_fraction(q):
    q = Fraction(q)
    return log2_int(q.numerator) - log2_int(q.denominator)


class LatticeBasis:
    """Full-row-rank integer basis (rows are the basis vectors)."""

    def __init__(self, rows, check=True):
        matrix = rows if isinstance(rows, IntegerMatrix) else IntegerMatrix(rows)
        if matrix.nrows > matrix.ncols:
            raise SingularBasis(f"{matrix.nrows} rows cannot be independent in dimension {matrix.ncols}")
        self.matrix = matrix
        if check and rank_mod(matrix.rows, _PIVOT_PRIME) < matrix.nrows:
            if self.gram_det == 0:
                raise SingularBasis("basis rows are linearly dependent")

    @property
    def rows(self):
        return self.matrix.rows

    @property
    def rank(self):
        return self.matrix.nrows

    @property
    def ambient_dim(self):
        return self.matrix.ncols

    def __len__(self):
        return self.matrix.nrows

    def __iter__(self):
        return iter(self.matrix.rows)

    def __getitem__(self, i):
        return self.matrix.rows[i]

    def __eq__(self, other):
        if isinstance(other, LatticeBasis):
            return self.matrix == other.matrix
        return NotImplemented

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"LatticeBasis(rank={self.rank}, dim={self.ambient_dim})"

    def tolist(self):
        return self.matrix.tolist()

    @cached_property
    def gram_det(self):
        return gram_det(self.matrix.rows)

    @cached_property
    def norms_sq(self):
        return tuple(dot(v, v) for v in self.matrix.rows)

    @cached_property
    def sigma_sq(self):
        """(1/n) * sum of squared row norms, exact."""
        return Fraction(sum(self.norms_sq), self.rank)

    @property
    def sigma(self):
        return 2.0 ** (0.5 * log2_fraction(self.sigma_sq))

    @property
    def log2_sigma(self):
        return 0.5 * log2_fraction(self.sigma_sq)

    @property
    def log2_volume(self):
        return 0.5 * log2_int(self.gram_det)


def sigma_size(B):
    """Root-mean-square row norm of B; the exact square is ``B.sigma_sq``."""
    return B.sigma


def lattice_volume(B):
    """Volume sqrt(det(B B^T)); the exact square is ``B.gram_det``."""
    g = B.gram_det
    if g == 0:
        raise SingularBasis("Gram determinant is zero")
    return 2.0 ** (0.5 * log2_int(g))


@dataclass(frozen=True)
class MinimaProfile:
    values: tuple
    exact_sq: tuple
    vectors: tuple = ()


# Hermite constant policy: proven upper bound and the Gaussian-heuristic value
def hermite_upper(n):
    return 1.0 if n == 1 else 2.0 * n / 3.0


def hermite_gaussian(n):
    return n / (2 * math.pi * math.e)


def successive_minima_bruteforce(B, radius, budget=ENUMERATION_BUDGET):
    """Exact successive minima by enumerating all coefficient vectors in a box.

    The box is |x_i| <= radius * sqrt((G^-1)_ii), which contains every
    coefficient vector of a lattice point of norm <= radius.
    """
    n = B.rank
    if n > 5:
        raise EnumerationBudgetExceeded(f"rank {n} is above the oracle limit of 5")
    G = gram(B.rows)
    Ginv = rational_inverse(G)
    r2 = Fraction(radius) ** 2
    bounds = [math.isqrt(math.floor(r2 * Ginv[i][i])) + 1 for i in range(n)]
    count = math.prod(2 * b + 1 for b in bounds)
    if count > budget:
        raise EnumerationBudgetExceeded(f"box has {count} points (budget {budget})")

    found = _enumerate_short(G, bounds, r2)
    found.sort(key=lambda t: (t[0], t[1]))
    chosen, basis_coeffs = [], []
    for nsq, x in found:
        if rank_over_q(basis_coeffs + [list(x)]) > len(basis_coeffs):
            basis_coeffs.append(list(x))
            chosen.append((nsq, x))
            if len(chosen) == n:
                break
    if len(chosen) < n:
        raise RadiusTooSmall(f"radius {radius} certifies only {len(chosen)} of {n} minima")
    vectors = tuple(tuple(sum(c * row[j] for c, row in zip(x, B.rows)) for j in range(B.ambient_dim))
                    for _, x in chosen)
    exact = tuple(nsq for nsq, _ in chosen)
    return MinimaProfile(values=tuple(math.sqrt(v) for v in exact), exact_sq=exact, vectors=vectors)


def _enumerate_short(G, bounds, r2):
    n = len(G)
    max_entry = max(abs(g) for row in G for g in row)
    max_b = max(bounds)
    if max_entry * (n * max_b) ** 2 < 2**62:
        grids = np.meshgrid(*[np.arange(-b, b + 1, dtype=np.int64) for b in bounds], indexing="ij")
        X = np.stack([g.ravel() for g in grids], axis=1)
        Gn = np.array(G, dtype=np.int64)
        nsq = np.einsum("ij,jk,ik->i", X, Gn, X)
        keep = (nsq > 0) & (nsq <= r2)
        return [(int(v), tuple(int(c) for c in x)) for v, x in zip(nsq[keep], X[keep])]
    out = []
    for x in itertools.product(*[range(-b, b + 1) for b in bounds]):
        v = sum(x[i] * sum(G[i][j] * x[j] for j in range(n)) for i in range(n))
        if 0 < v <= r2:
            out.append((v, x))
    return out


def check_dims(u, B):
    if len(u) != B.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(u)} against dimension {B.ambient_dim}")
