"""Exact integer and rational linear algebra.

Matrices are immutable; basis vectors are rows everywhere.  Nothing in
this module rounds: entries are Python ints or :class:`fractions.Fraction`.
"""

from fractions import Fraction
from math import gcd

from sympy import isprime

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

from .errors import (
    CompositeModulus,
    DimensionMismatch,
    NotInvertibleMod,
    RankDeficient,
    SingularBasis,
)

# large prime used for fast rank / pivot detection before exact work
_PIVOT_PRIME = (1 << 61) - 1


class IntegerMatrix:
    """Dense matrix of arbitrary-precision integers (row-major, immutable)."""

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrix must have at least one row and column")
        ncols = len(rows[0])
        if any(len(row) != ncols for row in rows):
            raise DimensionMismatch("ragged rows")
        self._rows = rows
        self._ncols = ncols

    @classmethod
    def identity(cls, n):
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def rows(self):
        return self._rows

    @property
    def nrows(self):
        return len(self._rows)

    @property
    def ncols(self):
        return self._ncols

    @property
    def shape(self):
        return (len(self._rows), self._ncols)

    @property
    def T(self):
        return IntegerMatrix(zip(*self._rows))

    def tolist(self):
        return [list(row) for row in self._rows]

    def __getitem__(self, i):
        return self._rows[i]

    def __iter__(self):
        return iter(self._rows)

    def __len__(self):
        return len(self._rows)

    def __eq__(self, other):
        if isinstance(other, IntegerMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"IntegerMatrix({self.tolist()!r})"

    def __matmul__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return IntegerMatrix(matmul(self._rows, other._rows))

    def scale(self, k):
        return IntegerMatrix([[k * x for x in row] for row in self._rows])

    def mod(self, N):
        return IntegerMatrix([[x % N for x in row] for row in self._rows])

    def columns(self, idx):
        return IntegerMatrix([[row[j] for j in idx] for row in self._rows])

    def hstack(self, other):
        if self.nrows != other.nrows:
            raise DimensionMismatch("hstack needs equal row counts")
        return IntegerMatrix([a + b for a, b in zip(self._rows, other._rows)])

    def vstack(self, other):
        if self.ncols != other.ncols:
            raise DimensionMismatch("vstack needs equal column counts")
        return IntegerMatrix(self._rows + other._rows)


class RationalMatrix:
    """Dense matrix of exact fractions; used for dual bases only."""

    __slots__ = ("_rows",)

    def __init__(self, rows):
        self._rows = tuple(tuple(Fraction(x) for x in row) for row in rows)

    @property
    def rows(self):
        return self._rows

    @property
    def shape(self):
        return (len(self._rows), len(self._rows[0]))

    def tolist(self):
        return [list(row) for row in self._rows]

    def __getitem__(self, i):
        return self._rows[i]

    def __eq__(self, other):
        if isinstance(other, RationalMatrix):
            return self._rows == other._rows
        return NotImplemented

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return f"RationalMatrix({[[str(x) for x in r] for r in self._rows]!r})"

    def scale(self, k):
        return RationalMatrix([[k * x for x in row] for row in self._rows])

    def common_denominator(self):
        d = 1
        for row in self._rows:
            for x in row:
                d = d * x.denominator // gcd(d, x.denominator)
        return d

    def to_integer(self):
        """Return the IntegerMatrix if every entry is integral, else raise."""
        if any(x.denominator != 1 for row in self._rows for x in row):
            raise ValueError("matrix has non-integral entries")
        return IntegerMatrix([[x.numerator for x in row] for row in self._rows])


def _as_rows(A):
    if isinstance(A, (IntegerMatrix, RationalMatrix)):
        return A.rows
    return tuple(tuple(row) for row in A)


def matmul(A, B):
    A, B = _as_rows(A), _as_rows(B)
    if len(A[0]) != len(B):
        raise DimensionMismatch(f"cannot multiply {len(A)}x{len(A[0])} by {len(B)}x{len(B[0])}")
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def vecmat(x, B):
    """Row vector times matrix."""
    B = _as_rows(B)
    out = [0] * len(B[0])
    for c, row in zip(x, B):
        if c:
            for j, b in enumerate(row):
                out[j] += c * b
    return out


def gram(rows):
    rows = _as_rows(rows)
    n = len(rows)
    G = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            G[i][j] = G[j][i] = dot(rows[i], rows[j])
    return G


def bareiss_det(A):
    """Exact determinant of a square integer matrix (fraction-free elimination)."""
    M = [list(row) for row in _as_rows(A)]
    n = len(M)
    if any(len(row) != n for row in M):
        raise DimensionMismatch("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * pk - mik * row_k[j]) // prev
        prev = pk
    return sign * M[n - 1][n - 1]


def gram_det(rows):
    return bareiss_det(gram(rows))


def rank_mod(A, p):
    """Rank of A over F_p (p prime, unchecked)."""
    return len(_pivots_mod(A, p)[0])


def _pivots_mod(A, p):
    """Row-reduce A mod p; return (pivot columns, pivot row origins)."""
    M = [[x % p for x in row] for row in _as_rows(A)]
    nrows, ncols = len(M), len(M[0])
    pivots, origins = [], list(range(nrows))
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        origins[r], origins[piv] = origins[piv], origins[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(r + 1, nrows):
            f = M[i][c]
            if f:
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return pivots, origins[:r]


def rank_over_q(A):
    """Exact rank over the rationals."""
    rows = [list(row) for row in _as_rows(A)]
    r = rank_mod(rows, _PIVOT_PRIME)
    if r == min(len(rows), len(rows[0])):
        return r
    return len(rref_rational(rows)[1])


def rref_rational(A):
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in _as_rows(A)]
    nrows, ncols = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rational_inverse(A):
    """Exact inverse over Q of a square integer/rational matrix."""
    rows = _as_rows(A)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise DimensionMismatch("inverse of a non-square matrix")
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    red, piv = rref_rational(aug)
    if piv[:n] != list(range(n)) or len(red) < n:
        raise SingularBasis("matrix is singular")
    return RationalMatrix([row[n:] for row in red])


def invert_mod(A, N):
    """Inverse of the square matrix A modulo N, entries in [0, N).

    Raises NotInvertibleMod when gcd(det A, N) > 1; the exception carries the
    discovered factor of N when it is a proper divisor.
    """
    N = abs(int(N))
    if N < 2:
        raise ValueError("modulus must be at least 2")
    rows = _as_rows(A)
    n = len(rows)
    det = bareiss_det(rows)
    g = gcd(det, N)
    if g != 1:
        factor = g if 1 < g < N else None
        raise NotInvertibleMod(f"determinant shares the factor {g} with the modulus", factor)
    inv = _gauss_jordan_mod(rows, N)
    if inv is None:
        # no unit pivot available (composite N); go through the adjugate
        adj = rational_inverse(rows).scale(det).to_integer()
        dinv = pow(det, -1, N)
        inv = [[x * dinv % N for x in row] for row in adj.rows]
    return IntegerMatrix(inv)


def _gauss_jordan_mod(rows, N):
    n = len(rows)
    M = [[x % N for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if gcd(M[i][c], N) == 1), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        inv = pow(M[c][c], -1, N)
        M[c] = [x * inv % N for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % N for a, b in zip(M[i], M[c])]
    return [row[n:] for row in M]


def kernel_mod_p(B, p):
    """Basis of the left kernel {a : a.B = 0 mod p}, in reduced row echelon form."""
    p = int(p)
    if p < 2 or not isprime(p):
        raise CompositeModulus(f"{p} is not prime")
    rows = _as_rows(B)
    n, m = len(rows), len(rows[0])
    M = [[x % p for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    r = 0
    for c in range(m):
        if r == n:
            break
        piv = next((i for i in range(r, n) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(r + 1, n):
            f = M[i][c]
            if f:
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
    kernel = [row[m:] for row in M[r:]]
    return _rref_mod(kernel, p) if kernel else []


def _rref_mod(rows, p):
    M = [list(row) for row in rows]
    nrows, ncols = len(M), len(M[0])
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(nrows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        r += 1
    return [tuple(row) for row in M[:r]]


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def left_integer_kernel(U):
    """Saturated basis K of {k in Z^rows : k.U = 0}.

    Row-reduces [U | 1] with unimodular integer operations; the rows whose
    U-part vanishes are the kernel, and unimodularity makes it saturated.
    """
    rows = [list(row) for row in _as_rows(U)]
    nr, nc = len(rows), len(rows[0])
    aug = [row + [int(i == j) for j in range(nr)] for i, row in enumerate(rows)]
    r = 0
    for c in range(nc):
        for i in range(r + 1, nr):
            a, b = aug[r][c], aug[i][c]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            ra, rb = aug[r], aug[i]
            aug[r] = [x * s + y * t for s, t in zip(ra, rb)]
            aug[i] = [(b // g) * s - (a // g) * t for s, t in zip(ra, rb)]
        if aug[r][c] == 0:
            raise RankDeficient(f"column rank of U is below {nc}")
        # keep the kernel rows small as we go
        for i in range(r):
            q = aug[i][c] // aug[r][c]
            if q:
                aug[i] = [s - q * t for s, t in zip(aug[i], aug[r])]
        r += 1
    return IntegerMatrix([row[nc:] for row in aug[r:]]) if r < nr else None


def _solve_ff(A, R):
    """Fraction-free Gauss-Jordan on [A | R] for square nonsingular A.

    Returns (d, Y) with A Y = d R, d = +-det(A); all arithmetic is integral.
    """
    n = len(A)
    M = [[_mpz(x) for x in a] + [_mpz(x) for x in r] for a, r in zip(A, R)]
    prev = _mpz(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            raise SingularBasis("basis rows are dependent")
        M[k], M[piv] = M[piv], M[k]
        pk = M[k][k]
        rk = M[k]
        for i in range(n):
            if i == k:
                continue
            ri = M[i]
            f = ri[k]
            M[i] = [(pk * a - f * b) // prev for a, b in zip(ri, rk)]
        prev = pk
    return prev, [row[n:] for row in M]


def express_in_basis(B, V):
    """Rational coordinates of each row of V in the row basis B.

    Returns a list of Fraction rows, or None when some row of V is outside
    the rational span of B.
    """
    B = _as_rows(B)
    V = _as_rows(V)
    n = len(B)
    cols, _ = _pivots_mod(B, _PIVOT_PRIME)
    if len(cols) < n:
        _, cols = rref_rational(B)
        if len(cols) < n:
            raise SingularBasis("basis rows are dependent")
    if not V:
        return []
    # x . B[:, cols] = v[cols] determines x; the remaining columns are checked
    At = [[B[i][j] for i in range(n)] for j in cols]
    Vt = [[v[j] for v in V] for j in cols]
    d, Y = _solve_ff(At, Vt)
    out = []
    for t, v in enumerate(V):
        y = [Y[i][t] for i in range(n)]
        for j in range(len(B[0])):
            if sum(yi * b[j] for yi, b in zip(y, B)) != d * v[j]:
                return None
        out.append([Fraction(int(yi), int(d)) for yi in y])
    return out


def in_integer_span(B, V):
    coords = express_in_basis(B, V)
    return coords is not None and all(x.denominator == 1 for row in coords for x in row)


def smith_invariants(A):
    """Invariant factors of an integer matrix (small matrices only)."""
    M = [list(row) for row in _as_rows(A)]
    nrows, ncols = len(M), len(M[0])
    out = []
    t = 0
    while t < min(nrows, ncols):
        nz = [(abs(M[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols) if M[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        M[t], M[i] = M[i], M[t]
        for row in M:
            row[t], row[j] = row[j], row[t]
        done = False
        while not done:
            done = True
            p = M[t][t]
            for i in range(t + 1, nrows):
                q = M[i][t] // p
                if q:
                    M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                if M[i][t]:
                    done = False
            for j in range(t + 1, ncols):
                q = M[t][j] // p
                if q:
                    for row in M:
                        row[j] -= q * row[t]
                if M[t][j]:
                    done = False
            if not done:
                nz = [(abs(M[i][j]), i, j) for i in range(t, nrows) for j in range(t, ncols)
                      if M[i][j] and (i == t or j == t)]
                _, i, j = min(nz)
                M[t], M[i] = M[i], M[t]
                for row in M:
                    row[t], row[j] = row[j], row[t]
                continue
            # divisibility condition
            bad = next(((i, j) for i in range(t + 1, nrows) for j in range(t + 1, ncols)
                        if M[i][j] % M[t][t]), None)
            if bad:
                M[t] = [a + b for a, b in zip(M[t], M[bad[0]])]
                done = False
        out.append(abs(M[t][t]))
        t += 1
    return out
