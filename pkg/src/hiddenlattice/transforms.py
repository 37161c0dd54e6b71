"""Modular lattices M^perp_N and M_N, duals, orthogonal complements and completions."""

import logging
from dataclasses import dataclass
from math import gcd

from sympy import isprime

from .errors import (
    CompositeModulus,
    DimensionMismatch,
    NoInvertibleMinor,
    ParamOutOfRange,
)
from .lattice import LatticeBasis
from .linalg import (
    IntegerMatrix,
    _PIVOT_PRIME,
    _pivots_mod,
    dot,
    invert_mod,
    kernel_mod_p,
    left_integer_kernel,
    rational_inverse,
    vecmat,
)
from .lll import DEFAULT_DELTA, _reduce_rows, sort_rows_by_norm

log = logging.getLogger(__name__)


def _sym(x, N):
    """Representative of x mod N in (-N/2, N/2]."""
    x %= N
    return x - N if 2 * x > N else x


def _as_basis(B):
    return B if isinstance(B, LatticeBasis) else LatticeBasis(B)


@dataclass(frozen=True)
class ModularLatticePair:
    orth_basis: LatticeBasis
    cong_basis: LatticeBasis
    modulus: int
    source_rank: int


def _unit_pivot_columns(M, N):
    """Greedy choice of r columns whose r x r minor is invertible mod N.

    Columns are scanned from the right so an already invertible trailing
    block is kept in place.
    """
    rows = [[x % N for x in row] for row in M]
    r, m = len(rows), len(rows[0])
    used, pivots = set(), []
    factor = None
    for i in range(r):
        piv = None
        for c in range(m - 1, -1, -1):
            if c in used or rows[i][c] == 0:
                continue
            g = gcd(rows[i][c], N)
            if g == 1:
                piv = c
                break
            if factor is None and 1 < g < N:
                factor = g
        if piv is None:
            raise NoInvertibleMinor(f"no unit pivot for row {i} of M modulo N", factor)
        used.add(piv)
        pivots.append(piv)
        inv = pow(rows[i][piv], -1, N)
        prow = [x * inv % N for x in rows[i]]
        for k in range(i + 1, r):
            f = rows[k][piv]
            if f:
                rows[k] = [(a - f * b) % N for a, b in zip(rows[k], prow)]
    return pivots


def _mtilde(M, N):
    """Return (perm, Mt): perm lists original columns in permuted order, the
    last r being the pivot block, and Mt = (-M2'^-1 M1')^T as an (m-r) x r
    table of symmetric residues."""
    r, m = len(M), len(M[0])
    pivots = _unit_pivot_columns(M, N)
    pivot_set = set(pivots)
    free = [c for c in range(m) if c not in pivot_set]
    tail = sorted(pivots)
    perm = free + tail
    M1 = [[row[c] for c in free] for row in M]
    M2 = [[row[c] for c in tail] for row in M]
    M2inv = invert_mod(M2, N).rows
    # X = M2^-1 M1 (r x (m-r))
    X = [[sum(M2inv[i][k] * M1[k][j] for k in range(r)) % N for j in range(m - r)] for i in range(r)]
    Mt = [[_sym(-X[i][j], N) for i in range(r)] for j in range(m - r)]
    return perm, Mt


def _unpermute(rows, perm):
    m = len(perm)
    out = []
    for row in rows:
        v = [0] * m
        for p, c in enumerate(perm):
            v[c] = row[p]
        out.append(tuple(v))
    return out


def _check_modulus(N):
    N = abs(int(N))
    if N < 2:
        raise ParamOutOfRange("modulus must be at least 2")
    return N


def ortho_mod_basis(M, N):
    """Basis of {u in Z^m : M u^T = 0 mod N} of the block shape [[1, Mt], [0, N]]."""
    M = _as_basis(M)
    N = _check_modulus(N)
    r, m = M.rank, M.ambient_dim
    perm, Mt = _mtilde(M.rows, N)
    rows = []
    for i in range(m - r):
        rows.append([int(i == j) for j in range(m - r)] + list(Mt[i]))
    for j in range(r):
        rows.append([0] * (m - r) + [N * int(j == k) for k in range(r)])
    return LatticeBasis(IntegerMatrix(_unpermute(rows, perm)), check=False)


def cong_mod_basis(M, N):
    """Basis N (B^T)^-1 of M + N Z^m, with B the basis from ortho_mod_basis."""
    M = _as_basis(M)
    N = _check_modulus(N)
    r, m = M.rank, M.ambient_dim
    perm, Mt = _mtilde(M.rows, N)
    rows = []
    for i in range(m - r):
        rows.append([N * int(i == j) for j in range(m - r)] + [0] * r)
    for j in range(r):
        rows.append([-Mt[i][j] for i in range(m - r)] + [int(j == k) for k in range(r)])
    return LatticeBasis(IntegerMatrix(_unpermute(rows, perm)), check=False)


def modular_pair(M, N):
    M = _as_basis(M)
    return ModularLatticePair(ortho_mod_basis(M, N), cong_mod_basis(M, N), _check_modulus(N), M.rank)


def dual_basis(B):
    """(B^T)^-1 over Q for a square full-rank basis."""
    B = _as_basis(B)
    if B.rank != B.ambient_dim:
        raise DimensionMismatch("dual_basis needs a square basis")
    return rational_inverse(B.matrix.T)


def _ceil_sqrt(x):
    from math import isqrt

    s = isqrt(x)
    return s if s * s == x else s + 1


def complement_constant(rows, multiplier=1):
    """K = 2^ceil(l) * prod ceil(||b_i||) * multiplier, l = (m-1)/2 + k(k-1)/4.

    Rounding l and the norms up only enlarges K, which keeps it large enough.
    """
    k, m = len(rows), len(rows[0])
    ell4 = 2 * (m - 1) + k * (k - 1)  # 4 * l
    prod = 1
    for v in rows:
        prod *= _ceil_sqrt(dot(v, v))
    return (prod << (-(-ell4 // 4))) * multiplier


def _complement_rows(rows, delta, multiplier, prepass):
    k, m = len(rows), len(rows[0])
    for attempt in range(4):
        K = complement_constant(rows, multiplier << (8 * attempt))
        big = [[K * rows[j][i] for j in range(k)] + [int(i == t) for t in range(m)] for i in range(m)]
        red = _reduce_big(big, delta, prepass)
        zero = [v for v in red if not any(v[:k])]
        rest = [v[:k] for v in red if any(v[:k])]
        if len(zero) == m - k and _pivots_mod(rest, _PIVOT_PRIME)[0] == list(range(k)):
            # the k remaining heads are independent, so the zero-head rows
            # generate every lattice vector with zero head
            return [v[k:] for v in zero]
        log.debug("complement: %d zero-head rows, expected %d; enlarging K", len(zero), m - k)
    K = left_integer_kernel(IntegerMatrix(rows).T)
    return [list(v) for v in K.rows]


def _reduce_big(big, delta, prepass):
    # The big embedding only needs to be reduced well enough to expose the
    # zero-head rows; exactness is certified on the projected basis.
    if prepass == "auto":
        from .lll import HAVE_FPYLLL, _fpylll_prepass

        if HAVE_FPYLLL:
            pre = _fpylll_prepass(big, delta)
            if pre is not None:
                return pre
    return _reduce_rows(big, delta, prepass="none")


def orthogonal_complement(B, *, delta=DEFAULT_DELTA, multiplier=1, prepass="auto", sort=True):
    """LLL-reduced basis of {v in Z^m : <v, b> = 0 for every row b}."""
    B = _as_basis(B)
    k, m = B.rank, B.ambient_dim
    if k >= m:
        raise ParamOutOfRange("orthogonal complement of a full-rank lattice is trivial")
    if multiplier < 1:
        raise ParamOutOfRange("K multiplier must be at least 1")
    tails = _complement_rows([list(r) for r in B.rows], delta, multiplier, prepass)
    out = _reduce_rows(tails, delta, prepass=prepass)
    if sort:
        out = sort_rows_by_norm(out)
    return LatticeBasis(IntegerMatrix(out), check=False)


def completion(B, *, delta=DEFAULT_DELTA, multiplier=1, prepass="auto"):
    """Basis of (span_Q B) intersected with Z^m, as the double orthogonal complement."""
    B = _as_basis(B)
    if B.rank == B.ambient_dim:
        return LatticeBasis(IntegerMatrix.identity(B.rank), check=False)
    inner = orthogonal_complement(B, delta=delta, multiplier=multiplier, prepass=prepass)
    return orthogonal_complement(inner, delta=delta, multiplier=multiplier, prepass=prepass)


def _p_saturate(rows, p):
    # kernel rows are in rref: row k is 1 at its pivot c_k and 0 at the other
    # pivots, so replacing every row c_k at once enlarges the index by p^s
    rows = [list(r) for r in rows]
    steps = 0
    while True:
        ker = kernel_mod_p(rows, p)
        if not ker:
            return rows, steps
        base = [list(r) for r in rows]
        for alpha in ker:
            i = next(j for j, a in enumerate(alpha) if a)
            lifted = [a - p if 2 * a >= p else a for a in alpha]
            x = vecmat(lifted, base)
            assert all(v % p == 0 for v in x)
            rows[i] = [v // p for v in x]
            steps += 1


def p_completion(B, p, *, reduce=True, delta=DEFAULT_DELTA, prepass="auto"):
    """Basis of {v in span : p^k v in lattice for some k}."""
    B = _as_basis(B)
    p = int(p)
    if p < 2 or not isprime(p):
        raise CompositeModulus(f"{p} is not prime")
    rows, _ = _p_saturate(B.rows, p)
    if reduce:
        rows = sort_rows_by_norm(_reduce_rows(rows, delta, prepass=prepass))
    return LatticeBasis(IntegerMatrix(rows), check=False)


def local_completion(B, primes, *, reduce=True, delta=DEFAULT_DELTA, prepass="auto"):
    """p-completion at every prime in ``primes`` (e.g. the prime factors of N)."""
    B = _as_basis(B)
    rows = [list(r) for r in B.rows]
    ps = sorted(set(int(q) for q in primes))
    for idx, p in enumerate(ps):
        if p < 2 or not isprime(p):
            raise CompositeModulus(f"{p} is not prime")
        rows, _ = _p_saturate(rows, p)
        if idx + 1 < len(ps):
            # keep entries small between primes
            rows = _reduce_rows(rows, delta, prepass=prepass)
    if reduce:
        rows = sort_rows_by_norm(_reduce_rows(rows, delta, prepass=prepass))
    return LatticeBasis(IntegerMatrix(rows), check=False)


def phi_B(u, B):
    """(<u, v_1>, ..., <u, v_n>) for the rows v_i of B."""
    B = _as_basis(B)
    if len(u) != B.ambient_dim:
        raise DimensionMismatch(f"vector of length {len(u)} against dimension {B.ambient_dim}")
    return tuple(dot(u, v) for v in B.rows)

