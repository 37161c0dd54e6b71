"""Exact delta-LLL reduction.

The certificate pass is the all-integer variant of LLL: it tracks the Gram
determinants d_i of the leading sublattices and the integers
lambda_{i,j} = d_j * mu_{i,j}, so every Lovasz test is an exact integer
comparison. A floating-point fpylll pass may run first to do the heavy
lifting; its output is always re-certified exactly.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded, ParamOutOfRange
from .lattice import LatticeBasis
from .linalg import IntegerMatrix, dot

log = logging.getLogger(__name__)

try:
    from fpylll import IntegerMatrix as _FMatrix
    from fpylll import LLL as _FLLL

    HAVE_FPYLLL = True
except ImportError:  # pragma: no cover - exercised only without fpylll
    HAVE_FPYLLL = False

try:
    from gmpy2 import divexact as _divexact
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

    def _divexact(a, b):
        return a // b

DEFAULT_DELTA = Fraction(99, 100)


@dataclass(frozen=True)
class ReductionParams:
    delta: Fraction = DEFAULT_DELTA
    max_swaps: int | None = None
    provide_stats: bool = True
    prepass: str = "auto"  # "auto" uses fpylll when importable, "none" disables it
    sort_by_norm: bool = True

    def __post_init__(self):
        d = Fraction(self.delta).limit_denominator(10**9) if isinstance(self.delta, float) else Fraction(self.delta)
        object.__setattr__(self, "delta", d)
        if not Fraction(1, 4) < d < 1:
            raise ParamOutOfRange(f"delta must lie in (1/4, 1), got {d}")
        if self.prepass not in ("auto", "none"):
            raise ParamOutOfRange(f"unknown prepass mode {self.prepass!r}")
        if self.max_swaps is not None and self.max_swaps < 0:
            raise ParamOutOfRange("max_swaps must be non-negative")

    @property
    def c(self):
        """The constant 1/(delta - 1/4) of the LLL approximation bound."""
        return 1 / (self.delta - Fraction(1, 4))


@dataclass
class ReductionStats:
    swap_count: int = 0
    size_reduction_count: int = 0
    max_intermediate_bitlength: int = 0
    norms: list = field(default_factory=list)
    prepass_used: bool = False


def _bitlen(row):
    return max((abs(x).bit_length() for x in row), default=0)


def _fpylll_prepass(rows, delta):
    # aim a little above delta so the exact pass mostly just certifies
    fd = float(delta + (1 - delta) / 2)
    A = _FMatrix.from_matrix([list(r) for r in rows])
    try:
        _FLLL.reduction(A, delta=fd, eta=0.51)
    except Exception as exc:  # noqa: BLE001 - any fpylll failure means "skip the pre-pass"
        log.debug("fpylll pre-pass failed (%s); continuing with exact pass only", exc)
        return None
    out = [[int(A[i, j]) for j in range(A.ncols)] for i in range(A.nrows)]
    if any(not any(r) for r in out):
        return None
    return out


def _integral_lll(rows, delta, max_swaps, stats):
    """All-integer LLL on linearly independent rows (1-based internally)."""
    a, bden = delta.numerator, delta.denominator
    n = len(rows)
    if n <= 1:
        return [list(r) for r in rows]
    b = [None] + [[_mpz(x) for x in r] for r in rows]
    zero = _mpz(0)
    d = [zero] * (n + 1)
    d[0] = _mpz(1)
    lam = [[zero] * (n + 1) for _ in range(n + 1)]
    d[1] = dot(b[1], b[1])
    if d[1] == 0:
        raise ValueError("zero vector in LLL input")
    k, kmax = 2, 1
    track_bits = stats is not None

    def red(k, l):
        lkl = lam[k][l]
        if 2 * abs(lkl) > d[l]:
            q = (2 * lkl + d[l]) // (2 * d[l])
            bl, bk = b[l], b[k]
            for j in range(len(bk)):
                if bl[j]:
                    bk[j] -= q * bl[j]
            lam[k][l] -= q * d[l]
            lk, ll = lam[k], lam[l]
            for i in range(1, l):
                if ll[i]:
                    lk[i] -= q * ll[i]
            if track_bits:
                stats.size_reduction_count += 1
                bits = _bitlen(bk)
                if bits > stats.max_intermediate_bitlength:
                    stats.max_intermediate_bitlength = bits

    while k <= n:
        if k > kmax:
            kmax = k
            bk = b[k]
            lk = lam[k]
            for j in range(1, k + 1):
                u = dot(bk, b[j])
                lj = lam[j]
                for i in range(1, j):
                    u = _divexact(d[i] * u - lk[i] * lj[i], d[i - 1])
                if j < k:
                    lk[j] = u
                else:
                    if u == 0:
                        raise ValueError("LLL input rows are linearly dependent")
                    d[k] = u
        red(k, k - 1)
        lkk = lam[k][k - 1]
        if bden * d[k] * d[k - 2] < a * d[k - 1] * d[k - 1] - bden * lkk * lkk:
            if stats is not None:
                stats.swap_count += 1
                if max_swaps is not None and stats.swap_count > max_swaps:
                    raise BudgetExceeded(
                        f"LLL stopped after {max_swaps} swaps",
                        partial=[tuple(int(x) for x in r) for r in b[1:]],
                    )
            # SWAP(k)
            b[k], b[k - 1] = b[k - 1], b[k]
            lk, lk1 = lam[k], lam[k - 1]
            for j in range(1, k - 1):
                lk[j], lk1[j] = lk1[j], lk[j]
            lm = lkk
            B = _divexact(d[k - 2] * d[k] + lm * lm, d[k - 1])
            for i in range(k + 1, kmax + 1):
                li = lam[i]
                t = li[k]
                li[k] = _divexact(d[k] * li[k - 1] - lm * t, d[k - 1])
                li[k - 1] = _divexact(B * t + lm * li[k], d[k])
            d[k - 1] = B
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                red(k, l)
            k += 1
    return [[int(x) for x in r] for r in b[1:]]


def _reduce_rows(rows, delta=DEFAULT_DELTA, *, max_swaps=None, prepass="auto", stats=None):
    """Reduce a list of independent integer rows; returns a list of lists (unsorted)."""
    rows = [list(r) for r in rows]
    if prepass == "auto" and HAVE_FPYLLL and len(rows) > 2:
        pre = _fpylll_prepass(rows, delta)
        if pre is not None:
            rows = pre
            if stats is not None:
                stats.prepass_used = True
    if stats is None and max_swaps is not None:
        stats = ReductionStats()
    return _integral_lll(rows, Fraction(delta), max_swaps, stats)


def sort_rows_by_norm(rows):
    """Sort by squared norm, ties broken lexicographically."""
    return sorted((tuple(r) for r in rows), key=lambda r: (dot(r, r), r))


def lll_reduce(B, params=None):
    """delta-LLL reduce a basis; returns (LatticeBasis, ReductionStats).

    With ``params.sort_by_norm`` the reduced rows are then ordered by
    increasing norm (the reduced order is lost; the lattice is the same).
    """
    params = params or ReductionParams()
    if not isinstance(B, LatticeBasis):
        B = LatticeBasis(B)
    stats = ReductionStats()
    try:
        out = _reduce_rows(B.rows, params.delta, max_swaps=params.max_swaps,
                           prepass=params.prepass, stats=stats)
    except BudgetExceeded as exc:
        exc.partial = LatticeBasis(exc.partial, check=False)
        raise
    if params.sort_by_norm:
        out = sort_rows_by_norm(out)
    stats.norms = [math.sqrt(dot(r, r)) for r in out]
    return LatticeBasis(IntegerMatrix(out), check=False), stats


def gso_integral(rows):
    """Return (d, lam): d[0..n] Gram determinants and lam[i][j] = d_{j+1} mu_{i,j} (0-based rows)."""
    n = len(rows)
    rows = [[_mpz(x) for x in r] for r in rows]
    d = [_mpz(1)] + [_mpz(0)] * n
    lam = [[_mpz(0)] * n for _ in range(n)]
    for k in range(n):
        for j in range(k + 1):
            u = dot(rows[k], rows[j])
            for i in range(j):
                u = _divexact(d[i + 1] * u - lam[k][i] * lam[j][i], d[i])
            if j < k:
                lam[k][j] = u
            else:
                d[k + 1] = u
    return [int(x) for x in d], [[int(x) for x in row] for row in lam]


def is_lll_reduced(B, delta=DEFAULT_DELTA):
    """Exact check of size reduction (|mu| <= 1/2) and the Lovasz condition."""
    rows = B.rows if hasattr(B, "rows") else [tuple(r) for r in B]
    delta = Fraction(delta)
    d, lam = gso_integral(rows)
    n = len(rows)
    if any(x == 0 for x in d):
        return False
    for k in range(n):
        for j in range(k):
            if 2 * abs(lam[k][j]) > d[j + 1]:
                return False
    a, bden = delta.numerator, delta.denominator
    for k in range(1, n):
        # d_{k+1} d_{k-1} >= delta d_k^2 - lam^2, all in 1-based Gram determinants
        if bden * d[k + 1] * d[k - 1] < a * d[k] * d[k] - bden * lam[k][k - 1] ** 2:
            return False
    return True


def gso_norms_sq(rows):
    """Exact squared Gram-Schmidt norms ||b*_i||^2 = d_i / d_{i-1}."""
    d, _ = gso_integral(rows)
    return [Fraction(d[i + 1], d[i]) for i in range(len(rows))]
