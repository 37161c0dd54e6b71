"""Hidden lattice solvers: the orthogonal and congruence algorithms, the noisy
variant, and the gap-based decision procedure."""

import logging
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy import factorint, isprime

from .errors import (
    CompletionModeUnavailable,
    InvalidInstance,
    KernelRankMismatch,
    RankDeficient,
    RankMismatch,
)
from .lattice import LatticeBasis, log2_fraction, log2_int
from .linalg import (
    IntegerMatrix,
    bareiss_det,
    express_in_basis,
    kernel_mod_p,
    left_integer_kernel,
    matmul,
)
from .lll import ReductionParams, _reduce_rows, lll_reduce, sort_rows_by_norm
from .transforms import (
    completion,
    cong_mod_basis,
    local_completion,
    orthogonal_complement,
    ortho_mod_basis,
    phi_B,
)

log = logging.getLogger(__name__)


@dataclass
class Planted:
    L_basis: LatticeBasis
    mu_sq: Fraction
    seed: int | None = None
    coeffs: list | None = None  # M_j = sum coeffs[j][i] * L_i mod N
    X_basis: LatticeBasis | None = None  # noise vectors (noisy variant)
    extra: dict = field(default_factory=dict)

    @property
    def mu(self):
        return 2.0 ** (0.5 * log2_fraction(self.mu_sq))


@dataclass
class HlpInstance:
    m: int
    n: int
    r: int
    N: int
    M_basis: LatticeBasis
    planted: Planted | None = None
    factorization: tuple | None = None  # prime factors of N when known
    kind: str = "hlp"

    def __post_init__(self):
        self.N = abs(int(self.N))
        if not isinstance(self.M_basis, LatticeBasis):
            self.M_basis = LatticeBasis(self.M_basis)
        validate_shape(self.m, self.n, self.r, self.N, self.M_basis)

    def check_planted(self):
        """Every row of M is congruent mod N to the recorded combination of L."""
        p = self.planted
        if p is None or p.coeffs is None:
            return None
        combo = matmul(p.coeffs, p.L_basis.rows)
        return all((a - b) % self.N == 0 for ra, rb in zip(self.M_basis.rows, combo) for a, b in zip(ra, rb))

    def known_primes(self):
        if self.factorization:
            return tuple(sorted(set(int(p) for p in self.factorization)))
        if isprime(self.N):
            return (self.N,)
        return None


@dataclass
class NhlpInstance:
    m: int
    n: int
    r: int
    N: int
    W_basis: LatticeBasis
    rho: float
    planted: Planted | None = None
    kind: str = "nhlp"

    def __post_init__(self):
        self.N = abs(int(self.N))
        if not isinstance(self.W_basis, LatticeBasis):
            self.W_basis = LatticeBasis(self.W_basis)
        validate_shape(self.m, self.n, self.r, self.N, self.W_basis)


def validate_shape(m, n, r, N, M):
    if N == 0:
        raise InvalidInstance("N = 0 (exact orthogonality) is not supported")
    if N < 2:
        raise InvalidInstance("modulus must be at least 2")
    if not 1 <= r <= n < m:
        raise InvalidInstance(f"need 1 <= r <= n < m, got r={r}, n={n}, m={m}")
    if M.rank != r or M.ambient_dim != m:
        raise InvalidInstance(f"M has shape {M.rank}x{M.ambient_dim}, expected {r}x{m}")


@dataclass
class SolveReport:
    algo: str
    recovered_basis: LatticeBasis
    intermediate: LatticeBasis
    stats: object
    timings: dict
    success: bool | None = None
    details: dict = field(default_factory=dict)

    @property
    def sigma_out_sq(self):
        return self.recovered_basis.sigma_sq

    @property
    def sigma_out(self):
        return self.recovered_basis.sigma

    def to_dict(self):
        return {
            "algo": self.algo,
            "n": self.recovered_basis.rank,
            "m": self.recovered_basis.ambient_dim,
            "recovered_basis": [[str(x) for x in row] for row in self.recovered_basis.rows],
            "recovered_gram_det": str(self.recovered_basis.gram_det),
            "intermediate_rank": self.intermediate.rank,
            "sigma_out": self.sigma_out,
            "log2_sigma_out": self.recovered_basis.log2_sigma,
            "swap_count": getattr(self.stats, "swap_count", None),
            "timings_s": self.timings,
            "success": self.success,
            **self.details,
        }


def verify_recovery(recovered, planted_L):
    """True when ``recovered`` spans exactly the completion of ``planted_L``.

    Checks L inside recovered (integrally), recovered inside the rational
    span of L, and that recovered is saturated in Z^m.
    """
    rec = recovered if isinstance(recovered, LatticeBasis) else LatticeBasis(recovered)
    L = planted_L if isinstance(planted_L, LatticeBasis) else LatticeBasis(planted_L)
    if rec.rank != L.rank or rec.ambient_dim != L.ambient_dim:
        return False
    coords = express_in_basis(rec.rows, L.rows)
    if coords is None or any(x.denominator != 1 for row in coords for x in row):
        return False
    if express_in_basis(L.rows, rec.rows) is None:
        return False
    return is_saturated(rec)


def is_saturated(B, tries=6):
    """Whether the row lattice of B equals its completion.

    A prime p can only divide the index when it divides every maximal minor,
    so the candidates are the primes of a gcd of a few minors.
    """
    rows = B.rows
    n, m = len(rows), len(rows[0])
    if n == m:
        return abs(bareiss_det(rows)) == 1
    rng = random.Random(0)
    g = 0
    for t in range(tries):
        cols = list(range(n)) if t == 0 else sorted(rng.sample(range(m), n))
        g = gcd(g, bareiss_det([[row[c] for c in cols] for row in rows]))
        if g == 1:
            return True
    if g != 0 and g.bit_length() <= 200:
        primes = factorint(g)
        return all(not kernel_mod_p(rows, p) for p in primes)
    done = completion(B)
    return done.gram_det == B.gram_det


def _rank_check(basis, n):
    if basis.rank != n:
        raise RankMismatch(f"recovered rank {basis.rank}, expected {n}")


def solve_hlp_I(inst, params=None):
    """Orthogonal route: reduce M^perp_N, keep the m-n shortest vectors,
    return their orthogonal complement."""
    params = params or ReductionParams()
    m, n = inst.m, inst.n
    t0 = time.perf_counter()
    B = ortho_mod_basis(inst.M_basis, inst.N)
    red, stats = lll_reduce(B, params)
    N_I = LatticeBasis(IntegerMatrix(red.rows[: m - n]), check=False)
    t1 = time.perf_counter()
    rec = orthogonal_complement(N_I, delta=params.delta, prepass=params.prepass)
    t2 = time.perf_counter()
    _rank_check(rec, n)
    report = SolveReport("I", rec, N_I, stats, {"step1": t1 - t0, "step2": t2 - t1})
    if inst.planted is not None:
        report.success = verify_recovery(rec, inst.planted.L_basis)
        if report.success:
            report.details["phi_zero"] = all(
                not any(phi_B(u, inst.planted.L_basis)) for u in N_I.rows
            )
    return report


def _completion_route(inst, completion_mode, factorization):
    if completion_mode in ("double-orth", "double-orthogonal"):
        return None
    primes = tuple(factorization) if factorization else inst.known_primes()
    if completion_mode in ("mod-n", "modN-local"):
        if not primes:
            raise CompletionModeUnavailable("mod-N completion needs N prime or a known factorization")
        return primes
    if completion_mode == "auto":
        return primes
    raise CompletionModeUnavailable(f"unknown completion mode {completion_mode!r}")


def solve_hlp_II(inst, params=None, completion_mode="auto", factorization=None):
    """Congruence route: reduce M_N, keep the n shortest vectors, complete them."""
    params = params or ReductionParams()
    n = inst.n
    primes = _completion_route(inst, completion_mode, factorization)
    t0 = time.perf_counter()
    B = cong_mod_basis(inst.M_basis, inst.N)
    red, stats = lll_reduce(B, params)
    N_II = LatticeBasis(IntegerMatrix(red.rows[:n]), check=False)
    t1 = time.perf_counter()
    if primes:
        # step 2 is the completion itself; reducing its output is timed apart
        rec = local_completion(N_II, primes, reduce=False)
        mode = "mod-n"
    else:
        rec = completion(N_II, delta=params.delta, prepass=params.prepass)
        mode = "double-orth"
    t2 = time.perf_counter()
    timings = {"step1": t1 - t0, "step2": t2 - t1}
    if primes:
        rows = sort_rows_by_norm(_reduce_rows(rec.rows, params.delta, prepass=params.prepass))
        rec = LatticeBasis(IntegerMatrix(rows), check=False)
        timings["reduce"] = time.perf_counter() - t2
    _rank_check(rec, n)
    report = SolveReport("II", rec, N_II, stats, timings, details={"completion_mode": mode})
    if inst.planted is not None:
        report.success = verify_recovery(rec, inst.planted.L_basis)
    return report


def solve_hlp(inst, algo="I", params=None, **kw):
    if str(algo).upper() == "I":
        return solve_hlp_I(inst, params)
    return solve_hlp_II(inst, params, **kw)


def solve_nhlp(inst, params=None, algo="I"):
    """Embed w_j as (w_j, e_j), solve the rank n+r problem, then cut out the
    part of the answer with vanishing unit coordinates."""
    params = params or ReductionParams()
    m, n, r = inst.m, inst.n, inst.r
    W = [list(w) + [int(i == j) for j in range(r)] for i, w in enumerate(inst.W_basis.rows)]
    emb = HlpInstance(m + r, n + r, r, inst.N, LatticeBasis(IntegerMatrix(W), check=False))
    t0 = time.perf_counter()
    sub = solve_hlp(emb, algo, params)
    t1 = time.perf_counter()
    V = [row[:m] for row in sub.recovered_basis.rows]
    U = [row[m:] for row in sub.recovered_basis.rows]
    try:
        K = left_integer_kernel(U)
    except RankDeficient as exc:
        raise KernelRankMismatch(f"noise block has rank below {r}") from exc
    if K is None or K.nrows != n:
        raise KernelRankMismatch(f"left kernel has rank {0 if K is None else K.nrows}, expected {n}")
    KV = matmul(K, V)
    rows = sort_rows_by_norm(_reduce_rows(KV, params.delta, prepass=params.prepass))
    rec = LatticeBasis(IntegerMatrix(rows), check=False)
    t2 = time.perf_counter()
    report = SolveReport(f"nhlp-{algo}", rec, sub.recovered_basis, sub.stats,
                         {"embedded": t1 - t0, "kernel": t2 - t1})
    if inst.planted is not None:
        report.success = verify_recovery(rec, inst.planted.L_basis)
    return report


@dataclass
class GapProfile:
    reduced_norms: list
    ratios: list  # ratios[j-1] = log2 g_j for j = 1..m-1
    jumps: list  # jumps[k-1] = log2(|u_{k+1}| / |u_k|)
    tau_log2: float
    detected_rank: int | None = None
    side: str = "orth"

    def log2_g(self, j):
        return self.ratios[j - 1]

    def to_dict(self):
        return {
            "side": self.side,
            "tau_log2": self.tau_log2,
            "detected_rank": self.detected_rank,
            "reduced_norms": self.reduced_norms,
            "log2_g": self.ratios,
            "log2_jumps": self.jumps,
        }


def gap_profile(reduced, tau_log2=32.0, side="orth"):
    """log2 g_j = log2 (prod_{k>j} |u_k| / prod_{k<=j} |u_k|), j = 1..m-1.

    Norms are sorted first; products are taken over exact squared norms.
    """
    rows = reduced.rows if hasattr(reduced, "rows") else reduced
    sq = sorted(sum(x * x for x in row) for row in rows)
    m = len(sq)
    total = 1
    for s in sq:
        total *= s
    ratios = []
    prefix = 1
    for j in range(1, m):
        prefix *= sq[j - 1]
        # suffix / prefix = total / prefix^2
        ratios.append(0.5 * (log2_int(total) - 2 * log2_int(prefix)))
    lsq = [log2_int(s) for s in sq]
    jumps = [0.5 * (lsq[k] - lsq[k - 1]) for k in range(1, m)]
    norms = [2.0 ** (0.5 * v) for v in lsq]
    return GapProfile(norms, ratios, jumps, float(tau_log2), side=side)


@dataclass
class DhlpVerdict:
    exists: bool
    detected_rank: int | None
    profile: GapProfile

    def to_dict(self):
        return {"exists": self.exists, "detected_rank": self.detected_rank, "profile": self.profile.to_dict()}


def decide_dhlp(M, N, tau_log2=32.0, side="orth", params=None):
    """Reduce M^perp_N (or M_N) and look for one large jump between consecutive norms."""
    params = params or ReductionParams()
    M = M if isinstance(M, LatticeBasis) else LatticeBasis(M)
    if side in ("orth", "orthogonal"):
        B, side = ortho_mod_basis(M, N), "orth"
    elif side in ("cong", "congruence"):
        B, side = cong_mod_basis(M, N), "cong"
    else:
        raise ValueError(f"unknown side {side!r}")
    red, _ = lll_reduce(B, params)
    prof = gap_profile(red, tau_log2, side)
    m = len(prof.reduced_norms)
    if m < 2:
        return DhlpVerdict(False, None, prof)
    kstar = max(range(1, m), key=lambda k: (prof.jumps[k - 1], -k))
    exists = prof.jumps[kstar - 1] >= tau_log2
    rank = None
    if exists:
        rank = m - kstar if side == "orth" else kstar
    prof.detected_rank = rank
    return DhlpVerdict(exists, rank, prof)
