"""Seeded instance generators, blockwise solving and small brute-force oracles.

Randomness: ``numpy.random.SeedSequence(seed)`` is spawned into fixed child
streams, one per field, each driving a PCG64 generator:

    0: hidden basis entries     1: modular combinations
    2: noise / secondary data   3: modulus offset or primes

so changing one field's sampling never shifts another field's values.
"""

import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy import isprime, nextprime

from .errors import (
    BlockAlignmentFailure,
    BudgetExceeded,
    InvalidInstance,
    LatticeError,
    NoInvertibleMinor,
    ParamOutOfRange,
    PerBlockFailure,
    PrimeGenFailure,
    ResampleBudgetExceeded,
)
from .lattice import LatticeBasis
from .linalg import IntegerMatrix, express_in_basis, gram_det, rank_mod, rank_over_q
from .lll import ReductionParams
from .solvers import (
    HlpInstance,
    NhlpInstance,
    Planted,
    SolveReport,
    solve_hlp,
    verify_recovery,
)
from .transforms import _unit_pivot_columns, completion

log = logging.getLogger(__name__)

RESAMPLE_BUDGET = 100
STREAM_BASIS, STREAM_COMB, STREAM_NOISE, STREAM_MODULUS = range(4)


def streams(seed):
    """The four per-field generators for a 64-bit seed."""
    children = np.random.SeedSequence(int(seed) & (2**64 - 1)).spawn(4)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]


def randbelow(rng, N):
    """Uniform integer in [0, N) for N of any size (rejection sampling on raw bytes)."""
    N = int(N)
    if N <= 0:
        raise ValueError("upper bound must be positive")
    if N <= 2**62:
        return int(rng.integers(0, N))
    k = N.bit_length()
    nbytes = (k + 7) // 8
    mask = (1 << k) - 1
    while True:
        x = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if x < N:
            return x


def uniform_matrix(rng, rows, cols, alpha):
    """Entries uniform in [-alpha, alpha]."""
    alpha = int(alpha)
    if alpha < 2**62:
        A = rng.integers(-alpha, alpha + 1, size=(rows, cols), dtype=np.int64)
        return [[int(x) for x in row] for row in A]
    return [[randbelow(rng, 2 * alpha + 1) - alpha for _ in range(cols)] for _ in range(rows)]


def prime_above(a):
    """The smallest prime larger than 2^a."""
    return int(nextprime(2 ** int(a)))


@dataclass
class GenSpec:
    kind: str = "hlp"
    n: int = 2
    m: int = 4
    r: int = 1
    log_N: int | None = None
    N: int | None = None
    alpha: int = 1
    rho: float | None = None
    eta: int | None = None
    rho_acd: int | None = None
    seed: int = 0
    prime_modulus: bool = True
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.alpha < 1:
            raise ParamOutOfRange("alpha must be at least 1")
        if self.kind not in ("hlp", "nhlp", "crt_acd", "hssp", "rank2_preset"):
            raise ParamOutOfRange(f"unknown instance kind {self.kind!r}")


def modulus_for(spec, rng):
    if spec.N is not None:
        N = abs(int(spec.N))
        if N < 2:
            raise InvalidInstance("modulus must be at least 2")
        return N
    if spec.log_N is None:
        raise ParamOutOfRange("either N or log_N is required")
    a = int(spec.log_N)
    if spec.prime_modulus:
        return prime_above(a)
    # 2^a plus a random odd offset below 2^(a-1)
    half = max(1, 2 ** max(a - 2, 0))
    return 2**a + 2 * randbelow(rng, half) + 1


def _independent_mod(rows, N):
    if isprime(N):
        return rank_mod(rows, N) == len(rows)
    return math.gcd(gram_det(rows), N) == 1


def _sample_basis(rng, n, m, alpha, N):
    for _ in range(RESAMPLE_BUDGET):
        B = uniform_matrix(rng, n, m, alpha)
        if _independent_mod(B, N):
            return B
    raise ResampleBudgetExceeded(f"no basis independent mod N after {RESAMPLE_BUDGET} draws")


def _combine(rng, r, B, N):
    """r uniform combinations of the rows of B modulo N, with a usable pivot minor."""
    n, m = len(B), len(B[0])
    for _ in range(RESAMPLE_BUDGET):
        C = [[randbelow(rng, N) for _ in range(n)] for _ in range(r)]
        M = [[sum(c * B[i][j] for i, c in enumerate(crow)) % N for j in range(m)] for crow in C]
        try:
            _unit_pivot_columns(M, N)
        except NoInvertibleMinor:
            continue
        if rank_over_q(M) == r:
            return C, M
    raise ResampleBudgetExceeded(f"no rank-{r} combination after {RESAMPLE_BUDGET} draws")


def gen_hlp(spec):
    """Planted instance: uniform basis with entries in [-alpha, alpha], M = r
    uniform combinations mod N, mu = sigma of the planted basis."""
    if spec.kind not in ("hlp", "nhlp"):
        raise ParamOutOfRange("gen_hlp needs kind 'hlp'")
    rb, rc, _, rn = streams(spec.seed)
    N = modulus_for(spec, rn)
    n, m, r = spec.n, spec.m, spec.r
    if not 1 <= r <= n < m:
        raise InvalidInstance(f"need 1 <= r <= n < m, got r={r}, n={n}, m={m}")
    B = _sample_basis(rb, n, m, spec.alpha, N)
    C, M = _combine(rc, r, B, N)
    L = LatticeBasis(IntegerMatrix(B), check=False)
    planted = Planted(L, L.sigma_sq, seed=spec.seed, coeffs=C)
    inst = HlpInstance(m, n, r, N, LatticeBasis(IntegerMatrix(M), check=False), planted)
    assert inst.check_planted()
    return inst


def _noise_vector(rng, m, rho):
    """Nonzero integer vector of norm at most rho."""
    rho2 = math.floor(rho * rho)
    t = math.isqrt(rho2)
    if t < 1:
        raise ParamOutOfRange("rho must be at least 1")
    while True:
        k = int(rng.integers(1, min(m, rho2) + 1))
        pos = rng.choice(m, size=k, replace=False)
        v = [0] * m
        for p in pos:
            v[int(p)] = int(rng.integers(1, t + 1)) * (1 if rng.integers(0, 2) else -1)
        if sum(x * x for x in v) <= rho2:
            return v


def gen_nhlp(spec):
    """w_j = (combination of the planted basis mod N) + x_j, with |x_j| <= rho."""
    if spec.rho is None:
        raise ParamOutOfRange("nhlp needs rho")
    rb, rc, rx, rn = streams(spec.seed)
    N = modulus_for(spec, rn)
    n, m, r = spec.n, spec.m, spec.r
    if not 1 <= r <= n < m or n + r > m:
        raise InvalidInstance(f"need 1 <= r <= n and n + r <= m, got r={r}, n={n}, m={m}")
    B = _sample_basis(rb, n, m, spec.alpha, N)
    for _ in range(RESAMPLE_BUDGET):
        X = [_noise_vector(rx, m, spec.rho) for _ in range(r)]
        if rank_over_q(B + X) == n + r:
            break
    else:
        raise ResampleBudgetExceeded("noise vectors keep meeting the hidden lattice")
    C, M = _combine(rc, r, B, N)
    W = [[(a + x) % N for a, x in zip(mrow, xrow)] for mrow, xrow in zip(M, X)]
    L = LatticeBasis(IntegerMatrix(B), check=False)
    Xb = LatticeBasis(IntegerMatrix(X), check=False)
    rho_actual = max(math.sqrt(sum(x * x for x in v)) for v in X)
    planted = Planted(L, L.sigma_sq, seed=spec.seed, coeffs=C, X_basis=Xb,
                      extra={"rho_actual": rho_actual})
    return NhlpInstance(m, n, r, N, LatticeBasis(IntegerMatrix(W), check=False), spec.rho, planted)


def check_nhlp_planted(inst):
    """w_j - x_j is congruent mod N to the recorded combination of L."""
    p = inst.planted
    for w, x, c in zip(inst.W_basis.rows, p.X_basis.rows, p.coeffs):
        target = [sum(ci * row[j] for ci, row in zip(c, p.L_basis.rows)) for j in range(inst.m)]
        if any((wi - xi - ti) % inst.N for wi, xi, ti in zip(w, x, target)):
            return False
    return True


def _random_prime(rng, bits):
    for _ in range(RESAMPLE_BUDGET):
        start = (1 << (bits - 1)) | randbelow(rng, 1 << (bits - 1))
        p = int(nextprime(start))
        if p.bit_length() == bits:
            return p
    raise PrimeGenFailure(f"could not draw a {bits}-bit prime")


def _small_residue_vector(rng, n, rho):
    bound = 2**rho
    return [int(x) for x in rng.integers(-bound, bound + 1, size=n)] if bound < 2**62 else \
        [randbelow(rng, 2 * bound + 1) - bound for _ in range(n)]


def crt(residues, primes):
    N = math.prod(primes)
    x = 0
    for a, p in zip(residues, primes):
        q = N // p
        x += a * q * pow(q, -1, p)
    return x % N


def gen_crt_acd(n, eta, rho, seed):
    """Rank-1 instance b = (x, y*x) mod N = p_1...p_n, where x and y have
    residues of at most rho bits modulo every p_i."""
    if n < 2:
        raise ParamOutOfRange("need n >= 2")
    if eta < 2 * rho + 8:
        raise ParamOutOfRange("eta must exceed 2*rho by a guard of 8 bits")
    rb, rc, rx, rp = streams(seed)
    primes = []
    while len(primes) < n:
        p = _random_prime(rp, eta)
        if p not in primes:
            primes.append(p)
        elif len(primes) > 10 * n:
            raise PrimeGenFailure("could not draw distinct primes")
    N = math.prod(primes)
    for _ in range(RESAMPLE_BUDGET):
        # xs[i][j] = residue of x_j modulo p_i
        xs = [_small_residue_vector(rb, n, rho) for _ in range(n)]
        ys = [_small_residue_vector(rx, n, rho) for _ in range(n)]
        L = [xs[i] + [a * b for a, b in zip(ys[i], xs[i])] for i in range(n)]
        if rank_over_q(L) == n:
            break
    else:
        raise ResampleBudgetExceeded("planted CRT-ACD lattice is degenerate")
    x = [crt([xs[i][j] for i in range(n)], primes) for j in range(n)]
    y = [crt([ys[i][j] for i in range(n)], primes) for j in range(n)]
    b = x + [(xi * yi) % N for xi, yi in zip(x, y)]
    coeffs = [[crt([int(i == k) for i in range(n)], primes) for k in range(n)]]
    Lb = LatticeBasis(IntegerMatrix(L), check=False)
    planted = Planted(Lb, Lb.sigma_sq, seed=seed, coeffs=coeffs,
                      extra={"primes": primes, "x": x, "y": y})
    inst = HlpInstance(2 * n, n, 1, N, LatticeBasis([b]), planted, factorization=tuple(primes),
                       kind="crt_acd")
    assert inst.check_planted()
    return inst


def hssp_combination(xs, alphas, N):
    """v = sum alpha_i x_i mod N."""
    m = len(xs[0])
    return [sum(a * x[j] for a, x in zip(alphas, xs)) % N for j in range(m)]


def gen_hssp(n, m, log_N, seed, prime_modulus=True):
    """Rank-1 instance v = sum alpha_i x_i mod N with binary hidden x_i."""
    if not 1 <= n <= m:
        raise ParamOutOfRange("need 1 <= n <= m")
    rb, rc, _, rn = streams(seed)
    N = modulus_for(GenSpec(kind="hssp", n=n, m=m, log_N=log_N, prime_modulus=prime_modulus), rn)
    for _ in range(RESAMPLE_BUDGET):
        xs = [[int(v) for v in row] for row in rb.integers(0, 2, size=(n, m))]
        if rank_over_q(xs) == n:
            break
    else:
        raise ResampleBudgetExceeded("binary vectors keep being dependent")
    for _ in range(RESAMPLE_BUDGET):
        alphas = [randbelow(rc, N) for _ in range(n)]
        v = hssp_combination(xs, alphas, N)
        if any(v) and any(math.gcd(x, N) == 1 for x in v):
            break
    else:
        raise ResampleBudgetExceeded("degenerate weights")
    L = LatticeBasis(IntegerMatrix(xs), check=False)
    assert L.sigma_sq <= m
    planted = Planted(L, L.sigma_sq, seed=seed, coeffs=[alphas])
    return HlpInstance(m, n, 1, N, LatticeBasis([v]), planted, kind="hssp")


def gen_rank2_preset(m, alpha, log_N, seed):
    """Rank-2 instance a = -(x + c*y) mod N with small x, y (fault-attack shape)."""
    rb, rc, _, rn = streams(seed)
    N = prime_above(log_N)
    B = _sample_basis(rb, 2, m, alpha, N)
    c = randbelow(rc, N)
    coeffs = [[N - 1, (-c) % N]]
    a = [(-(x + c * y)) % N for x, y in zip(B[0], B[1])]
    L = LatticeBasis(IntegerMatrix(B), check=False)
    planted = Planted(L, L.sigma_sq, seed=seed, coeffs=coeffs)
    return HlpInstance(m, 2, 1, N, LatticeBasis([a]), planted, kind="rank2_preset")


def generate(spec):
    """Dispatch on ``spec.kind``."""
    if spec.kind == "hlp":
        return gen_hlp(spec)
    if spec.kind == "nhlp":
        return gen_nhlp(spec)
    if spec.kind == "crt_acd":
        return gen_crt_acd(spec.n, spec.eta, spec.rho_acd if spec.rho_acd is not None else 0, spec.seed)
    if spec.kind == "hssp":
        return gen_hssp(spec.n, spec.m, spec.log_N, spec.seed, spec.prime_modulus)
    return gen_rank2_preset(spec.m, spec.alpha, spec.log_N, spec.seed)


# ---- blockwise solving ----

def block_columns(m, block_dim):
    """C_0 = [0, b), C_j = [jb, (j+1)b); leftover columns join the last block."""
    nblocks = m // block_dim
    blocks = [list(range(j * block_dim, (j + 1) * block_dim)) for j in range(nblocks)]
    blocks[-1].extend(range(nblocks * block_dim, m))
    return blocks


def _project_instance(inst, cols):
    M = [[row[c] for c in cols] for row in inst.M_basis.rows]
    return HlpInstance(len(cols), inst.n, inst.r, inst.N, LatticeBasis(IntegerMatrix(M), check=False),
                       factorization=inst.factorization)


def _solve_block(args):
    j, sub, algo, params = args
    try:
        return j, solve_hlp(sub, algo, params).recovered_basis.rows
    except LatticeError as exc:
        raise PerBlockFailure(f"block {j}: {exc}", j) from exc


def blockwise_solve(inst, block_dim, params=None, algo="I", workers=1):
    """Solve the projections onto C_0 + C_j separately and glue them along C_0."""
    params = params or ReductionParams()
    m, n = inst.m, inst.n
    if m == block_dim:
        return solve_hlp(inst, algo, params)
    if m < 2 * block_dim:
        raise ParamOutOfRange("need m >= 2 * block_dim")
    if block_dim < n:
        raise ParamOutOfRange("shared block must be at least n wide")
    t0 = time.perf_counter()
    blocks = block_columns(m, block_dim)
    jobs = []
    for j in range(1, len(blocks)):
        cols = blocks[0] + blocks[j]
        jobs.append((j, _project_instance(inst, cols), algo, params))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_solve_block, jobs))
    else:
        results = dict(_solve_block(job) for job in jobs)
    t1 = time.perf_counter()
    b0 = len(blocks[0])
    Q1 = [row[:b0] for row in results[1]]
    if rank_over_q(Q1) < n:
        raise BlockAlignmentFailure("shared block of projection 1 is rank deficient")
    rows = [list(map(Fraction, q)) for q in Q1]
    for j in range(1, len(blocks)):
        R = results[j]
        Q = [row[:b0] for row in R]
        if rank_over_q(Q) < n:
            raise BlockAlignmentFailure(f"shared block of projection {j} is rank deficient")
        T = express_in_basis(Q, Q1)  # T Q = Q1
        if T is None:
            raise BlockAlignmentFailure(f"projection {j} disagrees with projection 1 on the shared block")
        tail = [row[b0:] for row in R]
        for i in range(n):
            rows[i].extend(sum((T[i][k] * tail[k][c] for k in range(n)), Fraction(0))
                           for c in range(len(tail[0])))
    # put columns back in order and clear denominators row by row
    order = [c for blk in blocks for c in blk]
    full = []
    for row in rows:
        den = math.lcm(*(x.denominator for x in row))
        v = [0] * m
        for c, x in zip(order, row):
            v[c] = int(x * den)
        full.append(v)
    rec = completion(LatticeBasis(IntegerMatrix(full)), delta=params.delta, prepass=params.prepass)
    t2 = time.perf_counter()
    report = SolveReport(f"blockwise-{algo}", rec, LatticeBasis(IntegerMatrix(full), check=False), None,
                         {"blocks": t1 - t0, "glue": t2 - t1}, details={"nblocks": len(blocks)})
    if inst.planted is not None:
        report.success = verify_recovery(rec, inst.planted.L_basis)
    return report


# ---- oracles and experiments ----

ORACLE_BUDGET = 10**7


def count_orthogonal_mod_oracle(t, N):
    """#{a in (Z/NZ)^n : <a, t> = 0 mod N}, by exhaustion."""
    t = [int(x) for x in t]
    N = int(N)
    n = len(t)
    if N < 2 or not any(t):
        raise ParamOutOfRange("need N >= 2 and t nonzero")
    if N**n > ORACLE_BUDGET:
        raise BudgetExceeded(f"N^n = {N**n} exceeds the oracle budget {ORACLE_BUDGET}")
    if n <= 7:
        grids = np.meshgrid(*[np.arange(N, dtype=np.int64)] * n, indexing="ij")
        s = sum(g * (x % N) for g, x in zip(grids, t))
        return int(np.count_nonzero(s % N == 0))
    return sum(1 for a in itertools.product(range(N), repeat=n) if sum(x * y for x, y in zip(a, t)) % N == 0)


def count_orthogonal_closed_form(t, N):
    d = math.gcd(*[int(x) for x in t], int(N))
    return d * int(N) ** (len(t) - 1)


@dataclass
class SuccessRate:
    rate: float
    successes: int
    valid: int
    excluded: int

    def __float__(self):
        return self.rate


def _rate_trial(args):
    B, N, a, algo, params = args
    n, m = len(B), len(B[0])
    M = [[sum(ai * B[i][j] for i, ai in enumerate(a)) % N for j in range(m)]]
    try:
        inst = HlpInstance(m, n, 1, N, LatticeBasis(IntegerMatrix(M)),
                           Planted(LatticeBasis(IntegerMatrix(B), check=False), Fraction(0)))
        return bool(solve_hlp(inst, algo, params).success)
    except LatticeError:
        return False


def success_rate_experiment(B, N, sample_count, algo="I", delta=Fraction(99, 100), seed=0, workers=1):
    """Fraction of uniform a in (Z/NZ)^n for which the rank-1 instance sum a_i v_i mod N
    is solved. Samples with a zero combination mod N are excluded from the rate."""
    B = [list(r) for r in (B.rows if isinstance(B, LatticeBasis) else B)]
    N = int(N)
    rng = streams(seed)[STREAM_COMB]
    params = ReductionParams(delta=delta)
    jobs, excluded = [], 0
    for _ in range(sample_count):
        a = [randbelow(rng, N) for _ in range(len(B))]
        M = [sum(ai * B[i][j] for i, ai in enumerate(a)) % N for j in range(len(B[0]))]
        if not any(M):
            excluded += 1
            continue
        jobs.append((B, N, a, algo, params))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_rate_trial, jobs))
    else:
        outcomes = [_rate_trial(j) for j in jobs]
    valid = len(outcomes)
    wins = sum(outcomes)
    return SuccessRate(wins / valid if valid else 0.0, wins, valid, excluded)
