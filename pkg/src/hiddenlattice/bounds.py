"""Closed-form modulus thresholds, density invariants and cost estimates.

All logarithms are base 2.
"""

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ParamOutOfRange

LOG2_2PIE = math.log2(2 * math.pi * math.e)


@dataclass(frozen=True)
class AnalysisParams:
    n: int
    m: int
    r: int
    log_mu: float
    log_iota: float = 0.03
    theta: float = 1.0
    delta: Fraction = Fraction(99, 100)
    epsilon: float = 0.5
    hermite_mode: str = "gaussian_n_2pie"  # or "upper_bound_2n3"
    clamp_theta: bool = True

    def __post_init__(self):
        object.__setattr__(self, "delta", Fraction(self.delta).limit_denominator(10**9))
        if not 1 <= self.r <= self.n < self.m:
            raise ParamOutOfRange(f"need 1 <= r <= n < m, got r={self.r}, n={self.n}, m={self.m}")
        if self.theta < 1:
            raise ParamOutOfRange("theta must be at least 1")
        if not 0 < self.epsilon < 1:
            raise ParamOutOfRange("epsilon must lie in (0, 1)")
        if not Fraction(1, 4) < self.delta < 1:
            raise ParamOutOfRange("delta must lie in (1/4, 1)")
        if self.hermite_mode not in ("gaussian_n_2pie", "upper_bound_2n3"):
            raise ParamOutOfRange(f"unknown hermite mode {self.hermite_mode!r}")

    @property
    def log_c(self):
        return -math.log2(float(self.delta) - 0.25)


def _lead(p):
    n, m, r = p.n, p.m, p.r
    return m * n / (r * (m - n)) * p.log_mu


def heuristic_logN_I(p):
    n, m, r = p.n, p.m, p.r
    return _lead(p) + m * n / r * p.log_iota + n / (2 * r) * math.log2(m - n)


def _theta_term(p):
    n, m, r = p.n, p.m, p.r
    t = m * n / (r * (m - n)) * math.log2(p.theta * math.sqrt(n) / math.sqrt(m))
    return max(t, 0.0) if p.clamp_theta else t


def heuristic_logN_II(p):
    n, m, r = p.n, p.m, p.r
    return _lead(p) + m / (m - n) * (m * n / r) * p.log_iota + _theta_term(p)


def heuristic_logN_II_minkowski(p):
    n, m, r = p.n, p.m, p.r
    log_mm_nn = m * math.log2(m) - n * math.log2(n)
    return (_lead(p) + m * n / r * p.log_iota + n / (2 * r) * math.log2(n)
            + n / (2 * r) * log_mm_nn - n * (m - n) / (2 * r) * LOG2_2PIE)


def density_delta(p, log_N):
    """Returns (Delta, Delta_I, Delta_II)."""
    n, m, r = p.n, p.m, p.r
    delta = r / n * log_N - m / (m - n) * p.log_mu
    delta_I = m * p.log_iota + 0.5 * math.log2(m - n)
    delta_II = m * m / (m - n) * p.log_iota + m / (m - n) * math.log2(p.theta * math.sqrt(n) / math.sqrt(m))
    return delta, delta_I, delta_II


def max_log_mu(p, log_N, algo="I"):
    """Largest log mu for which the heuristic threshold of ``algo`` is met at log_N."""
    n, m, r = p.n, p.m, p.r
    zero = AnalysisParams(n, m, r, 0.0, p.log_iota, p.theta, p.delta, p.epsilon, p.hermite_mode, p.clamp_theta)
    rest = heuristic_logN_I(zero) if algo == "I" else heuristic_logN_II(zero)
    return (log_N - rest) * r * (m - n) / (m * n)


def _check_proven(n, m, log_mu, delta):
    if n < 3:
        raise ParamOutOfRange("the proven thresholds need n >= 3")
    if m <= n:
        raise ParamOutOfRange("need m > n")
    if log_mu < 0:
        raise ParamOutOfRange("need mu >= 1")
    delta = Fraction(delta).limit_denominator(10**9)
    if not Fraction(1, 4) < delta < 1:
        raise ParamOutOfRange("delta must lie in (1/4, 1)")
    return -math.log2(float(delta) - 0.25)


def proven_logNeps_I(n, m, log_mu, delta=Fraction(99, 100)):
    """Bound on log(N * eps) above which the orthogonal route provably succeeds."""
    log_c = _check_proven(n, m, log_mu, delta)
    return (m * n / 2 * log_c + n * (n + 1) * log_mu
            + n * (m - n) / 2 * math.log2(2 / 3 * (m - n)) + n * math.log2(3 * math.sqrt(n)) + 1)


def proven_logNeps_II(n, m, log_mu, delta=Fraction(99, 100)):
    log_c = _check_proven(n, m, log_mu, delta)
    return m * n / 2 * log_c + n * (n + 2) * log_mu + n * math.log2(3 * n * n) + 1


def log2_k_eps(n, log_N, eps):
    """log2 of (1/3) (6 eps / pi^2)^(1/n) N^(1/n)."""
    return -math.log2(3) + (math.log2(6 * eps / math.pi**2) + log_N) / n


def log2_l_eps(n, log_N, eps):
    """log2 of 3n (pi^2 / (6 eps))^(1/n) N^(1 - 1/n)."""
    return math.log2(3 * n) + math.log2(math.pi**2 / (6 * eps)) / n + (1 - 1 / n) * log_N


def cost_estimates(m, r, log_N, n=None):
    """log2 of m^6 x + m^5 x^2 with x = log2(sqrt(r') N), r' = r (route I) or m - r (route II)."""

    def cost(rr):
        x = 0.5 * math.log2(rr) + log_N
        return math.log2(m**6 * x + m**5 * x * x)

    out = {"cost_I": cost(r), "cost_II": cost(m - r) if m > r else float("nan")}
    out["bkz_lower_log2"] = m * n / (r * log_N) if n is not None else None
    return out


def hermite_gamma(k, mode):
    return 2 * k / 3 if mode == "upper_bound_2n3" else k / (2 * math.pi * math.e)


def gaps_heuristic_log2(m, n, r, log_N, mode="gaussian_n_2pie"):
    """log2 of the expected g_{m-n} of a random M: minima all near sqrt(gamma_m) N^(r/m)."""
    return (2 * n - m) * (0.5 * math.log2(hermite_gamma(m, mode)) + r * log_N / m)


def gap_lower_bound_log2(m, n, r, log_N, log_mu):
    """log2 of (2(m-n)/3)^-(m-n) N^r / mu^(2n), the planted-instance lower bound on g_{m-n}."""
    k = m - n
    return -k * math.log2(2 * k / 3) + r * log_N - 2 * n * log_mu


@dataclass
class BoundReport:
    params: dict
    heuristic_I_bits: float
    heuristic_II_bits: float
    heuristic_II_minkowski_bits: float
    proven_I_bits: float | None
    proven_II_bits: float | None
    delta_density: float | None
    delta_I: float
    delta_II: float
    k_epsilon_log2: float | None
    l_epsilon_log2: float | None
    cost_I_bitops_log2: float | None
    cost_II_bitops_log2: float | None
    bkz_time_log2_lower: float | None

    def to_dict(self):
        d = asdict(self)
        d["params"] = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()}
        return d


def bound_report(p, log_N=None):
    """Evaluate every bound; N-dependent entries are None when log_N is absent."""
    h1, h2 = heuristic_logN_I(p), heuristic_logN_II(p)
    try:
        p1 = proven_logNeps_I(p.n, p.m, p.log_mu, p.delta)
        p2 = proven_logNeps_II(p.n, p.m, p.log_mu, p.delta)
    except ParamOutOfRange:
        p1 = p2 = None
    dens, dI, dII = density_delta(p, log_N if log_N is not None else 0.0)
    k = l = c1 = c2 = bkz = None
    if log_N is not None:
        k = log2_k_eps(p.n, log_N, p.epsilon)
        l = log2_l_eps(p.n, log_N, p.epsilon)
        costs = cost_estimates(p.m, p.r, log_N, p.n)
        c1, c2, bkz = costs["cost_I"], costs["cost_II"], costs["bkz_lower_log2"]
    else:
        dens = None
    return BoundReport(
        params=asdict(p),
        heuristic_I_bits=h1,
        heuristic_II_bits=h2,
        heuristic_II_minkowski_bits=heuristic_logN_II_minkowski(p),
        proven_I_bits=p1,
        proven_II_bits=p2,
        delta_density=dens,
        delta_I=dI,
        delta_II=dII,
        k_epsilon_log2=k,
        l_epsilon_log2=l,
        cost_I_bitops_log2=c1,
        cost_II_bitops_log2=c2,
        bkz_time_log2_lower=bkz,
    )
