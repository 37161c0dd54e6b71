import math
from fractions import Fraction

import pytest

from hiddenlattice.bounds import (
    AnalysisParams,
    bound_report,
    cost_estimates,
    density_delta,
    heuristic_logN_I,
    heuristic_logN_II,
    heuristic_logN_II_minkowski,
    log2_k_eps,
    log2_l_eps,
    max_log_mu,
    proven_logNeps_I,
    proven_logNeps_II,
)
from hiddenlattice.errors import ParamOutOfRange

GRID = [(n, m, r) for m in (8, 20, 100, 250) for n in (2, m // 4, m // 2, m - 1) for r in (1, max(1, n // 2), n)
        if 1 <= r <= n < m]


def test_params_validation():
    for kw in (dict(n=3, m=3, r=1), dict(n=3, m=6, r=0), dict(n=3, m=6, r=4)):
        with pytest.raises(ParamOutOfRange):
            AnalysisParams(log_mu=1, **kw)
    with pytest.raises(ParamOutOfRange):
        AnalysisParams(3, 6, 1, 1.0, theta=0.5)
    with pytest.raises(ParamOutOfRange):
        AnalysisParams(3, 6, 1, 1.0, epsilon=1.0)
    with pytest.raises(ParamOutOfRange):
        AnalysisParams(3, 6, 1, 1.0, hermite_mode="exact")
    assert AnalysisParams(3, 6, 1, 1.0, delta=Fraction(3, 4)).log_c == pytest.approx(1.0)


def test_heuristic_I_examples():
    assert heuristic_logN_I(AnalysisParams(10, 100, 5, 18.0)) == pytest.approx(52.49, abs=0.01)
    p = AnalysisParams(7, 20, 3, 0.0, log_iota=0.0)
    assert heuristic_logN_I(p) == pytest.approx(7 / 6 * math.log2(13))
    assert heuristic_logN_I(AnalysisParams(50, 250, 30, 18.0)) == pytest.approx(57, abs=1)


def test_heuristic_II_examples():
    assert heuristic_logN_II(AnalysisParams(10, 100, 5, 18.0)) == pytest.approx(46.67, abs=0.01)
    # 180 log mu + 540: 3780 at log mu = 18
    assert heuristic_logN_II(AnalysisParams(90, 100, 5, 18.0)) == pytest.approx(3780.0)
    assert heuristic_logN_II(AnalysisParams(5, 10, 2, 0.0, log_iota=0.0)) == 0
    unclamped = AnalysisParams(5, 10, 2, 0.0, log_iota=0.0, clamp_theta=False)
    assert heuristic_logN_II(unclamped) == pytest.approx(50 / 10 * math.log2(math.sqrt(0.5)))


def test_heuristic_II_minkowski_examples():
    p = AnalysisParams(2, 4, 1, 0.0, log_iota=0.0)
    expected = 1 + 6 - 2 * math.log2(2 * math.pi * math.e)
    assert heuristic_logN_II_minkowski(p) == pytest.approx(expected)
    assert heuristic_logN_II_minkowski(p) == pytest.approx(-1.188, abs=0.001)
    # n = m - 1, mu = 1: the m^m / n^n term dominates the positive part
    q = AnalysisParams(9, 10, 1, 0.0, log_iota=0.0)
    big = 9 / 2 * (10 * math.log2(10) - 9 * math.log2(9))
    small = 9 / 2 * math.log2(9) - 9 / 2 * math.log2(2 * math.pi * math.e)
    assert heuristic_logN_II_minkowski(q) == pytest.approx(big + small)
    assert big > abs(small)


def _minkowski_unapproximated(n, m, r, log_mu, log_iota):
    # iota^m sqrt(gamma_n) mu N^(1-r/n) < N mu^(-n/(m-n)) (n^(n/2)/m^(m/2))^((m-n-1)/(m-n)) sqrt(2 pi e)^(m-n-1)
    # solved for log N, gamma_n = n / (2 pi e), exponent (m-n-1)/(m-n) kept exact
    lhs = m * log_iota + 0.5 * math.log2(n / (2 * math.pi * math.e)) + log_mu
    rhs = (-n / (m - n) * log_mu + (m - n - 1) / (m - n) * (n / 2 * math.log2(n) - m / 2 * math.log2(m))
           + (m - n - 1) / 2 * math.log2(2 * math.pi * math.e))
    return (lhs - rhs) * n / r


@pytest.mark.parametrize("n,m,r", [(2, 4, 1), (10, 100, 5), (50, 250, 30), (64, 128, 32), (99, 100, 1)])
def test_minkowski_variant_against_its_inequality(n, m, r):
    p = AnalysisParams(n, m, r, 13.0)
    exact = _minkowski_unapproximated(n, m, r, 13.0, 0.03)
    # the printed form rounds (m-n-1)/(m-n) up to 1 on the m^m/n^n term
    slack = n / (2 * r * (m - n)) * (m * math.log2(m) - n * math.log2(n))
    assert heuristic_logN_II_minkowski(p) - exact == pytest.approx(slack)


def test_I_and_II_heuristics_comparable():
    for n in (8, 32, 128, 512):
        p = AnalysisParams(n, 2 * n, 1, 18.0)
        assert 0.5 < heuristic_logN_II(p) / heuristic_logN_I(p) < 2


def test_density_examples():
    d, _, _ = density_delta(AnalysisParams(4, 9, 2, 0.0), 40.0)
    assert d == pytest.approx(20.0)
    d, _, _ = density_delta(AnalysisParams(2, 4, 1, 8.0), 40.0)
    assert d == pytest.approx(4.0)


@pytest.mark.parametrize("n,m,r", GRID)
def test_density_identity_reproduces_thresholds(n, m, r):
    p = AnalysisParams(n, m, r, 11.0, theta=1.5, clamp_theta=False)
    for log_N in (10.0, 100.0, 1000.0):
        d, dI, dII = density_delta(p, log_N)
        assert d - dI == pytest.approx(r / n * (log_N - heuristic_logN_I(p)), abs=1e-9)
        assert d - dII == pytest.approx(r / n * (log_N - heuristic_logN_II(p)), abs=1e-9)


def test_proven_examples():
    assert proven_logNeps_I(3, 6, 0.0, Fraction(3, 4)) == pytest.approx(21.63, abs=0.005)
    assert proven_logNeps_II(3, 6, 0.0, Fraction(3, 4)) == pytest.approx(24.26, abs=0.005)
    for n in (3, 5, 8):
        diff = proven_logNeps_I(n, 2 * n, 5.0) - proven_logNeps_I(n, 2 * n, 4.0)
        assert diff == pytest.approx(n * (n + 1))


def test_proven_errors():
    for args in ((2, 6, 0.0), (3, 3, 0.0), (3, 6, -1.0)):
        with pytest.raises(ParamOutOfRange):
            proven_logNeps_I(*args)
        with pytest.raises(ParamOutOfRange):
            proven_logNeps_II(*args)
    with pytest.raises(ParamOutOfRange):
        proven_logNeps_I(3, 6, 0.0, Fraction(1, 4))


def test_proven_II_tighter_as_n_grows():
    # at m = 2n the I bound carries an extra n^2 log n term
    for n in (50, 200, 1000):
        assert proven_logNeps_II(n, 2 * n, 10.0) < proven_logNeps_I(n, 2 * n, 10.0)
    # while for fixed n the II bound grows faster in log mu
    assert proven_logNeps_II(10, 20, 30.0) > proven_logNeps_I(10, 20, 30.0)


def test_proven_growth_class():
    # m = 2n, mu fixed: quadratic in n
    ratios = [proven_logNeps_I(n, 2 * n, 10.0) / (n * n * max(10.0, math.log2(n))) for n in (16, 64, 256, 1024)]
    assert max(ratios) < 2 * min(ratios)


def test_proven_at_least_heuristic_on_grid():
    # observed relation; II's iota term m^2 n/(r(m-n)) outgrows the proven bound once m - n is tiny
    for n, m, r in GRID:
        if n < 3 or m - n < m / 8:
            continue
        for log_mu in (0.0, 5.0, 18.0):
            p = AnalysisParams(n, m, r, log_mu)
            assert proven_logNeps_I(n, m, log_mu) >= heuristic_logN_I(p)
            assert proven_logNeps_II(n, m, log_mu) >= heuristic_logN_II(p)


def test_proven_below_heuristic_when_m_minus_n_tiny():
    assert proven_logNeps_II(99, 100, 0.0) < heuristic_logN_II(AnalysisParams(99, 100, 1, 0.0))


def test_k_and_l_eps_finite():
    for n in (3, 10):
        bound = proven_logNeps_II(n, 2 * n, 4.0)
        for eps in (0.5, 0.999):
            k, l = log2_k_eps(n, bound, eps), log2_l_eps(n, bound, eps)
            assert math.isfinite(k) and math.isfinite(l)
            assert 2**l > 0 and 2**k > 0


def test_cost_estimates():
    c = cost_estimates(100, 50, 300)
    assert c["cost_I"] == c["cost_II"]
    c = cost_estimates(100, 1, 350)
    assert c["cost_I"] < c["cost_II"]
    for r in range(50, 100):
        c = cost_estimates(100, r, 200)
        assert c["cost_II"] <= c["cost_I"]
    assert cost_estimates(100, 5, 400, n=10)["bkz_lower_log2"] == pytest.approx(100 * 10 / (5 * 400))


@pytest.mark.parametrize("n,m,r", GRID)
def test_monotone_in_mu_and_iota(n, m, r):
    funcs = [heuristic_logN_I, heuristic_logN_II, heuristic_logN_II_minkowski]
    for f in funcs:
        vals = [f(AnalysisParams(n, m, r, mu)) for mu in (0.0, 1.0, 10.0, 18.0)]
        assert vals == sorted(vals)
        vals = [f(AnalysisParams(n, m, r, 8.0, log_iota=i)) for i in (0.0, 0.01, 0.03, 0.1)]
        assert vals == sorted(vals)
    if n >= 3:
        vals = [proven_logNeps_II(n, m, mu) for mu in (0.0, 1.0, 10.0)]
        assert vals == sorted(vals)


def test_detectable_mu_exponent():
    for n, m, r in GRID:
        p = AnalysisParams(n, m, r, 0.0)
        for algo in ("I", "II"):
            slope = max_log_mu(p, 101.0, algo) - max_log_mu(p, 100.0, algo)
            assert slope == pytest.approx(r * (m - n) / (n * m))
    p = AnalysisParams(20, 40, 10, 0.0)
    assert max_log_mu(p, 1.0) - max_log_mu(p, 0.0) == pytest.approx(0.25)
    # at the threshold exactly
    q = AnalysisParams(10, 100, 5, 18.0)
    assert max_log_mu(q, heuristic_logN_I(q)) == pytest.approx(18.0)


def test_delta_I_II_linear_growth():
    for ell in (2, 3, 5):
        per_n = []
        for n in (8, 32, 128, 512):
            _, dI, dII = density_delta(AnalysisParams(n, ell * n, 1, 0.0), 0.0)
            per_n.append((dI / n, dII / n))
        assert max(a for a, _ in per_n) < 2 * ell * 0.03 + 1
        assert max(abs(b) for _, b in per_n) < 2 * ell * ell * 0.03 + 2


def test_bound_report():
    rep = bound_report(AnalysisParams(10, 100, 5, 18.0), log_N=60.0)
    d = rep.to_dict()
    assert d["heuristic_I_bits"] == pytest.approx(52.49, abs=0.01)
    assert d["params"]["delta"] == "99/100"
    for key in ("proven_I_bits", "delta_density", "k_epsilon_log2", "l_epsilon_log2", "cost_I_bitops_log2"):
        assert math.isfinite(d[key])
    bare = bound_report(AnalysisParams(2, 4, 1, 1.0))
    assert bare.proven_I_bits is None and bare.delta_density is None and bare.k_epsilon_log2 is None
