"""Seed-pinned experiment suites writing one CSV row per (instance, algorithm)."""

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from .bounds import (
    AnalysisParams,
    gaps_heuristic_log2,
    heuristic_logN_I,
    heuristic_logN_II,
    proven_logNeps_I,
    proven_logNeps_II,
)
from .errors import LatticeError, ParamOutOfRange, ResampleBudgetExceeded
from .instances import (
    GenSpec,
    RESAMPLE_BUDGET,
    _unit_pivot_columns,
    gen_hlp,
    prime_above,
    randbelow,
    streams,
    success_rate_experiment,
)
from .lattice import LatticeBasis
from .linalg import IntegerMatrix, rank_mod, rank_over_q
from .lll import ReductionParams, lll_reduce
from .solvers import gap_profile, solve_hlp
from .transforms import ortho_mod_basis

SUITES = ("table4", "table5", "table2", "success-rate")
COLUMNS = ["suite", "n", "m", "r", "log_N", "log_mu", "seed", "algo", "success",
           "sigma_out", "g_gap_log2", "heuristic_log_N", "step1_ms", "step2_ms"]


def load_suite(name, path=None):
    if path:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    if name not in SUITES:
        raise ParamOutOfRange(f"unknown suite {name!r}")
    return json.loads(resources.files("hiddenlattice").joinpath("suites", f"{name}.json").read_text())


def _try(n, m, r, alpha, seed, algo, log_N, params):
    inst = gen_hlp(GenSpec(n=n, m=m, r=r, alpha=alpha, log_N=log_N, seed=seed))
    try:
        rep = solve_hlp(inst, algo, params)
    except LatticeError:
        return inst, None
    return inst, rep


def minimal_log_N(n, m, r, alpha, seed, algo, lo, hi, params=None):
    """Smallest log N in [lo, hi] where the seeded planted instance is solved.

    Binary search, so success is treated as monotone in log N. Returns None
    when even ``hi`` fails.
    """
    params = params or ReductionParams()
    _, rep = _try(n, m, r, alpha, seed, algo, hi, params)
    if rep is None or not rep.success:
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        _, rep = _try(n, m, r, alpha, seed, algo, mid, params)
        if rep is not None and rep.success:
            hi = mid
        else:
            lo = mid + 1
    return hi


def _fmt(x, digits=4):
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.{digits}f}"
    return str(x)


def _row(suite, n, m, r, log_N, log_mu, seed, algo, success, sigma_out=None, g=None,
         heur=None, timings=None):
    t = timings or {}
    return {
        "suite": suite, "n": n, "m": m, "r": r, "log_N": log_N, "log_mu": _fmt(log_mu),
        "seed": seed, "algo": algo, "success": _fmt(success), "sigma_out": _fmt(sigma_out),
        "g_gap_log2": _fmt(g), "heuristic_log_N": _fmt(heur),
        "step1_ms": _fmt(t.get("step1")), "step2_ms": _fmt(t.get("step2")),
    }


def _ms(timings):
    return {k: 1000.0 * v for k, v in timings.items()} if timings else {}


def _task_table4(args):
    cfg, seed, algo, search, timings = args
    n, m, r, alpha = cfg["n"], cfg["m"], cfg["r"], cfg["alpha"]
    best = minimal_log_N(n, m, r, alpha, seed, algo, search["lo"], search["hi"])
    inst, rep = _try(n, m, r, alpha, seed, algo, best if best else search["hi"], ReductionParams())
    log_mu = 0.5 * math.log2(inst.planted.mu_sq)
    p = AnalysisParams(n, m, r, log_mu)
    heur = heuristic_logN_I(p) if algo == "I" else heuristic_logN_II(p)
    return _row("table4", n, m, r, best if best else "", log_mu, seed, algo, best is not None,
                rep.recovered_basis.log2_sigma if rep else None, None, heur,
                _ms(rep.timings) if (rep and timings) else None)


def random_modular_basis(r, m, N, seed):
    """Uniform r x m matrix mod N with a usable pivot minor."""
    rng = streams(seed)[1]
    for _ in range(RESAMPLE_BUDGET):
        M = [[randbelow(rng, N) for _ in range(m)] for _ in range(r)]
        try:
            _unit_pivot_columns(M, N)
        except LatticeError:
            continue
        if rank_over_q(M) == r:
            return LatticeBasis(IntegerMatrix(M), check=False)
    raise ResampleBudgetExceeded("no usable random M")


def orth_gap_log2(M, N, n, params=None):
    red, _ = lll_reduce(ortho_mod_basis(M, N), params or ReductionParams())
    prof = gap_profile(red)
    return prof.log2_g(len(prof.reduced_norms) - n), prof


def _task_table5(args):
    cfg, seed, kind, timings = args
    r, m, n, log_N, alpha = cfg["r"], cfg["m"], cfg["n"], cfg["log_N"], cfg["alpha"]
    inst = gen_hlp(GenSpec(n=n, m=m, r=r, alpha=alpha, log_N=log_N, seed=seed))
    log_mu = 0.5 * math.log2(inst.planted.mu_sq)
    t0 = time.perf_counter()
    if kind == "planted":
        g, _ = orth_gap_log2(inst.M_basis, inst.N, n)
        heur = None
    else:
        g, _ = orth_gap_log2(random_modular_basis(r, m, inst.N, seed), inst.N, n)
        heur = gaps_heuristic_log2(m, n, r, log_N)
    t = {"step1": time.perf_counter() - t0} if timings else None
    return _row("table5", n, m, r, log_N, log_mu, seed, kind, None, None, g, heur, _ms(t))


def _task_table2(args):
    cfg, seed, algo, timings = args
    n, m, r, log_N, alpha = cfg["n"], cfg["m"], cfg["r"], cfg["log_N"], cfg["alpha"]
    inst, rep = _try(n, m, r, alpha, seed, algo, log_N, ReductionParams())
    log_mu = 0.5 * math.log2(inst.planted.mu_sq)
    return _row("table2", n, m, r, log_N, log_mu, seed, algo, bool(rep and rep.success),
                rep.recovered_basis.log2_sigma if rep else None, None, None,
                _ms(rep.timings) if (rep and timings) else None)


def proven_log_N(n, m, log_mu, eps, algo, delta=ReductionParams().delta):
    """log N one bit above the proven threshold on log(N eps)."""
    bound = proven_logNeps_I(n, m, log_mu, delta) if algo == "I" else proven_logNeps_II(n, m, log_mu, delta)
    return math.ceil(bound - math.log2(eps)) + 1


def _task_rate(args):
    cfg, seed, algo, samples, eps, timings = args
    n, m, alpha = cfg["n"], cfg["m"], cfg["alpha"]
    base = gen_hlp(GenSpec(n=n, m=m, r=1, alpha=alpha, log_N=64, seed=seed))
    log_mu = 0.5 * math.log2(base.planted.mu_sq)
    log_N = proven_log_N(n, m, log_mu, eps, algo)
    N = prime_above(log_N)
    if rank_mod(base.planted.L_basis.rows, N) < n:
        raise ResampleBudgetExceeded("planted basis is dependent modulo the chosen N")
    t0 = time.perf_counter()
    res = success_rate_experiment(base.planted.L_basis, N, samples, algo, seed=seed)
    t = {"step1": time.perf_counter() - t0} if timings else None
    return _row("success-rate", n, m, 1, log_N, log_mu, seed, algo, res.rate, None, None, None, _ms(t))


def suite_tasks(name, spec, timings=False):
    seeds = spec["seeds"]
    if name == "table4":
        return _task_table4, [(c, s, a, spec["search"], timings) for c in spec["configs"] for s in seeds for a in ("I", "II")]
    if name == "table5":
        return _task_table5, [(c, s, k, timings) for c in spec["configs"] for s in seeds for k in ("planted", "random")]
    if name == "table2":
        return _task_table2, [(c, s, a, timings) for c in spec["configs"] for s in seeds for a in ("I", "II")]
    if name == "success-rate":
        return _task_rate, [(c, s, a, spec["samples"], spec["epsilon"], timings)
                            for c in spec["configs"] for s in seeds for a in ("I", "II")]
    raise ParamOutOfRange(f"unknown suite {name!r}")


def run_suite(name, threads=1, timings=False, path=None):
    spec = load_suite(name, path)
    fn, tasks = suite_tasks(name, spec, timings)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(fn, tasks))
    else:
        rows = [fn(t) for t in tasks]
    key = lambda r: (int(r["n"]), int(r["m"]), int(r["r"]), int(r["seed"]), r["algo"])  # noqa: E731
    return sorted(rows, key=key)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\r\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def write_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))
