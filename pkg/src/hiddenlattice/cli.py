"""Command-line entry point: ``hlp <subcommand> ...``.

Exit codes: 0 on success, 1 on any library error (a JSON object with an
``error`` key is written to stderr), 2 on invalid flags.

Environment: HLP_SEED sets the default --seed, HLP_THREADS the default
--threads.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from .bench import SUITES, rows_to_csv, run_suite
from .bounds import AnalysisParams, bound_report
from .errors import LatticeError
from .instances import GenSpec, count_orthogonal_closed_form, count_orthogonal_mod_oracle, generate
from .io import instance_to_dict, load_basis_rows, load_instance, save_instance
from .lll import ReductionParams
from .solvers import HlpInstance, NhlpInstance, decide_dhlp, solve_hlp_I, solve_hlp_II, solve_nhlp, verify_recovery


def _env_int(name, default):
    v = os.environ.get(name)
    return int(v) if v not in (None, "") else default


def _delta(s):
    return Fraction(s).limit_denominator(10**6) if "." in s else Fraction(s)


def _emit(obj, out=None):
    out = out or sys.stdout
    json.dump(obj, out, indent=1)
    out.write("\n")


def cmd_gen(a):
    spec = GenSpec(kind=a.kind, n=a.n, m=a.m, r=a.r, log_N=a.log_n, alpha=a.alpha, rho=a.rho,
                   eta=a.eta, rho_acd=a.rho_acd, seed=a.seed, prime_modulus=not a.composite)
    inst = generate(spec)
    if a.output:
        save_instance(inst, a.output)
    else:
        _emit(instance_to_dict(inst))
    return 0


def cmd_solve(a):
    inst = load_instance(a.input)
    if isinstance(inst, NhlpInstance):
        raise LatticeError("noisy instance: use the nhlp subcommand")
    params = ReductionParams(delta=a.delta)
    if a.algo == "I":
        rep = solve_hlp_I(inst, params)
    else:
        rep = solve_hlp_II(inst, params, completion_mode=a.completion)
    d = rep.to_dict()
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            json.dump(d, fh, indent=1)
    if a.json:
        _emit(d)
    else:
        print(f"algorithm {rep.algo}: recovered rank {rep.recovered_basis.rank}, "
              f"log2 sigma {rep.recovered_basis.log2_sigma:.3f}, success {rep.success}")
        for row in rep.recovered_basis.rows:
            print(" ".join(str(x) for x in row))
    return 0


def cmd_verify(a):
    inst = load_instance(a.input)
    if inst.planted is None:
        raise LatticeError("instance carries no planted lattice to verify against")
    with open(a.report, encoding="utf-8") as fh:
        rep = json.load(fh)
    rec = load_basis_rows(rep["recovered_basis"])
    ok = verify_recovery(rec, inst.planted.L_basis)
    _emit({"verified": ok, "recovered_gram_det": str(rec.gram_det)})
    return 0 if ok else 1


def cmd_decide(a):
    inst = load_instance(a.input)
    M = inst.W_basis if isinstance(inst, NhlpInstance) else inst.M_basis
    v = decide_dhlp(M, inst.N, a.tau, a.side, ReductionParams(delta=a.delta))
    _emit(v.to_dict())
    return 0


def cmd_nhlp(a):
    inst = load_instance(a.input)
    if isinstance(inst, HlpInstance):
        raise LatticeError("instance is not a noisy instance")
    rep = solve_nhlp(inst, ReductionParams(delta=a.delta), algo=a.algo)
    _emit(rep.to_dict())
    return 0


def cmd_bounds(a):
    p = AnalysisParams(a.n, a.m, a.r, a.log_mu, a.log_iota, a.theta, a.delta, a.epsilon,
                       a.hermite, not a.no_clamp)
    _emit(bound_report(p, a.log_n).to_dict())
    return 0


def cmd_oracle(a):
    t = [int(x) for x in a.t.split(",")]
    count = count_orthogonal_mod_oracle(t, a.modulus)
    if a.json:
        _emit({"count": count, "closed_form": count_orthogonal_closed_form(t, a.modulus)})
    else:
        print(count)
    return 0


def cmd_bench(a):
    rows = run_suite(a.suite, threads=a.threads, timings=a.timings, path=a.params)
    text = rows_to_csv(rows)
    if a.out:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="hlp", description="Hidden lattice toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--kind", choices=["hlp", "nhlp", "crt_acd", "hssp", "rank2_preset"], default="hlp")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--r", type=int, default=1)
    g.add_argument("--log-n", type=int, default=None)
    g.add_argument("--alpha", type=int, default=1)
    g.add_argument("--rho", type=float, default=None)
    g.add_argument("--eta", type=int, default=None)
    g.add_argument("--rho-acd", type=int, default=None)
    g.add_argument("--seed", type=int, default=_env_int("HLP_SEED", 0))
    g.add_argument("--composite", action="store_true", help="N = 2^a + random odd offset")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run the orthogonal (I) or congruence (II) algorithm")
    s.add_argument("--algo", choices=["I", "II"], default="I")
    s.add_argument("--delta", type=_delta, default=Fraction(99, 100))
    s.add_argument("--completion", choices=["auto", "double-orth", "mod-n"], default="auto")
    s.add_argument("--input", required=True)
    s.add_argument("--json", action="store_true")
    s.add_argument("-o", "--output", help="also write the JSON report here")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a solve report against the planted lattice")
    v.add_argument("--input", required=True)
    v.add_argument("--report", required=True)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("decide", help="gap-based decision on the existence of a hidden lattice")
    d.add_argument("--input", required=True)
    d.add_argument("--tau", type=float, default=32.0)
    d.add_argument("--side", choices=["orth", "cong"], default="orth")
    d.add_argument("--delta", type=_delta, default=Fraction(99, 100))
    d.set_defaults(func=cmd_decide)

    nh = sub.add_parser("nhlp", help="solve a noisy instance")
    nh.add_argument("--input", required=True)
    nh.add_argument("--algo", choices=["I", "II"], default="I")
    nh.add_argument("--delta", type=_delta, default=Fraction(99, 100))
    nh.set_defaults(func=cmd_nhlp)

    b = sub.add_parser("bounds", help="evaluate the modulus thresholds")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--m", type=int, required=True)
    b.add_argument("--r", type=int, required=True)
    b.add_argument("--log-mu", type=float, required=True)
    b.add_argument("--log-iota", type=float, default=0.03)
    b.add_argument("--theta", type=float, default=1.0)
    b.add_argument("--delta", type=_delta, default=Fraction(99, 100))
    b.add_argument("--epsilon", type=float, default=0.5)
    b.add_argument("--log-n", type=float, default=None, help="log2 N for the N-dependent entries")
    b.add_argument("--hermite", choices=["gaussian_n_2pie", "upper_bound_2n3"], default="gaussian_n_2pie")
    b.add_argument("--no-clamp", action="store_true", help="keep a negative theta term")
    b.set_defaults(func=cmd_bounds)

    o = sub.add_parser("oracle", help="brute-force oracles")
    osub = o.add_subparsers(dest="oracle", required=True)
    co = osub.add_parser("count-orth", help="count a in (Z/NZ)^n with <a, t> = 0 mod N")
    co.add_argument("--t", required=True, help="comma-separated integers")
    co.add_argument("--modulus", type=int, required=True)
    co.add_argument("--json", action="store_true")
    co.set_defaults(func=cmd_oracle)

    be = sub.add_parser("bench", help="run a seed-pinned experiment suite")
    be.add_argument("--suite", choices=SUITES, required=True)
    be.add_argument("--out")
    be.add_argument("--params", help="JSON parameter file replacing the built-in one")
    be.add_argument("--threads", type=int, default=_env_int("HLP_THREADS", 1))
    be.add_argument("--timings", action="store_true", help="fill the step timing columns")
    be.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.m is None and args.kind != "crt_acd":
        parser.error("--m is required for this kind")
    try:
        return args.func(args)
    except LatticeError as exc:
        _emit(exc.to_dict(), sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
