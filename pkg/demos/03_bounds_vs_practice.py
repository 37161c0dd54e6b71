# Compare the closed-form modulus thresholds with the smallest modulus that
# actually works on a seeded instance.

import math

from hiddenlattice import AnalysisParams, GenSpec, gen_hlp, heuristic_logN_I, heuristic_logN_II
from hiddenlattice.bench import minimal_log_N
from hiddenlattice.bounds import proven_logNeps_I, proven_logNeps_II

n, m, r, alpha = 4, 20, 2, 2**15 - 1
inst = gen_hlp(GenSpec(n=n, m=m, r=r, alpha=alpha, log_N=80, seed=1))
log_mu = 0.5 * math.log2(inst.planted.mu_sq)
p = AnalysisParams(n, m, r, log_mu)

print(f"n={n} m={m} r={r} log mu={log_mu:.2f}")
print(f"heuristic thresholds: I {heuristic_logN_I(p):.1f}  II {heuristic_logN_II(p):.1f}")
print(f"proven thresholds on log(N eps): I {proven_logNeps_I(n, m, log_mu):.1f}  "
      f"II {proven_logNeps_II(n, m, log_mu):.1f}")

# binary search over log N for the planted instance with this seed
for algo in ("I", "II"):
    print(f"smallest working log N, algorithm {algo}: {minimal_log_N(n, m, r, alpha, 1, algo, 8, 120)}")

# the heuristic rows of the m = 100, r = 5 table, at the log mu that alpha = 2^15 - 1 gives
lm = 0.5 * math.log2(100 * (2**15 - 1) * 2**15 / 3)
for k in (10, 20, 40, 80, 90):
    q = AnalysisParams(k, 100, 5, lm)
    print(f"n={k:3d}: I {heuristic_logN_I(q):8.1f}   II {heuristic_logN_II(q):8.1f}")
