# Plant a small lattice, hide it behind a modular combination, then get it back
# with both solvers.

import math

from hiddenlattice import GenSpec, gen_hlp, solve_hlp_I, solve_hlp_II

# n hidden vectors in Z^m with entries in [-alpha, alpha]; M holds r random
# combinations of them modulo a 90-bit prime
spec = GenSpec(n=6, m=24, r=3, alpha=1000, log_N=90, seed=7)
inst = gen_hlp(spec)
print(f"N has {inst.N.bit_length()} bits, planted log2 mu = {0.5 * math.log2(inst.planted.mu_sq):.2f}")
print("first public row:", inst.M_basis.rows[0][:6], "...")

# orthogonal route: short vectors of M^perp_N are orthogonal to L itself
a = solve_hlp_I(inst)
# congruence route: the n shortest vectors of M + N Z^m span a full-rank sublattice of L
b = solve_hlp_II(inst)

for rep in (a, b):
    t = ", ".join(f"{k} {1000 * v:.1f} ms" for k, v in rep.timings.items())
    print(f"algorithm {rep.algo}: success {rep.success}, log2 sigma {rep.recovered_basis.log2_sigma:.2f} ({t})")

# both answers are bases of the same lattice, so their Gram determinants agree
assert a.recovered_basis.gram_det == b.recovered_basis.gram_det
print("shortest recovered vector:", a.recovered_basis.rows[0])
print("planted vector for comparison:", inst.planted.L_basis.rows[0])
