# Two rank-1 applications: the first lattice step of CRT-ACD and of the hidden
# subset sum problem, the latter solved block by block.

import time

from hiddenlattice import solve_hlp_I
from hiddenlattice.instances import blockwise_solve, gen_crt_acd, gen_hssp

# CRT-ACD: N = p_1 p_2 p_3 and b = (x, y x) with small residues modulo every p_i
acd = gen_crt_acd(3, 120, 4, seed=1)
rep = solve_hlp_I(acd)
print(f"CRT-ACD: N has {acd.N.bit_length()} bits, recovered the residue lattice: {rep.success}")
print("  one recovered row:", rep.recovered_basis.rows[0])

# HSSP: v = sum alpha_i x_i mod N with binary x_i in dimension 64
hssp = gen_hssp(4, 64, 80, seed=1)
t0 = time.perf_counter()
direct = solve_hlp_I(hssp)
t1 = time.perf_counter()
blocks = blockwise_solve(hssp, 16)
t2 = time.perf_counter()
print(f"HSSP m=64: direct {direct.success} in {t1 - t0:.2f}s, "
      f"{blocks.details['nblocks']} blocks {blocks.success} in {t2 - t1:.2f}s")
assert direct.recovered_basis.gram_det == blocks.recovered_basis.gram_det
