# Is there a hidden small lattice at all? Reduce M^perp_N and look for one big
# jump between consecutive norms.

from hiddenlattice import GenSpec, decide_dhlp, gen_hlp
from hiddenlattice.bench import random_modular_basis

n, m, r = 12, 40, 8
inst = gen_hlp(GenSpec(n=n, m=m, r=r, alpha=300, log_N=90, seed=1))
random_M = random_modular_basis(r, m, inst.N, seed=1)

for label, M in (("planted", inst.M_basis), ("random", random_M)):
    v = decide_dhlp(M, inst.N, tau_log2=32)
    prof = v.profile
    biggest = max(prof.jumps)
    print(f"{label:8s} exists={v.exists!s:5s} detected rank={v.detected_rank} "
          f"log2 g_(m-n)={prof.log2_g(m - n):8.1f} largest log2 jump={biggest:6.1f}")

# the planted jump sits right after the first m - n vectors
v = decide_dhlp(inst.M_basis, inst.N)
k = v.profile.jumps.index(max(v.profile.jumps)) + 1
print(f"jump after vector {k}; m - n = {m - n}")
