# Noisy variant: every public vector carries an unknown small error. Appending
# a unit coordinate per vector turns it back into an ordinary instance.

from hiddenlattice import GenSpec, gen_nhlp, solve_nhlp

inst = gen_nhlp(GenSpec(kind="nhlp", n=3, m=10, r=2, rho=2, alpha=5, log_N=120, seed=4))
print("noise vectors:", [list(x) for x in inst.planted.X_basis.rows])

rep = solve_nhlp(inst)
print(f"recovered rank {rep.recovered_basis.rank}, success {rep.success}")
for row in rep.recovered_basis.rows:
    print(" ", row)
