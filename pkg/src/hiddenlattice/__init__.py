"""Exact lattice toolkit for hidden lattice problems.

Bases are integer matrices whose rows are the basis vectors. The two
solvers recover the completion of a small hidden lattice from a sublattice
known modulo N: ``solve_hlp_I`` through the orthogonal lattice and
``solve_hlp_II`` through the congruence lattice.
"""

from .bounds import (
    AnalysisParams,
    BoundReport,
    bound_report,
    cost_estimates,
    density_delta,
    heuristic_logN_I,
    heuristic_logN_II,
    heuristic_logN_II_minkowski,
    proven_logNeps_I,
    proven_logNeps_II,
)
from .errors import LatticeError
from .instances import (
    GenSpec,
    blockwise_solve,
    count_orthogonal_mod_oracle,
    gen_crt_acd,
    gen_hlp,
    gen_hssp,
    gen_nhlp,
    gen_rank2_preset,
    success_rate_experiment,
)
from .lattice import LatticeBasis, MinimaProfile, lattice_volume, sigma_size, successive_minima_bruteforce
from .linalg import IntegerMatrix, RationalMatrix, invert_mod, kernel_mod_p, left_integer_kernel
from .lll import ReductionParams, ReductionStats, is_lll_reduced, lll_reduce
from .solvers import (
    GapProfile,
    HlpInstance,
    NhlpInstance,
    Planted,
    SolveReport,
    decide_dhlp,
    gap_profile,
    solve_hlp_I,
    solve_hlp_II,
    solve_nhlp,
    verify_recovery,
)
from .transforms import (
    ModularLatticePair,
    completion,
    cong_mod_basis,
    dual_basis,
    orthogonal_complement,
    ortho_mod_basis,
    p_completion,
    phi_B,
)

__version__ = "0.1.0"
