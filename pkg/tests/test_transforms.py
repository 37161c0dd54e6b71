import math
import random
from fractions import Fraction

import pytest

from hiddenlattice.errors import CompositeModulus, NoInvertibleMinor, SingularBasis
from hiddenlattice.lattice import LatticeBasis, successive_minima_bruteforce
from hiddenlattice.linalg import in_integer_span, kernel_mod_p, rank_over_q, smith_invariants
from hiddenlattice.lll import is_lll_reduced, lll_reduce
from hiddenlattice.transforms import (
    completion,
    complement_constant,
    cong_mod_basis,
    dual_basis,
    local_completion,
    modular_pair,
    ortho_mod_basis,
    orthogonal_complement,
    p_completion,
    phi_B,
)

from conftest import random_basis


def same_lattice(A, B):
    A = A.rows if hasattr(A, "rows") else A
    B = B.rows if hasattr(B, "rows") else B
    return in_integer_span(A, B) and in_integer_span(B, A)


def orth_mod(M, rows, N):
    return all(sum(a * b for a, b in zip(mrow, u)) % N == 0 for mrow in M for u in rows)


def random_mod_instance(rnd, m, r, N):
    while True:
        M = [[rnd.randrange(N) for _ in range(m)] for _ in range(r)]
        if rank_over_q(M) < r:
            continue
        try:
            ortho_mod_basis(M, N)
        except NoInvertibleMinor:
            continue
        return M


def test_ortho_examples():
    B = ortho_mod_basis([[1, 1]], 5)
    assert same_lattice(B, [[1, -1], [0, 5]])
    assert orth_mod([[1, 1]], B.rows, 5) and B.gram_det == 25
    B = ortho_mod_basis([[1, 0]], 3)
    assert same_lattice(B, [[0, 1], [3, 0]])
    B = ortho_mod_basis([[2, 1, 1]], 7)
    assert B.rank == 3 and orth_mod([[2, 1, 1]], B.rows, 7) and B.gram_det == 49


def test_cong_examples():
    B = cong_mod_basis([[1, 1]], 5)
    assert same_lattice(B, [[5, 0], [1, 1]])
    assert all((u[0] - u[1]) % 5 == 0 for u in B.rows) and B.gram_det == 25
    assert same_lattice(cong_mod_basis([[1, 0]], 3), [[1, 0], [0, 3]])


def test_no_invertible_minor_carries_factor():
    with pytest.raises(NoInvertibleMinor) as exc:
        ortho_mod_basis([[3, 6]], 9)
    assert exc.value.factor in (None, 3)
    with pytest.raises(NoInvertibleMinor):
        ortho_mod_basis([[7, 14]], 7)


def test_dual_examples():
    assert dual_basis([[1, 0], [0, 1]]).rows == ((1, 0), (0, 1))
    assert dual_basis([[2, 0], [0, 4]]).rows == ((Fraction(1, 2), 0), (0, Fraction(1, 4)))
    with pytest.raises(SingularBasis):
        dual_basis([[1, 2], [2, 4]])
    D = dual_basis(ortho_mod_basis([[1, 1]], 5))
    scaled = [[int(5 * x) for x in row] for row in D.rows]
    assert same_lattice(scaled, cong_mod_basis([[1, 1]], 5))


def test_duality_100_random():
    rnd = random.Random(2024)
    for _ in range(100):
        m = rnd.randint(2, 6)
        r = rnd.randint(1, m - 1)
        N = rnd.choice([2, 3, 5, 6, 7, 10, 12, 101, 2**31 - 1, 10**12 + 39])
        M = random_mod_instance(rnd, m, r, N)
        pair = modular_pair(M, N)
        orth, cong = pair.orth_basis, pair.cong_basis
        assert orth.gram_det * cong.gram_det == N ** (2 * m)
        assert orth.gram_det == N ** (2 * r)
        assert orth_mod(M, orth.rows, N)
        # cong rows lie in M + N Z^m: orthogonal mod N to every orth row
        assert all(sum(a * b for a, b in zip(u, v)) % N == 0 for u in cong.rows for v in orth.rows)
        D = dual_basis(orth)
        assert all(Fraction(N * x).denominator == 1 for row in D.rows for x in row)
        assert same_lattice([[int(N * x) for x in row] for row in D.rows], cong)


@pytest.mark.parametrize("B,expected", [
    ([[1, 0, 0]], [[0, 1, 0], [0, 0, 1]]),
    ([[2, 4]], [[2, -1]]),
])
def test_orthogonal_complement_examples(B, expected):
    assert same_lattice(orthogonal_complement(B), expected)


def test_orthogonal_complement_volume():
    C = orthogonal_complement([[1, 2, 3]])
    assert C.rank == 2 and C.gram_det == 14
    assert is_lll_reduced(orthogonal_complement([[1, 2, 3]], sort=False))


def test_complement_constant_rounds_up():
    K = complement_constant([[3, 4]])
    # 2^ceil(l) * ceil(||b||), l = (m-1)/2 = 1/2
    assert K == 2 * 5


def test_completion_examples():
    assert same_lattice(completion([[2, 0], [0, 2]]), [[1, 0], [0, 1]])
    assert same_lattice(completion([[2, 4]]), [[1, 2]])
    B = LatticeBasis([[1, 2, 0], [0, 1, 1]])
    assert completion(B).gram_det == B.gram_det


def test_complement_and_completion_properties():
    rnd = random.Random(99)
    for _ in range(60):
        n = rnd.randint(1, 4)
        m = rnd.randint(n + 1, 6)
        B = random_basis(rnd, n, m, bound=6)
        perp = orthogonal_complement(B)
        bar = completion(B)
        # (B^perp)^perp = completion, exactly as lattices
        assert same_lattice(orthogonal_complement(perp), bar)
        # completion contains B, spans the same space and is saturated
        assert in_integer_span(bar.rows, B.rows)
        assert rank_over_q(list(bar.rows) + list(B.rows)) == n
        assert smith_invariants(bar) == [1] * n
        # idempotence
        assert completion(bar).gram_det == bar.gram_det
        # Vol(perp) = Vol(bar) <= Vol(B)
        assert perp.gram_det == bar.gram_det <= B.gram_det
        assert B.gram_det % bar.gram_det == 0


def test_transference_products():
    rnd = random.Random(5)
    checked = 0
    while checked < 25:
        m = rnd.randint(2, 4)
        r = rnd.randint(1, m - 1)
        N = rnd.choice([3, 5, 7, 11, 13])
        M = random_mod_instance(rnd, m, r, N)
        orth = lll_reduce(ortho_mod_basis(M, N))[0]
        cong = lll_reduce(cong_mod_basis(M, N))[0]
        lo = successive_minima_bruteforce(orth, math.isqrt(max(orth.norms_sq)) + 1).exact_sq
        hi = successive_minima_bruteforce(cong, math.isqrt(max(cong.norms_sq)) + 1).exact_sq
        for j in range(m):
            prod = lo[j] * hi[m - 1 - j]
            assert N * N <= prod <= m * m * N * N
        checked += 1


def test_p_completion_examples():
    assert same_lattice(p_completion([[2, 4]], 2), [[1, 2]])
    assert same_lattice(p_completion([[3, 0], [0, 1]], 2), [[3, 0], [0, 1]])
    out = p_completion([[2, 0], [1, 1]], 2)
    assert not kernel_mod_p(out.rows, 2)
    ratio = Fraction(LatticeBasis([[2, 0], [1, 1]]).gram_det, out.gram_det)
    assert ratio.denominator == 1 and ratio.numerator & (ratio.numerator - 1) == 0
    # against completion() restricted to the 2-part of the index
    assert same_lattice(out, completion([[2, 0], [1, 1]]))
    with pytest.raises(CompositeModulus):
        p_completion([[2, 4]], 4)


def test_p_completion_only_touches_p():
    # index 6 = 2 * 3; 2-completion removes only the factor 2
    B = LatticeBasis([[6, 0, 0], [0, 1, 0]])
    out = p_completion(B, 2, reduce=False)
    assert Fraction(B.gram_det, out.gram_det) == 4
    both = local_completion(B, [2, 3])
    assert same_lattice(both, completion(B))


def test_phi_b():
    B = [[1, 0, 0], [0, 1, 0]]
    assert phi_B((0, 0, 1), B) == (0, 0)
    assert phi_B((1, 2, 3), B) == (1, 2)
    rnd = random.Random(4)
    L = random_basis(rnd, 3, 5, bound=7)
    for _ in range(50):
        u = [rnd.randint(-9, 9) for _ in range(5)]
        phi = phi_B(u, L)
        assert sum(x * x for x in phi) <= sum(x * x for x in u) * 3 * L.sigma_sq
