import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_invariant_factors

from hwspin.exact_linalg import (
    DimensionError,
    check_torus_certificate,
    check_torus_solution,
    determinant,
    f2_solve,
    frac_mod1,
    left_kernel_basis,
    matmul,
    smith_normal_form,
    torus_solve,
)

F = Fraction


def int_matrices(max_rows=5, max_cols=5, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# -- F_2 ---------------------------------------------------------------------


def brute_force_f2(A, b, n):
    sols = []
    for x in itertools.product((0, 1), repeat=n):
        if all(sum(a * xi for a, xi in zip(row, x)) % 2 == bi % 2 for row, bi in zip(A, b)):
            sols.append(list(x))
    return sols


def test_f2_identity():
    res = f2_solve([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [1, 0, 1])
    assert res.consistent and res.solution == [1, 0, 1] and res.kernel == []


def test_f2_zero_system():
    res = f2_solve([[0, 0, 0]], [0])
    assert res.consistent and res.solution == [0, 0, 0]
    assert sorted(res.kernel) == [[0, 0, 1], [0, 1, 0], [1, 0, 0]]


def test_f2_dimension_mismatch():
    with pytest.raises(DimensionError):
        f2_solve([[1, 0]], [1, 0])


def cyclic5_commutator_system():
    # the six commutator equations for the cyclic HW group in dimension 5,
    # written out by hand: t_comm[i][j] = (I - B_j) b_i - (I - B_i) b_j and the
    # Clifford sign (-1)^(|S_i||S_j| - |S_i & S_j|) = (-1)^13 = -1
    n = 5

    def B(i):
        return [1 if k == i else -1 for k in range(n)]

    def b(i):
        v = [F(0)] * n
        v[i] = v[(i + 1) % n] = F(1, 2)
        return v

    rows = []
    for i, j in itertools.combinations(range(4), 2):
        t = [(1 - B(j)[k]) * b(i)[k] - (1 - B(i)[k]) * b(j)[k] for k in range(n)]
        rows.append([int(x) % 2 for x in t])
    return rows, [1] * 6


def test_f2_cyclic5_commutators_inconsistent():
    A, b = cyclic5_commutator_system()
    assert brute_force_f2(A, b, 5) == []
    res = f2_solve(A, b)
    assert not res.consistent
    combo = [sum(A[i][k] for i in res.certificate) % 2 for k in range(5)]
    assert combo == [0] * 5
    assert sum(b[i] for i in res.certificate) % 2 == 1


@settings(max_examples=300, deadline=None)
@given(
    st.integers(1, 8).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=1, max_size=10),
        )
    ),
    st.data(),
)
def test_f2_matches_brute_force(nA, data):
    n, A = nA
    b = data.draw(st.lists(st.integers(0, 1), min_size=len(A), max_size=len(A)))
    sols = brute_force_f2(A, b, n)
    res = f2_solve(A, b)
    assert res.consistent == bool(sols)
    if res.consistent:
        assert res.solution in sols
        # kernel has the right dimension and every element of the coset solves
        assert 2 ** len(res.kernel) == len(sols)
        for coeffs in itertools.product((0, 1), repeat=len(res.kernel)):
            x = list(res.solution)
            for c, v in zip(coeffs, res.kernel):
                if c:
                    x = [(p + q) % 2 for p, q in zip(x, v)]
            assert x in sols
    else:
        assert all(sum(A[i][k] for i in res.certificate) % 2 == 0 for k in range(n))
        assert sum(b[i] for i in res.certificate) % 2 == 1


def test_f2_brute_force_twelve_variables():
    # larger case at the edge of the exhaustive-comparison range
    import random

    rng = random.Random(5)
    for _ in range(20):
        A = [[rng.randint(0, 1) for _ in range(12)] for _ in range(rng.randint(8, 16))]
        b = [rng.randint(0, 1) for _ in A]
        assert f2_solve(A, b).consistent == bool(brute_force_f2(A, b, 12))


# -- Smith normal form -------------------------------------------------------


def test_snf_diag_3_5():
    assert smith_normal_form([[3, 0], [0, 5]]).D == [[1, 0], [0, 15]]


def test_snf_2468():
    assert smith_normal_form([[2, 4], [6, 8]]).D == [[2, 0], [0, 4]]


def test_snf_zero():
    s = smith_normal_form([[0, 0], [0, 0]])
    assert s.D == [[0, 0], [0, 0]]
    assert s.U == [[1, 0], [0, 1]] and s.V == [[1, 0], [0, 1]]


def test_snf_no_rows():
    s = smith_normal_form([], ncols=3)
    assert s.D == [] and s.rank == 0 and len(s.V) == 3


def test_snf_known_example():
    A = [[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]
    assert smith_normal_form(A).diagonal == [1, 10, 30, 0]


@settings(max_examples=200, deadline=None)
@given(int_matrices())
def test_snf_properties(A):
    s = smith_normal_form(A)
    assert matmul(matmul(s.U, A), s.V) == s.D
    assert abs(determinant(s.U)) == 1 and abs(determinant(s.V)) == 1
    diag = s.diagonal
    for i, row in enumerate(s.D):
        for j, v in enumerate(row):
            if i != j:
                assert v == 0
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert diag[: len(nz)] == nz  # zeros trail
    for x, y in zip(nz, nz[1:]):
        assert y % x == 0
    # independent oracle
    expected = [int(d) for d in sympy_invariant_factors(Matrix(A), domain=ZZ) if d]
    assert nz == [abs(d) for d in expected]


@settings(max_examples=50, deadline=None)
@given(int_matrices())
def test_snf_deterministic(A):
    assert smith_normal_form(A) == smith_normal_form([list(r) for r in A])


# -- left kernels ------------------------------------------------------------


def test_left_kernel_identity():
    assert left_kernel_basis([[1, 0], [0, 1]]) == []


def test_left_kernel_symmetric():
    assert left_kernel_basis([[2], [-2]]) == [[1, 1]]


def test_left_kernel_column():
    K = left_kernel_basis([[2], [4], [6]])
    assert len(K) == 2
    for u in K:
        assert 2 * u[0] + 4 * u[1] + 6 * u[2] == 0
    # rank 2 and saturated: the 2x2 minors have gcd 1
    minors = [K[0][i] * K[1][j] - K[0][j] * K[1][i] for i, j in [(0, 1), (0, 2), (1, 2)]]
    from math import gcd

    assert gcd(*minors) == 1


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_left_kernel_property(A):
    K = left_kernel_basis(A)
    rank = Matrix(A).rank()
    assert len(K) == len(A) - rank
    for u in K:
        assert all(sum(u[i] * A[i][k] for i in range(len(A))) == 0 for k in range(len(A[0])))


# -- circle group ------------------------------------------------------------


def test_torus_quarter_turn():
    res = torus_solve([[2]], [F(1, 2)])
    assert res.consistent and res.solution == [F(1, 4)]


def test_torus_equal_rows_different_targets():
    res = torus_solve([[1, 1], [1, 1]], [0, F(1, 2)])
    assert not res.consistent
    assert res.certificate == {0: 1, 1: -1}
    assert res.pairing == F(1, 2)


def test_torus_zero():
    res = torus_solve([[0]], [0])
    assert res.consistent and res.solution == [0]


def test_torus_dimension_mismatch():
    with pytest.raises(DimensionError):
        torus_solve([[1, 2]], [0, 0])


def brute_force_torus_obstructed(A, b, bound=2):
    """Search integer combinations u with entries in [-bound, bound]."""
    rows = len(A)
    for u in itertools.product(range(-bound, bound + 1), repeat=rows):
        if all(sum(u[i] * A[i][k] for i in range(rows)) == 0 for k in range(len(A[0]))):
            if frac_mod1(sum(u[i] * b[i] for i in range(rows))) != 0:
                return True
    return False


@settings(max_examples=300, deadline=None)
@given(int_matrices(max_rows=4, max_cols=4, lo=-3, hi=3), st.data())
def test_torus_soundness(A, data):
    b = data.draw(st.lists(st.sampled_from([F(0), F(1, 2), F(1, 3), F(1, 4), F(3, 4)]), min_size=len(A), max_size=len(A)))
    res = torus_solve(A, b)
    if res.consistent:
        assert check_torus_solution(A, b, res.solution)
        assert all(0 <= x < 1 for x in res.solution)
    else:
        assert check_torus_certificate(A, b, res.certificate, len(A[0]))


def test_torus_matches_brute_force_small():
    import random

    rng = random.Random(11)
    for _ in range(150):
        r, c = rng.randint(1, 4), rng.randint(1, 3)
        A = [[rng.randint(-2, 2) for _ in range(c)] for _ in range(r)]
        b = [rng.choice([F(0), F(1, 2)]) for _ in range(r)]
        res = torus_solve(A, b)
        found = brute_force_torus_obstructed(A, b)
        if found:
            assert not res.consistent
        if res.consistent:
            assert check_torus_solution(A, b, res.solution)


def test_torus_large_redundant_system():
    # many copies of a small system exercise the sparse elimination path
    A, b = [], []
    for k in range(200):
        A.append([1, -1, 0, 2 * (k % 3)])
        b.append(F(0))
        A.append([0, 2, 0, 0])
        b.append(F(1, 2))
        A.append([0, 0, 2, 0])
        b.append(F(0))
    res = torus_solve(A, b)
    assert res.consistent and check_torus_solution(A, b, res.solution)
    A.append([0, 0, 4, 0])
    b.append(F(1, 2))
    res = torus_solve(A, b)
    assert not res.consistent
    assert check_torus_certificate(A, b, res.certificate, 4)
