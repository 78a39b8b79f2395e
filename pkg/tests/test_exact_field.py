from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dgkit.exact_field import (FieldSpec, Matrix, NoSolution, Subspace, kernel_basis, quotient_representatives, rank,
                               rref_rows, solve_particular)

Q = FieldSpec.rational()
F101 = FieldSpec.prime(101)
F2 = FieldSpec.prime(2)


def mat(F, rows):
    return Matrix.from_dense(F, rows)


def mul(F, m, v):
    return [F.norm(sum(F(a) * x for a, x in zip(row, v))) for row in m.to_dense()]


# ---------------------------------------------------------------- fields

def test_field_parsing():
    assert FieldSpec.parse("Q") == Q
    assert FieldSpec.parse("F101") == F101
    assert FieldSpec.parse("GF(7)") == FieldSpec.prime(7)
    with pytest.raises(ValueError):
        FieldSpec.prime(100)
    with pytest.raises(ValueError):
        FieldSpec.parse("R")


def test_element_io():
    assert Q("3/-6") == Fraction(-1, 2)
    assert Q.fmt(Fraction(-2, 4)) == "-1/2"
    assert F101("1/2") == 51
    assert F101.fmt(F101(-1)) == "100"
    assert F101.sign(3) == 100 and Q.sign(2) == 1
    with pytest.raises(ZeroDivisionError):
        F101.inv(0)


# ---------------------------------------------------------------- spec examples

def test_kernel_examples():
    assert kernel_basis(Matrix.identity(Q, 2)) == []
    k = kernel_basis(Matrix.zeros(Q, 2, 3))
    assert sorted(map(tuple, k)) == sorted([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    k = kernel_basis(mat(F101, [[1, 1], [1, 1]]))
    assert len(k) == 1
    a, b = k[0]
    assert a != 0 and F101.norm(a + b) == 0


def test_solve_examples():
    b = [Fraction(3), Fraction(-7)]
    assert solve_particular(Matrix.identity(Q, 2), b) == b
    assert solve_particular(Matrix.zeros(Q, 2, 2), [1, 0]) is NoSolution
    assert not NoSolution
    assert solve_particular(mat(Q, [[2]]), [1]) == [Fraction(1, 2)]


def test_quotient_examples():
    assert quotient_representatives([[1, 0], [0, 1]], 2, Q) == []
    assert sorted(map(tuple, quotient_representatives([], 2, Q))) == [(0, 1), (1, 0)]
    reps = quotient_representatives([[1, 1]], 2, Q)
    assert len(reps) == 1
    assert rank(mat(Q, [[1, 1], reps[0]])) == 2


# ---------------------------------------------------------------- oracles: sympy over Q, naive elimination mod p

def naive_rank_mod_p(rows, p):
    rows = [[x % p for x in r] for r in rows]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], p - 2, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


small = st.integers(-3, 3)
shapes = st.tuples(st.integers(1, 6), st.integers(1, 6))


@st.composite
def int_matrices(draw):
    n, m = draw(shapes)
    return [[draw(small) for _ in range(m)] for _ in range(n)]


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_rank_and_kernel_match_sympy(rows):
    m = mat(Q, rows)
    S = sympy.Matrix(rows)
    assert rank(m) == S.rank()
    k = kernel_basis(m)
    assert len(k) == len(rows[0]) - S.rank()
    for v in k:
        assert all(x == 0 for x in mul(Q, m, v))
    if k:
        assert sympy.Matrix([list(map(sympy.Rational, v)) for v in k]).rank() == len(k)


@settings(max_examples=150, deadline=None)
@given(int_matrices(), st.sampled_from([2, 3, 101]))
def test_rank_mod_p_matches_naive(rows, p):
    F = FieldSpec.prime(p)
    m = mat(F, rows)
    assert rank(m) == naive_rank_mod_p(rows, p)
    for v in kernel_basis(m):
        assert all(x == 0 for x in mul(F, m, v))


@settings(max_examples=100, deadline=None)
@given(int_matrices(), st.data())
def test_solve_particular_consistency(rows, data):
    m = mat(Q, rows)
    x = [Fraction(data.draw(small)) for _ in rows[0]]
    b = mul(Q, m, x)
    v = solve_particular(m, b)
    assert v is not NoSolution and mul(Q, m, v) == b
    # a vector outside the image, whenever the image is proper
    S = sympy.Matrix(rows)
    if S.rank() < len(rows):
        c = [Fraction(data.draw(small)) for _ in rows]
        in_image = sympy.Matrix.hstack(S, sympy.Matrix(c)).rank() == S.rank()
        assert (solve_particular(m, c) is NoSolution) == (not in_image)


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_quotient_representatives_complete_a_basis(rows):
    n = len(rows[0])
    reps = quotient_representatives(rows, n, Q)
    r = sympy.Matrix(rows).rank()
    assert len(reps) == n - r
    assert sympy.Matrix(rows + [list(map(sympy.Rational, v)) for v in reps]).rank() == n


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rref_backends_agree_mod_p(rows):
    F = F101
    dicts = [{c: F(x) for c, x in enumerate(r) if F(x)} for r in rows]
    outs = [rref_rows([dict(d) for d in dicts], len(rows[0]), F, backend=b) for b in ("sparse", "dense", "numpy")]
    assert outs[0] == outs[1] == outs[2]


def test_subspace_coords():
    S = Subspace(Q, 3, [[1, 1, 0], [0, 1, 1]])
    assert S.dim == 2 and S.contains([1, 2, 1]) and not S.contains([1, 0, 0])
    v = S.combine(S.coords([2, 3, 1]))
    assert v == [2, 3, 1]


def test_matrix_algebra():
    a = mat(Q, [[1, 2], [3, 4]])
    assert a @ Matrix.identity(Q, 2) == a
    assert (a - a).is_zero()
    assert a.transpose().to_dense() == [[1, 3], [2, 4]]
    with pytest.raises(IndexError):
        Matrix(Q, 1, 1, {(1, 0): 1})


def test_integer_input_is_coerced_into_the_field():
    # plain ints used to flow into rref unconverted and divide as floats
    rows = [[1, -1, 0, -1, 0, -1], [-1, -2, -1, 0, 0, -1], [1, 0, 0, -1, 0, 0], [0, 1, -1, -2, 0, 0],
            [1, 2, 3, 3, 0, 1]]
    assert len(quotient_representatives(rows, 6, Q)) == 2
    S = Subspace(Q, 6, rows)
    assert S.dim == 4 and all(isinstance(x, Fraction) for v in S.basis() for x in v)
