import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from dgkit.exact_field import FieldSpec, Matrix, rank
from dgkit.fixtures import fixture
from dgkit.graded_complex import (ChainMap, CohomologyBasis, Complex, cocycles, NotNullHomotopic, cohomology, cohomology_dim, cone, differential,
                                  direct_sum, hom_complex, induced_rank, is_closed, null_homotopy_witness, shift,
                                  validate_complex)

from conftest import complexes, random_complex

Q = FieldSpec.rational()
F101 = FieldSpec.prime(101)
F2 = FieldSpec.prime(2)


def k_at(F, n):
    return Complex(F, {n: 1})


def two_term(F, lo=-1, c=1):
    return Complex(F, {lo: 1, lo + 1: 1}, {lo: Matrix.from_dense(F, [[c]])})


def all_h(c, lo=-6, hi=6):
    return {n: cohomology_dim(c, n) for n in range(lo, hi + 1)}


# ---------------------------------------------------------------- validate / shift

def test_validate_examples():
    assert validate_complex(Complex(Q, {0: 2, 1: 2}))[0]
    one = Matrix.identity(Q, 1)
    bad = Complex(Q, {0: 1, 1: 1, 2: 1}, {0: one, 1: one})
    ok, msg = validate_complex(bad)
    assert not ok and "d^1 d^0" in msg
    assert validate_complex(fixture("F2", Q).hom_complex("*", "*"))[0]


def test_shift_examples():
    c = two_term(Q, 0)
    assert shift(c, 0) == c
    assert shift(k_at(Q, 0), 1).dims == {-1: 1}
    s = shift(c, 1)
    assert s.dims == {-1: 1, 0: 1} and s.diff(-1).to_dense() == [[-1]]


@settings(max_examples=50, deadline=None)
@given(complexes(), st.integers(-3, 3))
def test_shift_round_trip(c, n):
    assert shift(shift(c, n), -n) == c
    assert all_h(shift(c, n)) == {k: cohomology_dim(c, k + n) for k in range(-6, 7)}


# ---------------------------------------------------------------- cone

def test_cone_examples():
    a = two_term(Q)
    assert all(v == 0 for v in all_h(cone(ChainMap.identity(a)).complex).values())
    b = k_at(Q, 0)
    C = cone(ChainMap.zero(a, b)).complex
    assert all_h(C) == {n: cohomology_dim(a, n + 1) + cohomology_dim(b, n) for n in range(-6, 7)}
    k = k_at(F101, 0)
    zero = ChainMap(k, k, 0, {0: Matrix.from_dense(F101, [[0]])})
    one = ChainMap(k, k, 0, {0: Matrix.from_dense(F101, [[1]])})
    assert cohomology_dim(cone(zero).complex, 0) == 1
    assert cohomology_dim(cone(one).complex, 0) == 0


def test_cone_rejects_bad_maps():
    a = two_term(Q)
    with pytest.raises(ValueError):
        cone(ChainMap(a, a, 1, {}))
    b = k_at(Q, -1)
    not_closed = ChainMap(b, a, 0, {-1: Matrix.from_dense(Q, [[1]])})
    with pytest.raises(ValueError):
        cone(not_closed)


def _random_closed(a, b, rng):
    H = hom_complex(a, b)
    z = cocycles(H, 0)
    vec = [0] * H.dim(0)
    for v in z:
        s = Q.random_element(rng)
        vec = [x + s * y for x, y in zip(vec, v)]
    return H.decode(0, vec) if H.dim(0) else ChainMap.zero(a, b)


@settings(max_examples=60, deadline=None)
@given(complexes(), complexes(), st.integers(0, 10 ** 6))
def test_cone_structure_and_long_exact_sequence(a, b, seed):
    f = _random_closed(a, b, random.Random(seed))
    c = cone(f)
    assert validate_complex(c.complex)[0]
    # quoted structural relations: dj = 0, dp = 0, di = j f sigma, ds = -f sigma p
    assert is_closed(c.j) and is_closed(c.p)
    assert differential(c.i) == c.j @ f @ c.sigma
    assert differential(c.s) == -(f @ c.sigma @ c.p)
    # rank long exact sequence: h^n(cone) = (h^n b - rk H^n f) + (h^{n+1} a - rk H^{n+1} f)
    for n in range(-4, 3):
        expect = cohomology_dim(b, n) - induced_rank(f, n) + cohomology_dim(a, n + 1) - induced_rank(f, n + 1)
        assert cohomology_dim(c.complex, n) == expect


# ---------------------------------------------------------------- hom complex

def test_hom_complex_examples():
    H = hom_complex(k_at(Q, 0), k_at(Q, 0))
    assert H.dims == {0: 1} and not H.d
    assert hom_complex(k_at(Q, 0), k_at(Q, 1)).dims == {1: 1}


def _brute_chain_maps(a, b):
    """All degree-0 chain maps between 2-term complexes over F_2, by enumeration."""
    degs = sorted(set(a.dims) & set(b.dims))
    shapes = [(b.dim(n), a.dim(n)) for n in degs]
    count = 0
    sizes = [r * c for r, c in shapes]
    for bits in itertools.product([0, 1], repeat=sum(sizes)):
        comps, pos = {}, 0
        for n, (r, c) in zip(degs, shapes):
            chunk = bits[pos:pos + r * c]
            pos += r * c
            comps[n] = Matrix.from_dense(F2, [list(chunk[i * c:(i + 1) * c]) for i in range(r)], c)
        f = ChainMap(a, b, 0, comps)
        ok = all((b.diff(n) @ f.comp(n) - f.comp(n + 1) @ a.diff(n)).is_zero() for n in range(-3, 3))
        count += ok
    return count


@pytest.mark.parametrize("seed", range(12))
def test_closed_degree0_elements_are_chain_maps(seed):
    rng = random.Random(seed)
    a = random_complex(F2, rng, -1, 0, 2)
    b = random_complex(F2, rng, -1, 0, 2)
    H = hom_complex(a, b)
    n_closed = 2 ** (H.dim(0) - (0 if not H.dim(1) else rank(H.diff(0))))
    assert n_closed == _brute_chain_maps(a, b)


@settings(max_examples=50, deadline=None)
@given(complexes(maxdim=2), complexes(maxdim=2))
def test_hom_complex_is_complex(a, b):
    H = hom_complex(a, b)
    assert validate_complex(H)[0]
    for p in H.degrees():
        e = [0] * H.dim(p)
        for i in range(H.dim(p)):
            e[i] = 1
            f = H.decode(p, e)
            assert H.encode(f) == e
            got = H.encode(differential(f)) if H.dim(p + 1) else []
            want = H.diff(p).column(i) if H.dim(p + 1) else []
            assert got == want
            e[i] = 0


# ---------------------------------------------------------------- cohomology and homotopies

def test_cohomology_examples():
    assert all(v == 0 for v in all_h(Complex.zero(Q)).values())
    assert cohomology_dim(two_term(Q), -1) == cohomology_dim(two_term(Q), 0) == 0
    E = fixture("F2", Q).hom_complex("*", "*")
    assert cohomology(E, 0).dim == 1 and cohomology(E, -1).dim == 1
    with pytest.raises(ValueError):
        one = Matrix.identity(Q, 1)
        cohomology(Complex(Q, {0: 1, 1: 1, 2: 1}, {0: one, 1: one}), 1)


@settings(max_examples=50, deadline=None)
@given(complexes(maxdim=4))
def test_cohomology_formula(c):
    for n in range(-3, 3):
        h = cohomology(c, n)
        dk = c.dim(n) - (rank(c.diff(n)) if c.dim(n) and c.dim(n + 1) else 0)
        im = rank(c.diff(n - 1)) if c.dim(n) and c.dim(n - 1) else 0
        assert h.dim == dk - im == cohomology_dim(c, n)
        for z in h.representatives:
            assert c.diff(n) @ Matrix.from_columns(Q, c.dim(n), [z]) == Matrix.zeros(Q, c.dim(n + 1), 1) \
                or not c.dim(n + 1)


def test_null_homotopy_examples():
    a = two_term(Q)
    assert null_homotopy_witness(ChainMap.zero(a, a)).is_zero()
    h = null_homotopy_witness(ChainMap.identity(a))
    assert h is not NotNullHomotopic and differential(h) == ChainMap.identity(a)
    assert null_homotopy_witness(ChainMap.identity(k_at(Q, 0))) is NotNullHomotopic


@settings(max_examples=40, deadline=None)
@given(complexes(maxdim=2), st.integers(0, 10 ** 6))
def test_null_homotopy_iff_zero_in_cohomology(a, seed):
    f = _random_closed(a, a, random.Random(seed))
    h = null_homotopy_witness(f)
    H = hom_complex(a, a)
    zero_class = True
    if H.dim(0):
        zero_class = not any(CohomologyBasis(H, 0).coords(H.encode(f)))
    assert (h is not NotNullHomotopic) == zero_class
    if h is not NotNullHomotopic:
        assert differential(h) == f


def test_direct_sum():
    a, b = two_term(Q), k_at(Q, 0)
    s = direct_sum(a, b)
    assert s.dims == {-1: 1, 0: 2} and cohomology_dim(s, 0) == 1
