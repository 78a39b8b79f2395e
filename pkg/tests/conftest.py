import random

import pytest
from hypothesis import strategies as st

from dgkit.exact_field import FieldSpec, Matrix, kernel_basis
from dgkit.fixtures import fixture
from dgkit.graded_complex import Complex

Q = FieldSpec.rational()


def random_complex(F, rng, lo=-2, hi=1, maxdim=3):
    """A random bounded complex: each d^{n} has rows drawn from the left kernel of d^{n-1}."""
    dims = {n: rng.randint(0, maxdim) for n in range(lo, hi + 1)}
    d = {}
    prev = None
    for n in range(lo, hi):
        r, c = dims[n + 1], dims[n]
        if not r or not c:
            prev = None
            continue
        if prev is None:
            allowed = [[1 if i == j else 0 for i in range(c)] for j in range(c)]
        else:
            allowed = kernel_basis(prev.transpose())
        rows = []
        for _ in range(r):
            row = [0] * c
            for v in allowed:
                s = F.random_element(rng)
                row = [F.norm(x + s * y) for x, y in zip(row, v)]
            rows.append(row)
        m = Matrix.from_dense(F, rows, c)
        d[n] = m
        prev = m
    return Complex(F, dims, d)


@st.composite
def complexes(draw, F=Q, lo=-2, hi=1, maxdim=3):
    seed = draw(st.integers(0, 10 ** 9))
    return random_complex(F, random.Random(seed), lo, hi, maxdim)


@pytest.fixture(params=["F1", "F2", "F4"])
def main_fixture(request):
    return request.param, fixture(request.param, Q)
