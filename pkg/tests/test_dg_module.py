import random

import pytest
from hypothesis import given, settings, strategies as st

from dgkit.dg_category import DgCategory, DgFunctor, h0_category
from dgkit.dg_module import (DgModule, H0Module, ModuleMap, check_hlc, direct_sum_modules, fp_presentation,
                             is_closed_map, is_natural, module_cohomology, module_cone, module_hom_complex,
                             representable_h0, restrict_along, shift_module, validate_module, yoneda, zero_module)
from dgkit.exact_field import FieldSpec, Matrix
from dgkit.fixtures import FIXTURE_NAMES, collapse_F2_F1, fixture, mutated
from dgkit.graded_complex import ChainMap, Complex, cohomology_dim
from dgkit.sampling import random_module

Q = FieldSpec.rational()
VALID = [n for n in FIXTURE_NAMES if n != "F4-broken"]


def dims(M):
    return {A: dict(c.dims) for A, c in M.values.items()}


# ---------------------------------------------------------------- yoneda

def test_yoneda_examples():
    assert dims(yoneda(fixture("F1", Q), "*")) == {"*": {0: 1}}
    q = fixture("F2", Q)
    Y = yoneda(q, "*")
    assert dims(Y) == {"*": {-1: 1, 0: 1}}
    # e acts 1 -> e and kills e
    assert Y.action["e"].comp(0).to_dense() == [[1]]
    assert Y.action["e"].comp(-1).is_zero()
    Y4 = yoneda(fixture("F4", Q), "*")
    c = Y4.values["*"]
    assert c.dims == {0: 2, 1: 1} and c.diff(0).to_dense() == [[0, 1]]
    with pytest.raises(ValueError):
        yoneda(q, "nope")


@pytest.mark.parametrize("name", VALID)
def test_yoneda_is_a_module(name):
    q = fixture(name, Q)
    for A in q.objects:
        assert validate_module(yoneda(q, A)).ok


def test_bad_action_rejected():
    q = fixture("F2", Q)
    c = Complex(Q, {0: 1, -1: 1})
    one = ChainMap.identity(c)
    M = DgModule(q, {"*": c}, {"1": one, "e": {0: Matrix.from_dense(Q, [[1]])}})
    assert validate_module(M).ok
    N = DgModule(q, {"*": c}, {"1": one.scale(2)})
    assert validate_module(N).first_failure().name == "unit acts as identity"


# ---------------------------------------------------------------- cohomology

def test_module_cohomology_examples():
    Y1 = yoneda(fixture("F1", Q), "*")
    assert module_cohomology(Y1, 0).dims == {"*": 1}
    assert module_cohomology(Y1, 1).dims == {"*": 0}
    Y2 = yoneda(fixture("F2", Q), "*")
    assert module_cohomology(Y2, 0).dims == {"*": 1}
    assert module_cohomology(Y2, -1).dims == {"*": 1}


def test_cone_of_zero_map_sums_cohomology():
    Y = yoneda(fixture("F2", Q), "*")
    C = module_cone(ModuleMap.zero(Y, Y)).module
    assert validate_module(C).ok
    for i in range(-3, 2):
        assert module_cohomology(C, i).dims["*"] == cohomology_dim(Y.values["*"], i + 1) + cohomology_dim(Y.values["*"], i)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["F1", "F2", "F4"]), st.integers(0, 10 ** 6))
def test_random_modules_valid_and_shift(name, seed):
    q = fixture(name, Q)
    M, _ = random_module(q, random.Random(seed))
    assert validate_module(M).ok
    S = shift_module(M, 1)
    assert validate_module(S).ok
    for i in range(-5, 2):
        assert S.total_betti(i, i)[i] == M.total_betti(i + 1, i + 1)[i + 1]


# ---------------------------------------------------------------- finite presentations and hlc

def test_fp_examples():
    for name in ("F1", "F2", "A2", "T3"):
        q = fixture(name, Q)
        H = h0_category(q)
        for A in q.objects:
            P = fp_presentation(representable_h0(H, A))
            assert P.ok and [g[0] for g in P.generators] == [A]
            assert P.relations == []
    H1 = h0_category(fixture("F1", Q))
    kk = H0Module(H1, {"*": 2}, {("*", "*", 0): Matrix.identity(Q, 2)})
    P = fp_presentation(kk)
    assert P.ok and len(P.generators) == 2 and P.relations == []


def test_fp_with_relations():
    # the simple module at b over A2 is H0(-, b) modulo the image of f from a
    q = fixture("A2", Q)
    H = h0_category(q)
    S = H0Module(H, {"a": 0, "b": 1}, {("b", "b", 0): Matrix.identity(Q, 1)})
    P = fp_presentation(S)
    assert P.ok and [g[0] for g in P.generators] == ["b"] and len(P.relations) == 1


def test_hlc_examples():
    for name in VALID:
        r = check_hlc(fixture(name, Q))
        assert r.ok, r.render()
    r = check_hlc(DgCategory.from_dict(mutated("dw-zero", Q)))
    assert [c.name for c in r.failures] == ["nonpositive"]


@pytest.mark.parametrize("name", VALID)
def test_hfp_consistent_with_cohomology(name):
    q = fixture(name, Q)
    for A in q.objects:
        Y = yoneda(q, A)
        for i in range(-3, 2):
            assert module_cohomology(Y, i).total_dim == sum(cohomology_dim(Y.values[B], i) for B in q.objects)


# ---------------------------------------------------------------- restriction

def test_restrict_examples():
    q = fixture("F2", Q)
    M, _ = random_module(q, random.Random(3))
    assert restrict_along(DgFunctor.identity(q), M) == M
    R = restrict_along(collapse_F2_F1(Q), yoneda(fixture("F1", Q), "*"))
    assert validate_module(R).ok
    assert dims(R) == {"*": {0: 1}} and R.action["e"].is_zero()


def test_restriction_of_acyclic_is_acyclic():
    q1 = fixture("F1", Q)
    c = Complex(Q, {-1: 1, 0: 1}, {-1: Matrix.from_dense(Q, [[1]])})
    M = DgModule(q1, {"*": c}, {"1": ChainMap.identity(c)})
    R = restrict_along(collapse_F2_F1(Q), M)
    assert all(v == 0 for v in R.total_betti(-3, 3).values())


# ---------------------------------------------------------------- hom complexes

def test_module_hom_examples():
    Y = yoneda(fixture("F1", Q), "*")
    assert module_hom_complex(Y, Y).dims == {0: 1}
    q1 = fixture("F1", Q)
    c = Complex(Q, {-1: 1, 0: 1}, {-1: Matrix.from_dense(Q, [[1]])})
    M = DgModule(q1, {"*": c}, {"1": ChainMap.identity(c)})
    assert cohomology_dim(module_hom_complex(M, Y), 0) == 0


@pytest.mark.parametrize("name", VALID)
def test_yoneda_lemma_oracle(name):
    q = fixture(name, Q)
    rng = random.Random(name)
    N, _ = random_module(q, rng)
    for A in q.objects:
        Hm = module_hom_complex(yoneda(q, A), N)
        assert Hm.dims == N.values[A].dims
        for p in range(-6, 3):
            assert cohomology_dim(Hm, p) == cohomology_dim(N.values[A], p)


def test_direct_sum_and_identity_natural():
    q = fixture("F2", Q)
    Y = yoneda(q, "*")
    S = direct_sum_modules(Y, Y)
    assert validate_module(S).ok
    idm = ModuleMap.identity(S)
    assert is_natural(idm) and is_closed_map(idm)
    assert validate_module(zero_module(q)).ok
