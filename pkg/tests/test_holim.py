import random

import pytest
from hypothesis import given, settings, strategies as st

from dgkit.dg_module import ModuleMap, block_module_map, direct_sum_modules, map_verdict, yoneda
from dgkit.exact_field import FieldSpec
from dgkit.fixtures import fixture
from dgkit.holim import (ModuleSequence, check_hocolim, hocolim_modules, split_cone_compare, truncation_sequence,
                         verify_hocolim_cohomology, verify_truncation_colimit, verify_truncation_hocolim,
                         verify_truncation_stabilization)
from dgkit.resolution import resolve, verify_resolution_hocolim
from dgkit.sampling import random_module, random_split_data, random_twisted
from dgkit.tstructure import simple_module
from dgkit.twisted import TwistedComplex, totalize

from test_twisted import eps_complex

Q = FieldSpec.rational()


def test_constant_sequence_collapses():
    q = fixture("F2", Q)
    M, _ = random_module(q, random.Random(1))
    seq = ModuleSequence([M] * 4, [ModuleMap.identity(M)] * 3, stabilized_from=0)
    assert seq.check().ok
    h = hocolim_modules(seq)
    assert check_hocolim(h, seq).ok
    lo, hi = M.bounds()
    assert h.module.total_betti(lo - 1, hi + 1) == M.total_betti(lo - 1, hi + 1)
    assert verify_hocolim_cohomology(seq, (lo, hi)).ok


def test_single_term():
    M = yoneda(fixture("F2", Q), "*")
    seq = ModuleSequence([M], [])
    h = hocolim_modules(seq)
    assert h.module.total_betti(-3, 2) == M.total_betti(-3, 2)
    assert all(map_verdict(h.j[0], i) == "iso" for i in range(-3, 2))


def test_hypothesis_violation_reported():
    M = yoneda(fixture("F1", Q), "*")
    seq = ModuleSequence([M, M], [ModuleMap.zero(M, M)])
    rep = verify_hocolim_cohomology(seq, (-1, 1), thresholds=[-1])
    assert not rep.ok and "hypothesis violated" in rep.notes


# ---------------------------------------------------------------- split cones

def _canonical_split(A, C):
    B = direct_sum_modules(A, C)
    f = block_module_map(A, [A], B, [A, C], 0, {(0, 0): ModuleMap.identity(A)})
    g = block_module_map(B, [A, C], C, [C], 0, {(0, 1): ModuleMap.identity(C)})
    sigma = block_module_map(C, [C], B, [A, C], 0, {(1, 0): ModuleMap.identity(C)})
    rho = block_module_map(B, [A, C], A, [A], 0, {(0, 0): ModuleMap.identity(A)})
    return f, g, sigma, rho


def test_split_canonical():
    q = fixture("F2", Q)
    A, _ = random_module(q, random.Random(4))
    C, _ = random_module(q, random.Random(5))
    r = split_cone_compare(*_canonical_split(A, C))
    assert r.report.ok
    assert r.phi @ r.psi == ModuleMap.identity(C)


def test_split_rejects_non_split_data():
    q = fixture("F1", Q)
    A = yoneda(q, "*")
    f, g, sigma, rho = _canonical_split(A, A)
    with pytest.raises(ValueError, match="rho f = 1"):
        split_cone_compare(f, g, sigma, rho.scale(2))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["F1", "F2", "F4"]), st.integers(0, 10 ** 6))
def test_split_random(name, seed):
    assert split_cone_compare(*random_split_data(fixture(name, Q), random.Random(seed))).report.ok


# ---------------------------------------------------------------- truncation colimits

def test_truncation_colimit_examples():
    q = fixture("F2", Q)
    single = TwistedComplex.single(q, ["*"], 0)
    for check in (verify_truncation_colimit, verify_truncation_hocolim, verify_truncation_stabilization):
        assert check(single).ok
        assert check(eps_complex(q, -6)).ok


@pytest.mark.parametrize("seed", range(20))
def test_truncation_colimit_random_f4(seed):
    X = random_twisted(fixture("F4", Q), random.Random(seed), width=4)
    assert verify_truncation_colimit(X).ok
    assert verify_truncation_hocolim(X).ok


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["F1", "F2", "F4", "A2"]), st.integers(0, 10 ** 6))
def test_truncation_cohomology_constant(name, seed):
    X = random_twisted(fixture(name, Q), random.Random(seed))
    ts = truncation_sequence(X)
    T = totalize(X)
    lo, hi = X.window()
    # H^i of Tot(sigma_{>= n} X) agrees with H^i(Tot X) for i > n
    for n in range(lo, hi + 1):
        S = totalize(TwistedComplex(X.base, {i: v for i, v in X.entries.items() if i >= n},
                                    {k: m for k, m in X.q.items() if k[0] >= n}))
        for i in range(n + 1, hi + 1):
            assert S.total_betti(i, i) == T.total_betti(i, i)
    assert verify_truncation_stabilization(X).ok
    assert len(ts.seq.terms) == len(ts.thresholds)


def test_resolution_sequence_hocolim():
    q = fixture("F2", Q)
    tr = resolve(simple_module(q, "*"), 4)
    assert verify_resolution_hocolim(tr).ok
