"""The ten acceptance criteria, each with its runtime budget.

Every criterion builds a Report; the test prints one PASS/FAIL line and
asserts both the report and the time limit.  Criterion 10 reruns the
other nine and compares the rendered reports byte for byte.
"""
import os
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from dgkit.dg_category import check_nonpositive_cohomology, validate_dg_category
from dgkit.dg_category import DgCategory
from dgkit.dg_module import check_hlc, validate_module
from dgkit.exact_field import FieldSpec, default_field
from dgkit.fixtures import MAIN_FIXTURES, MUTATIONS, fixture, mutated
from dgkit.graded_complex import validate_complex
from dgkit.holim import split_cone_compare, verify_truncation_colimit, verify_truncation_hocolim, \
    verify_truncation_stabilization
from dgkit.report import Report
from dgkit.resolution import (reconstruct, render_trace, resolve, verify_comparison, verify_quasi_ff, window_dims)
from dgkit.sampling import (random_closed_map, random_module, random_non_one_sided, random_pair, random_split_data,
                            random_twisted)
from dgkit.tstructure import simple_module
from dgkit.twisted import (TwistedComplex, TwMorphism, certify_reduction, is_closed, make_one_sided, tot_cone_comparison,
                           totalize, tw_cone, tw_differential, tw_shift, validate_twisted)

GOLDEN = Path(__file__).parent / "golden" / "F2_simple_W6.trace"
SEED = 20240601


def _field():
    return default_field()


def _rng(tag, k):
    return random.Random(f"{SEED}/{tag}/{k}")


def _windows(name):
    return 6 if name == "F2" else 4


# ---------------------------------------------------------------- criteria as report builders

def c1_axioms():
    rep = Report("1 axioms and mutations")
    for F in (_field(), FieldSpec.rational()):
        for name in MAIN_FIXTURES:
            q = fixture(name, F)
            rep.add(f"{name}/{F} axioms", validate_dg_category(q).ok)
            rep.add(f"{name}/{F} nonpositive", check_nonpositive_cohomology(q) is None)
            rep.add(f"{name}/{F} hlc", check_hlc(q).ok)
    for mname, base, _, expect in MUTATIONS:
        q = DgCategory.from_dict(mutated(mname, _field()))
        if expect == "nonpositive cohomology":
            caught = check_nonpositive_cohomology(q) is not None and not check_hlc(q).ok
        else:
            r = validate_dg_category(q)
            caught = any(c.name == expect for c in r.failures)
        rep.add(f"mutation {mname} caught by {expect}", caught)
    return rep


def c2_closure():
    rep = Report("2 MC, cone and shift closure")
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        bad = []
        for k in range(200):
            rng = _rng(f"c2/{name}", k)
            X, Y = random_pair(q, rng)
            f = random_closed_map(X, Y, rng)
            C = tw_cone(f).complex
            S = tw_shift(X, rng.randint(-3, 3))
            outs = [X, C, S]
            if not all(validate_twisted(Z).ok for Z in outs):
                bad.append(k)
                continue
            # (d + q)^2 = 0 on every value of every totalization, plus the module axioms
            for Z in outs:
                T = totalize(Z)
                if not all(validate_complex(T.values[A])[0] for A in q.objects) or not validate_module(T).ok:
                    bad.append(k)
                    break
            if max(len(Z.indices()) for Z in (X, Y)) > 5 or any(
                    len(v) > 2 for Z in (X, Y) for v in Z.entries.values()):
                bad.append(k)
        rep.add(f"{name}: 200 samples", not bad, f"bad samples {bad[:5]}" if bad else "")
    return rep


def c3_tot_cone():
    rep = Report("3 Tot(cone f) = cone(Tot f)")
    bad, count = [], 0
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        for k in range(100 // len(MAIN_FIXTURES) + 1):
            rng = _rng(f"c3/{name}", k)
            X, Y = random_pair(q, rng)
            f = random_closed_map(X, Y, rng)
            _, r = tot_cone_comparison(f)
            count += 1
            if not r.ok:
                bad.append((name, k))
    rep.add(f"{count} random closed one-sided maps", not bad and count >= 100, str(bad[:5]) if bad else "")
    return rep


def c4_truncation():
    rep = Report("4 truncation stabilization")
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        bad = [k for k in range(100) if not verify_truncation_stabilization(random_twisted(q, _rng(f"c4/{name}", k))).ok]
        rep.add(f"{name}: 100 samples, exact ranks", not bad, f"bad {bad[:5]}" if bad else "")
    return rep


def _golden_f4(q):
    X = TwistedComplex.single(q, ["*"], 0)
    Y = TwistedComplex.single(q, ["*"], -1)
    f = TwMorphism(X, Y, 0, {(0, -1): {(0, 0): {"u": q.field.one}}})
    return f


def c5_reduction():
    rep = Report("5 one-sided reduction on F4")
    q = fixture("F4", _field())
    bad = []
    for k in range(100):
        X, Y, f = random_non_one_sided(q, _rng("c5", k))
        red = make_one_sided(f)
        ok = (red.g.one_sided and f - tw_differential(red.alpha) == red.g and is_closed(red.g)
              and certify_reduction(f, red).ok and not f.one_sided)
        if not ok:
            bad.append(k)
    rep.add("100 random closed non-one-sided maps", not bad, f"bad {bad[:5]}" if bad else "")
    f = _golden_f4(q)
    red = make_one_sided(f)
    F = q.field
    rep.add("golden: f_0^-1 = u is not one-sided", not f.one_sided and is_closed(f))
    rep.add("golden: alpha_0^-1 = -w", red.alpha.components == {(0, -1): {(0, 0): {"w": F.norm(-1)}}})
    rep.add("golden: g = 0", red.g.is_zero())
    rep.add("golden: certificate", certify_reduction(f, red).ok)
    return rep


def c6_quasi_ff():
    rep = Report("6 quasi fully faithful")
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        pairs = [random_pair(q, _rng(f"c6/{name}", k)) for k in range(50)]
        r = verify_quasi_ff(q, pairs)
        rep.add(f"{name}: 50 pairs, zero mismatches", r.ok, "; ".join(c.line() for c in r.failures[:3]))
    return rep


def c7_resolution():
    rep = Report("7 resolution")
    q = fixture("F2", FieldSpec.rational())
    tr = resolve(simple_module(q, "*"), 6)
    rep.add("F2 simple: golden trace", render_trace(tr) == GOLDEN.read_text())
    rep.add("F2 simple: every step verdict", tr.ok)
    X = tr.X
    want = {0: ("*",), -2: ("*",), -4: ("*",), -6: ("*",)}
    eps = all(X.q.get((i - 2, i)) == {(0, 0): {"e": 1}} for i in (0, -2, -4))
    rep.add("F2 simple: periodic e-complex", X.entries == want and eps and set(X.q) == {(-2, 0), (-4, -2), (-6, -4)})
    for name in MAIN_FIXTURES:
        qn = fixture(name, _field())
        bad = []
        for k in range(10):
            M, _ = random_module(qn, _rng(f"c7/{name}", k))
            if not resolve(M, _windows(name)).ok:
                bad.append(k)
        rep.add(f"{name}: 10 random modules, all verdicts", not bad, f"bad {bad}" if bad else "")
    return rep


def c8_reconstruction():
    rep = Report("8 reconstruction and comparison")
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        W = _windows(name)
        bad = []
        for k in range(25):
            M, X = random_module(q, _rng(f"c8/{name}", k))
            rec = reconstruct(M, W)
            if rec.trace.top is None:
                ok = rec.ok
            else:
                lo, hi = rec.trace.lo + 1, M.bounds()[1]
                ok = rec.ok and window_dims(M, lo, hi) == window_dims(totalize(rec.X), lo, hi)
            if not ok:
                bad.append(k)
        rep.add(f"{name}: 25 round trips", not bad, f"bad {bad}" if bad else "")
        samples = [random_module(q, _rng(f"c8cmp/{name}", k))[0] for k in range(10)]
        r = verify_comparison(q, samples, W)
        rep.add(f"{name}: verify_comparison, 10 samples", r.ok, "; ".join(c.line() for c in r.failures[:3]))
    return rep


def c9_hocolim():
    rep = Report("9 homotopy colimits")
    for name in MAIN_FIXTURES:
        q = fixture(name, _field())
        bad = []
        for k in range(50):
            X = random_twisted(q, _rng(f"c9/{name}", k))
            if not (verify_truncation_colimit(X).ok and verify_truncation_hocolim(X).ok):
                bad.append(k)
        rep.add(f"{name}: 50 truncation colimits and telescopes", not bad, f"bad {bad[:5]}" if bad else "")
        bad = [k for k in range(50)
               if not split_cone_compare(*random_split_data(q, _rng(f"c9split/{name}", k))).report.ok]
        rep.add(f"{name}: 50 split cones", not bad, f"bad {bad[:5]}" if bad else "")
    return rep


CRITERIA = [
    (1, "axioms", c1_axioms, 5),
    (2, "MC/cone/shift closure", c2_closure, 60),
    (3, "totalization functoriality", c3_tot_cone, 60),
    (4, "truncation stabilization", c4_truncation, 120),
    (5, "one-sided reduction", c5_reduction, 60),
    (6, "quasi fully faithful", c6_quasi_ff, 300),
    (7, "resolution", c7_resolution, 300),
    (8, "reconstruction", c8_reconstruction, 600),
    (9, "homotopy colimits", c9_hocolim, 120),
]

_RENDERED = {}


def _line(num, title, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {num} ({title}): {detail}"


@pytest.mark.parametrize("num,title,fn,limit", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(num, title, fn, limit):
    t = time.perf_counter()
    rep = fn()
    elapsed = time.perf_counter() - t
    _RENDERED[num] = rep.render(True)
    ok = rep.ok and elapsed < limit
    ff = rep.first_failure()
    detail = f"{sum(c.ok for c in rep.checks)}/{len(rep.checks)} checks, {elapsed:.1f}s (limit {limit}s)"
    if ff:
        detail += f"; first failure: {ff.line()}"
    print("\n" + _line(num, title, ok, detail))
    assert rep.ok, rep.render()
    assert elapsed < limit


def _cli(*args):
    env = dict(os.environ)
    return subprocess.run([sys.executable, "-m", "dgkit.cli", *args], capture_output=True, text=True, env=env)


def test_criterion_10_determinism(tmp_path):
    t = time.perf_counter()
    problems = []
    for num, title, fn, _ in CRITERIA:
        first = _RENDERED.get(num) or fn().render(True)
        second = fn().render(True)
        if first != second:
            problems.append(f"criterion {num} report differs")
    # the CLI: reports and trace files
    q = fixture("F2", FieldSpec.rational())
    from dgkit.io import dumps, module_to_dict
    dgm = tmp_path / "S.dgm"
    dgm.write_text(dumps(module_to_dict(simple_module(q, "*"), "F2")))
    outs = []
    for run in range(2):
        tr = tmp_path / f"t{run}.trace"
        r1 = _cli("resolve", "F2", str(dgm), "--window", "6", "--trace", str(tr))
        r2 = _cli("verify", "comparison", "--samples", "3", "--seed", "7")
        r3 = _cli("verify", "hocolim", "--samples", "3", "--seed", "7")
        outs.append((r1.stdout.replace(str(tr), "T"), tr.read_bytes(), r2.stdout, r3.stdout,
                     (r1.returncode, r2.returncode, r3.returncode)))
    if outs[0] != outs[1]:
        problems.append("CLI output differs between runs")
    if outs[0][4] != (0, 0, 0):
        problems.append(f"CLI exit codes {outs[0][4]}")
    ok = not problems
    print("\n" + _line(10, "determinism", ok, f"{'; '.join(problems) or 'byte-identical'}, "
                                            f"{time.perf_counter() - t:.1f}s"))
    assert ok, problems
