import io
import json
import random
from importlib import resources

import pytest

from dgkit.cli import EXIT_FAIL, EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, InputError, RunConfig, parse_range, run_command
from dgkit.dg_category import DgCategory
from dgkit.exact_field import FieldSpec
from dgkit.fixtures import FIXTURE_NAMES, MUTATIONS, dump_dgc, fixture, mutated
from dgkit.io import (FormatError, dumps, load_category, load_module, load_twisted, module_from_dict, module_to_dict,
                      read_json)
from dgkit.sampling import random_module, random_twisted
from dgkit.tstructure import simple_module
from dgkit.twisted import TwistedComplex, TwMorphism, morphism_from_dict, morphism_to_dict, twisted_from_dict, \
    twisted_to_dict

Q = FieldSpec.rational()


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out)
    return code, out.getvalue()


def dgc(name):
    return str(resources.files("dgkit.data").joinpath(f"{name}.dgc"))


def write(path, data):
    path.write_text(dumps(data))
    return str(path)


def eps_twc(tmp_path, lo=-2):
    q = fixture("F2", Q)
    idx = list(range(0, lo - 1, -2))
    X = TwistedComplex(q, {i: ["*"] for i in idx}, {(i - 2, i): {(0, 0): {"e": 1}} for i in idx if i - 2 >= lo})
    return write(tmp_path / "eps.twc", twisted_to_dict(X, "F2"))


# ---------------------------------------------------------------- config

def test_run_config_and_ranges():
    assert parse_range("-4..1") == (-4, 1)
    for bad in ("3..1", "1-2", "a..b"):
        with pytest.raises(InputError):
            parse_range(bad)
    with pytest.raises(InputError):
        RunConfig(None, 2, 0, 0, "verify")
    with pytest.raises(InputError):
        RunConfig(None, -1, 0, 1, "verify")


# ---------------------------------------------------------------- spec examples

def test_validate_f2():
    code, out = run("validate", dgc("F2"))
    assert code == EXIT_OK and out.rstrip().endswith("checks")


def test_verify_truncation_on_empty_complex(tmp_path):
    p = write(tmp_path / "empty.twc", twisted_to_dict(TwistedComplex(fixture("F2", Q), {}), "F2"))
    code, _ = run("verify", "truncation", "--samples", "1", "--seed", "1", "--twc", p)
    assert code == EXIT_OK


def test_hlc_broken():
    code, out = run("hlc", dgc("F4-broken"))
    assert code == EXIT_HYPOTHESIS
    assert "H^1 hom(*,*) != 0" in out


# ---------------------------------------------------------------- commands

def test_mutations_exit_one(tmp_path):
    for name, _, _, expect in MUTATIONS:
        p = tmp_path / f"{name}.dgc"
        p.write_text(dump_dgc(mutated(name, Q)))
        code, out = run("validate", str(p))
        assert code == EXIT_FAIL, name
        assert f"FAIL {expect}" in out


def test_h0_and_hlc_ok():
    code, out = run("h0", dgc("F4"))
    assert code == EXIT_OK and "dim H0(*,*) = 1" in out
    assert run("hlc", dgc("A2"))[0] == EXIT_OK


def test_cohomology_of_eps_complex(tmp_path):
    p = eps_twc(tmp_path)
    code, out = run("cohomology", p, "--range", "-4..1")
    assert code == EXIT_OK
    assert out.splitlines() == ["H^-4 *:0", "H^-3 *:1", "H^-2 *:0", "H^-1 *:0", "H^0 *:1", "H^1 *:0"]


def test_tot_then_cohomology(tmp_path):
    p = eps_twc(tmp_path)
    m = tmp_path / "tot.dgm"
    assert run("tot", p, "-o", str(m))[0] == EXIT_OK
    code, out = run("cohomology", str(m), "--range", "-3..0")
    assert code == EXIT_OK and out.splitlines()[0] == "H^-3 *:1"


def test_cone_of_identity_is_acyclic(tmp_path):
    q = fixture("F2", Q)
    X = TwistedComplex.single(q, ["*"], 0)
    p = write(tmp_path / "a.twc", twisted_to_dict(X, "F2"))
    mp = write(tmp_path / "id.map", {"format": 1, **morphism_to_dict(TwMorphism.identity(X))})
    c = tmp_path / "c.twc"
    assert run("cone", p, mp, "-o", str(c))[0] == EXIT_OK
    code, out = run("cohomology", str(c), "--range", "-3..1")
    assert code == EXIT_OK and all(line.endswith(":0") for line in out.splitlines())


def test_cone_rejects_non_closed(tmp_path):
    q = fixture("F4", Q)
    X = TwistedComplex.single(q, ["*"], 0)
    p = write(tmp_path / "a.twc", twisted_to_dict(X, "F4"))
    mp = write(tmp_path / "w.map", {"format": 1, **morphism_to_dict(TwMorphism(X, X, 0, {(0, 0): {(0, 0): {"w": 1}}}))})
    assert run("cone", p, mp)[0] == EXIT_INPUT


def test_truncate(tmp_path):
    p = eps_twc(tmp_path, -4)
    o = tmp_path / "t.twc"
    assert run("truncate", p, "--at", "-2", "-o", str(o))[0] == EXIT_OK
    _, X = load_twisted(str(o))
    assert X.indices() == [-2, 0]


def test_reduce_onesided_golden(tmp_path):
    q = fixture("F4", Q)
    X = TwistedComplex.single(q, ["*"], 0)
    Y = TwistedComplex.single(q, ["*"], -1)
    p = write(tmp_path / "x.twc", twisted_to_dict(X, "F4"))
    f = TwMorphism(X, Y, 0, {(0, -1): {(0, 0): {"u": 1}}})
    mp = write(tmp_path / "f.map", {"format": 1, **morphism_to_dict(f), "target": twisted_to_dict(Y)})
    o = tmp_path / "r.json"
    code, out = run("--field", "Q", "reduce-onesided", p, mp, "-o", str(o))
    assert code == EXIT_OK
    data = read_json(str(o))
    assert morphism_from_dict(X, Y, data["alpha"]).components == {(0, -1): {(0, 0): {"w": -1}}}
    assert morphism_from_dict(X, Y, data["g"]).is_zero()


def test_resolve_and_reconstruct(tmp_path):
    q = fixture("F2", Q)
    m = write(tmp_path / "s.dgm", module_to_dict(simple_module(q, "*"), "F2"))
    tr = tmp_path / "s.trace"
    code, out = run("--field", "Q", "resolve", "F2", m, "--window", "6", "--trace", str(tr))
    assert code == EXIT_OK
    from pathlib import Path
    assert tr.read_text() == (Path(__file__).parent / "golden" / "F2_simple_W6.trace").read_text()
    o = tmp_path / "x.twc"
    code, _ = run("--field", "Q", "reconstruct", "F2", m, "--window", "6", "-o", str(o))
    assert code == EXIT_OK
    _, X = load_twisted(str(o), field=Q)
    assert X.indices() == [-6, -4, -2, 0]


def test_resolve_hypothesis_failure(tmp_path):
    q = fixture("F4-broken", Q)
    from dgkit.dg_module import yoneda
    m = write(tmp_path / "y.dgm", module_to_dict(yoneda(q, "*"), "F4-broken"))
    code, out = run("resolve", "F4-broken", m, "--window", "2")
    assert code == EXIT_HYPOTHESIS and "hypothesis failure" in out


@pytest.mark.parametrize("suite", ["quasi-ff", "truncation", "hocolim", "comparison", "heart", "derived-proj"])
def test_verify_suites(suite):
    code, out = run("verify", suite, "--samples", "2", "--seed", "3")
    assert code == EXIT_OK, out
    assert run("verify", suite, "--samples", "2", "--seed", "3")[1] == out


def test_verify_hlc_precheck():
    code, out = run("verify", "quasi-ff", "--fixture", "F4-broken", "--samples", "1")
    assert code == EXIT_HYPOTHESIS


def test_input_errors(tmp_path):
    assert run("validate", str(tmp_path / "missing.dgc"))[0] == EXIT_INPUT
    assert run("cohomology", dgc("F2"), "--range", "1..0")[0] == EXIT_INPUT
    bad = tmp_path / "bad.dgc"
    bad.write_text('{"objects": []}')
    assert run("validate", str(bad))[0] == EXIT_INPUT
    assert run("verify", "heart", "--samples", "0")[0] == EXIT_INPUT
    assert run("nonsense")[0] == EXIT_INPUT
    assert run("verify", "heart", "--fixture", "F9")[0] == EXIT_INPUT


def test_field_from_environment(monkeypatch):
    monkeypatch.setenv("DGKIT_FIELD", "F7")
    code, out = run("verify", "derived-proj", "--samples", "1")
    assert code == EXIT_OK
    from dgkit.exact_field import default_field
    assert default_field() == FieldSpec.prime(7)


# ---------------------------------------------------------------- round trips

@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_shipped_files_match_fixtures(name):
    assert load_category(dgc(name), Q) == fixture(name, Q)
    q = fixture(name, Q)
    assert DgCategory.from_dict(json.loads(dumps(q.to_dict()))) == q


@pytest.mark.parametrize("F", [Q, FieldSpec.prime(101)], ids=str)
def test_module_and_twisted_round_trip(F, tmp_path):
    for name in ("F1", "F2", "F4", "A2"):
        q = fixture(name, F)
        for k in range(5):
            M, X = random_module(q, random.Random(k))
            assert module_from_dict(q, json.loads(dumps(module_to_dict(M, name)))) == M
            assert twisted_from_dict(q, json.loads(dumps(twisted_to_dict(X, name)))) == X
            p = write(tmp_path / "m.dgm", module_to_dict(M, name))
            assert load_module(p, field=F)[1] == M
            Y = random_twisted(q, random.Random(k + 50))
            from dgkit.sampling import random_closed_map
            f = random_closed_map(X, Y, random.Random(k))
            assert morphism_from_dict(X, Y, morphism_to_dict(f)) == f


def test_format_key_required(tmp_path):
    p = tmp_path / "x.dgm"
    p.write_text('{"base": "F2", "values": {}}')
    with pytest.raises(FormatError):
        read_json(str(p))
