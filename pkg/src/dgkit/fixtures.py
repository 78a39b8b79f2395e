"""Shipped example dg-categories and single-point corruptions of them.

F1   the point: one object, hom = k.
F2   exterior algebra on e of degree -1, d = 0.
F4   basis {1, w, u} with |w| = 0, |u| = 1, dw = u, all other products zero.
F4-broken   F4 with dw = 0, so H^1 != 0.
F2p  F2 plus an acyclic pair x (deg -2), y (deg -1), dx = y.
A2   the path category a -> b in degree 0.
T3   k[a]/a^3 in degree 0.
"""
from __future__ import annotations

import copy
import json
from importlib import resources

from .dg_category import DgCategory, DgFunctor
from .exact_field import FieldSpec


def _one_object(basis, d=None, comp=None, obj="*"):
    """Dict presentation of a single-object category whose unit is named 1."""
    comp = dict(comp or {})
    for n, _ in basis:
        comp.setdefault(f"{n}*1", [[n, 1]])
        comp.setdefault(f"1*{n}", [[n, 1]])
    return {
        "format": 1,
        "field": {"kind": "rational"},
        "objects": [obj],
        "homs": {f"{obj}->{obj}": {
            "basis": [{"name": n, "deg": k} for n, k in basis],
            "d": {n: v for n, v in (d or {}).items()},
        }},
        "comp": comp,
        "ids": {obj: [["1", 1]]},
    }


def _specs():
    out = {}
    out["F1"] = _one_object([("1", 0)])
    out["F2"] = _one_object([("1", 0), ("e", -1)])
    out["F4"] = _one_object([("1", 0), ("w", 0), ("u", 1)], d={"w": [["u", 1]]})
    out["F4-broken"] = _one_object([("1", 0), ("w", 0), ("u", 1)])
    out["F2p"] = _one_object([("1", 0), ("e", -1), ("x", -2), ("y", -1)], d={"x": [["y", 1]]})
    out["T3"] = _one_object([("1", 0), ("a", 0), ("b", 0)], comp={"a*a": [["b", 1]]})
    out["A2"] = {
        "format": 1,
        "field": {"kind": "rational"},
        "objects": ["a", "b"],
        "homs": {
            "a->a": {"basis": [{"name": "1a", "deg": 0}], "d": {}},
            "b->b": {"basis": [{"name": "1b", "deg": 0}], "d": {}},
            "a->b": {"basis": [{"name": "f", "deg": 0}], "d": {}},
        },
        "comp": {"1a*1a": [["1a", 1]], "1b*1b": [["1b", 1]],
                 "f*1a": [["f", 1]], "1b*f": [["f", 1]]},
        "ids": {"a": [["1a", 1]], "b": [["1b", 1]]},
    }
    return out


SPECS = _specs()
FIXTURE_NAMES = sorted(SPECS)
MAIN_FIXTURES = ("F1", "F2", "F4")


def with_field(spec: dict, field: FieldSpec) -> dict:
    s = copy.deepcopy(spec)
    s["field"] = {"kind": "prime", "p": field.p} if field.is_prime else {"kind": "rational"}
    return s


def fixture_dict(name: str, field: FieldSpec | None = None) -> dict:
    if name not in SPECS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    s = SPECS[name]
    return with_field(s, field) if field is not None else copy.deepcopy(s)


_cache = {}


def fixture(name: str, field: FieldSpec | None = None) -> DgCategory:
    key = (name, field)
    if key not in _cache:
        _cache[key] = DgCategory.from_dict(fixture_dict(name, field))
    return _cache[key]


def shipped_file(name: str) -> str:
    """Text of the packaged .dgc file for a fixture."""
    return resources.files("dgkit.data").joinpath(f"{name}.dgc").read_text()


# ---------------------------------------------------------------- corruptions

def _set_comp(key, val):
    def f(s):
        s["comp"][key] = val
        return s
    return f


def _drop_comp(key):
    def f(s):
        del s["comp"][key]
        return s
    return f


def _set_d(name, val):
    def f(s):
        for h in s["homs"].values():
            if any(b["name"] == name for b in h["basis"]):
                if val:
                    h["d"][name] = val
                else:
                    h["d"].pop(name, None)
        return s
    return f


def _set_id(obj, val):
    def f(s):
        s["ids"][obj] = val
        return s
    return f


# (name, base fixture, mutation, which check is expected to catch it)
MUTATIONS = [
    ("unit-doubled", "F2", _set_id("*", [["1", 2]]), "unit laws"),
    ("e-squared-unit", "F2", _set_comp("e*e", [["1", 1]]), "degree additivity"),
    ("d-e-is-e", "F2", _set_d("e", [["e", 1]]), "differential degree"),
    ("left-unit-dropped", "F2", _drop_comp("1*e"), "unit laws"),
    ("right-unit-scaled", "F2", _set_comp("e*1", [["e", 2]]), "unit laws"),
    ("w-idempotent", "F4", _set_comp("w*w", [["w", 1]]), "Leibniz rule"),
    ("u-w-is-u", "F4", _set_comp("u*w", [["u", 1]]), "associativity"),
    ("dw-zero", "F4", _set_d("w", None), "nonpositive cohomology"),
    ("a-b-is-a", "T3", _set_comp("a*b", [["a", 1]]), "associativity"),
    ("d-unit-nonzero", "F4", _set_d("1", [["u", 1]]), "identity closed of degree 0"),
]


def mutated(name: str, field: FieldSpec | None = None) -> dict:
    for n, base, fn, _ in MUTATIONS:
        if n == name:
            return fn(fixture_dict(base, field))
    raise KeyError(name)


def inclusion_F2_F2p(field: FieldSpec | None = None) -> DgFunctor:
    """F2 -> F2p, the inclusion missing the acyclic pair (a quasi-equivalence)."""
    S, T = fixture("F2", field), fixture("F2p", field)
    return DgFunctor(S, T, {"*": "*"}, {"1": {"1": 1}, "e": {"e": 1}})


def collapse_F2_F1(field: FieldSpec | None = None) -> DgFunctor:
    """F2 -> F1 sending e to zero."""
    S, T = fixture("F2", field), fixture("F1", field)
    return DgFunctor(S, T, {"*": "*"}, {"1": {"1": 1}, "e": {}})


def dump_dgc(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=False) + "\n"
