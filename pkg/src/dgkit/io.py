"""Reading and writing .dgc, .dgm, .twc and morphism files.

All files are JSON with a leading ``"format": 1``.  Coefficients are
strings: ``"a/b"`` over Q, an integer mod p over F_p.  Module and twisted
complex files name their base category with ``"base"``: either a shipped
fixture name or a path to a .dgc file, relative to the file itself.
"""
from __future__ import annotations

import json
import os

from .dg_category import DgCategory
from .dg_module import DgModule
from .exact_field import FieldSpec, Matrix
from .fixtures import SPECS, fixture, with_field
from .graded_complex import ChainMap, Complex
from .twisted import morphism_from_dict, morphism_to_dict, twisted_from_dict, twisted_to_dict


class FormatError(ValueError):
    pass


def dumps(data: dict) -> str:
    """JSON with one key per line for the outer two levels and compact values below."""
    return _dump(data, 0) + "\n"


def _dump(x, depth):
    if isinstance(x, dict) and x and depth < 3:
        pad = " " * (depth + 1)
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, depth + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * depth + "}"
    return json.dumps(x, separators=(", ", ": "))


def read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise FormatError(f"{path}: {e}") from e
    if not isinstance(data, dict):
        raise FormatError(f"{path}: expected a JSON object")
    if data.get("format") != 1:
        raise FormatError(f"{path}: missing or unsupported \"format\" (want 1)")
    return data


def write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------- categories

def category_from_data(data: dict, field: FieldSpec | None = None) -> DgCategory:
    try:
        return DgCategory.from_dict(with_field(data, field) if field else data)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad dg-category: {e}") from e


def load_category(ref: str, field: FieldSpec | None = None, relative_to: str | None = None) -> DgCategory:
    """A fixture name or a .dgc path."""
    if ref in SPECS and not os.path.exists(ref):
        from .exact_field import default_field
        return fixture(ref, field or default_field())
    path = ref
    if relative_to and not os.path.isabs(path):
        cand = os.path.join(os.path.dirname(relative_to), path)
        if os.path.exists(cand):
            path = cand
    return category_from_data(read_json(path), field)


def category_to_text(q: DgCategory) -> str:
    return dumps(q.to_dict())


# ---------------------------------------------------------------- matrices

def _mat_out(F, m: Matrix) -> list:
    return [[F.fmt(x) for x in row] for row in m.to_dense()]


def _mat_in(F, rows, nr, nc) -> Matrix:
    if len(rows) != nr or any(len(r) != nc for r in rows):
        raise FormatError(f"matrix shape differs from {nr}x{nc}")
    return Matrix.from_dense(F, [[F(x) for x in r] for r in rows])


# ---------------------------------------------------------------- modules

def module_to_dict(M: DgModule, base_ref=None) -> dict:
    F = M.field
    out = {"format": 1}
    if base_ref is not None:
        out["base"] = base_ref
    values = {}
    for A in M.base.objects:
        c = M.values[A]
        degs = sorted(c.degrees())
        values[A] = {
            "dims": {str(n): c.dim(n) for n in degs},
            "d": {str(n): _mat_out(F, c.diff(n)) for n in degs if c.dim(n + 1) and not c.diff(n).is_zero()},
        }
    out["values"] = values
    action = {}
    for g in sorted(M.action):
        cm = M.action[g]
        comps = {str(n): _mat_out(F, m) for n, m in sorted(cm.components.items()) if not m.is_zero()}
        if comps:
            action[g] = comps
    out["action"] = action
    return out


def module_from_dict(q: DgCategory, data: dict) -> DgModule:
    F = q.field
    try:
        values = {}
        for A in q.objects:
            v = data.get("values", {}).get(A, {})
            dims = {int(n): int(k) for n, k in v.get("dims", {}).items() if int(k)}
            d = {}
            for n, rows in v.get("d", {}).items():
                n = int(n)
                d[n] = _mat_in(F, rows, dims.get(n + 1, 0), dims.get(n, 0))
            values[A] = Complex(F, dims, d)
        unknown = set(data.get("values", {})) - set(q.objects)
        if unknown:
            raise FormatError(f"unknown objects {sorted(unknown)}")
        action = {}
        for g, be in q.elts.items():
            src, tgt, e = be.target, be.source, be.deg
            comps = {}
            for n, rows in data.get("action", {}).get(g, {}).items():
                n = int(n)
                comps[n] = _mat_in(F, rows, values[tgt].dim(n + e), values[src].dim(n))
            action[g] = ChainMap(values[src], values[tgt], e, comps)
        bad = set(data.get("action", {})) - set(q.elts)
        if bad:
            raise FormatError(f"action given for unknown hom basis elements {sorted(bad)}")
        return DgModule(q, values, action)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, FormatError):
            raise
        raise FormatError(f"bad module: {e}") from e


# ---------------------------------------------------------------- twisted complexes and maps

def twisted_from_data(q: DgCategory, data: dict):
    try:
        return twisted_from_dict(q, data)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad twisted complex: {e}") from e


def _base_of(path, data, base, field):
    if base is not None:
        return base
    ref = data.get("base")
    if ref is None:
        raise FormatError(f"{path}: no \"base\" given; pass --base")
    return load_category(ref, field, path)


def load_module(path: str, base: DgCategory | None = None, field=None):
    data = read_json(path)
    q = _base_of(path, data, base, field)
    return q, module_from_dict(q, data)


def load_twisted(path: str, base: DgCategory | None = None, field=None):
    data = read_json(path)
    q = _base_of(path, data, base, field)
    return q, twisted_from_data(q, data)


def load_morphism(path: str, source, field=None):
    """Map file: degree, components and the target (inline dict or path); target defaults to the source."""
    data = read_json(path)
    q = source.base
    tgt = data.get("target")
    if tgt is None:
        Y = source
    elif isinstance(tgt, dict):
        Y = twisted_from_data(q, tgt)
    else:
        tp = tgt if os.path.isabs(tgt) else os.path.join(os.path.dirname(path), tgt)
        Y = twisted_from_data(q, read_json(tp))
    try:
        return morphism_from_dict(source, Y, data)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad morphism: {e}") from e


def morphism_file_dict(f, inline_target=True) -> dict:
    out = morphism_to_dict(f)
    if inline_target and f.target != f.source:
        out["target"] = twisted_to_dict(f.target)
    return out
