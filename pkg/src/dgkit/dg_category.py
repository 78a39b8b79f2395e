"""Finite presentations of dg-categories by named bases and structure constants.

A hom element is a dict ``{basis_name: coeff}`` with nonzero coefficients.
Basis names are global, so an element knows its source and target.
``comp[(g, f)]`` is ``g o f`` for ``f: A -> B`` and ``g: B -> C``; missing
pairs compose to zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .exact_field import FieldSpec, Matrix, NoSolution, Subspace, solve_particular
from .graded_complex import Complex, cohomology, cohomology_dim, validate_complex
from .report import Report


@dataclass(frozen=True)
class BasisElt:
    name: str
    deg: int
    source: str
    target: str


class DgCategory:
    def __init__(self, field: FieldSpec, objects, homs: dict, d: dict, comp: dict, ids: dict):
        """
        homs: {(A, B): [(name, deg), ...]} basis of hom(A, B)
        d:    {name: {name: coeff}}
        comp: {(g, f): {name: coeff}}
        ids:  {A: {name: coeff}}
        """
        self.field = field
        self.objects = list(objects)
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate object names")
        self.basis = {}
        self.elts: dict[str, BasisElt] = {}
        for A in self.objects:
            for B in self.objects:
                lst = [(str(n), int(k)) for n, k in homs.get((A, B), [])]
                self.basis[(A, B)] = [n for n, _ in lst]
                for n, k in lst:
                    if n in self.elts:
                        raise ValueError(f"basis name {n!r} used twice")
                    self.elts[n] = BasisElt(n, k, A, B)
        for key in homs:
            if key not in self.basis:
                raise ValueError(f"hom {key} mentions an unknown object")
        self.d = {}
        for n, v in d.items():
            self._unknown(n)
            self.d[n] = self._elem(v)
        self.comp = {}
        for (g, f), v in comp.items():
            self._unknown(g)
            self._unknown(f)
            self.comp[(g, f)] = self._elem(v)
        self.ids = {}
        for A in self.objects:
            if A not in ids:
                raise ValueError(f"no identity for {A!r}")
            self.ids[A] = self._elem(ids[A])
        for A in ids:
            if A not in self.objects:
                raise ValueError(f"identity for unknown object {A!r}")
        # per-degree index of each basis element inside hom(A, B)^k
        self._deg_basis = {}
        self.index = {}
        for (A, B), names in self.basis.items():
            for n in names:
                k = self.elts[n].deg
                lst = self._deg_basis.setdefault((A, B, k), [])
                self.index[n] = len(lst)
                lst.append(n)
        self._cache = {}

    def _unknown(self, n):
        if n not in self.elts:
            raise ValueError(f"unknown basis element {n!r}")
        return True

    def _elem(self, v) -> dict:
        out = {}
        for n, c in (v.items() if isinstance(v, dict) else v):
            self._unknown(n)
            c = self.field(c)
            c = self.field.norm(out.get(n, 0) + c)
            if c:
                out[n] = c
            else:
                out.pop(n, None)
        return out

    # ------------------------------------------------------------ basics
    def deg(self, name) -> int:
        return self.elts[name].deg

    def src(self, name) -> str:
        return self.elts[name].source

    def tgt(self, name) -> str:
        return self.elts[name].target

    def hom_basis(self, A, B, k=None) -> list:
        if k is None:
            return self.basis[(A, B)]
        return self._deg_basis.get((A, B, k), [])

    def hom_degrees(self, A, B) -> list:
        return sorted({self.elts[n].deg for n in self.basis[(A, B)]})

    def identity(self, A) -> dict:
        return dict(self.ids[A])

    def elem_degree(self, e: dict):
        ds = {self.deg(n) for n in e}
        if len(ds) > 1:
            raise ValueError("inhomogeneous element")
        return ds.pop() if ds else None

    def add(self, a: dict, b: dict, s=1) -> dict:
        F = self.field
        out = dict(a)
        for n, c in b.items():
            v = F.norm(out.get(n, 0) + s * c)
            if v:
                out[n] = v
            else:
                out.pop(n, None)
        return out

    def scale(self, a: dict, s) -> dict:
        F = self.field
        s = F(s)
        if s == 0:
            return {}
        return {n: F.norm(c * s) for n, c in a.items()}

    def compose(self, g: dict, f: dict) -> dict:
        """g o f, bilinear extension of the structure constants (no signs)."""
        F = self.field
        out = {}
        for gn, gc in g.items():
            for fn, fc in f.items():
                prod = self.comp.get((gn, fn))
                if not prod:
                    continue
                c = F.norm(gc * fc)
                for n, v in prod.items():
                    w = F.norm(out.get(n, 0) + c * v)
                    if w:
                        out[n] = w
                    else:
                        out.pop(n, None)
        return out

    def differential(self, f: dict) -> dict:
        F = self.field
        out = {}
        for fn, fc in f.items():
            for n, v in self.d.get(fn, {}).items():
                w = F.norm(out.get(n, 0) + fc * v)
                if w:
                    out[n] = w
                else:
                    out.pop(n, None)
        return out

    # ------------------------------------------------------------ vectors
    def to_vec(self, e: dict, A, B, k) -> list:
        F = self.field
        basis = self.hom_basis(A, B, k)
        v = [F.zero] * len(basis)
        for n, c in e.items():
            be = self.elts[n]
            if (be.source, be.target, be.deg) != (A, B, k):
                raise ValueError(f"{n} is not in hom({A},{B})^{k}")
            v[self.index[n]] = c
        return v

    def from_vec(self, vec, A, B, k) -> dict:
        basis = self.hom_basis(A, B, k)
        return {n: c for n, c in zip(basis, vec) if c != 0}

    def hom_complex(self, A, B) -> Complex:
        key = ("hom", A, B)
        if key in self._cache:
            return self._cache[key]
        F = self.field
        degs = self.hom_degrees(A, B)
        dims = {k: len(self.hom_basis(A, B, k)) for k in degs}
        dmat = {}
        for k in degs:
            tgt = self.hom_basis(A, B, k + 1)
            if not tgt:
                continue
            rows = [dict() for _ in tgt]
            for c, n in enumerate(self.hom_basis(A, B, k)):
                for m, v in self.d.get(n, {}).items():
                    be = self.elts[m]
                    if (be.source, be.target, be.deg) != (A, B, k + 1):
                        raise ValueError(f"d({n}) leaves hom({A},{B})^{k + 1}")
                    rows[self.index[m]][c] = v
            dmat[k] = Matrix.from_row_dicts(F, rows, dims[k])
        cx = Complex(F, dims, dmat)
        self._cache[key] = cx
        return cx

    def precomp_matrix(self, g: str, X: str, k: int) -> Matrix:
        """Matrix of m -> m o g from hom(tgt g, X)^k to hom(src g, X)^{k+|g|}."""
        key = ("pre", g, X, k)
        if key in self._cache:
            return self._cache[key]
        A, B, e = self.src(g), self.tgt(g), self.deg(g)
        srcb = self.hom_basis(B, X, k)
        tgtb = self.hom_basis(A, X, k + e)
        rows = [dict() for _ in tgtb]
        for c, m in enumerate(srcb):
            for n, v in self.comp.get((m, g), {}).items():
                rows[self.index[n]][c] = v
        M = Matrix.from_row_dicts(self.field, rows, len(srcb))
        self._cache[key] = M
        return M

    def postcomp_matrix(self, q: dict, Y: str, k: int) -> Matrix:
        """Matrix of h -> q o h from hom(Y, src q)^k to hom(Y, tgt q)^{k+|q|}; q homogeneous."""
        key = ("post", tuple(sorted(q.items())), Y, k)
        if key in self._cache:
            return self._cache[key]
        names = list(q)
        A, B, e = self.src(names[0]), self.tgt(names[0]), self.deg(names[0])
        srcb = self.hom_basis(Y, A, k)
        tgtb = self.hom_basis(Y, B, k + e)
        F = self.field
        rows = [dict() for _ in tgtb]
        for c, h in enumerate(srcb):
            for qn, qc in q.items():
                for n, v in self.comp.get((qn, h), {}).items():
                    r = self.index[n]
                    w = F.norm(rows[r].get(c, 0) + qc * v)
                    if w:
                        rows[r][c] = w
                    else:
                        rows[r].pop(c, None)
        M = Matrix.from_row_dicts(F, rows, len(srcb))
        self._cache[key] = M
        return M

    def __eq__(self, other):
        return isinstance(other, DgCategory) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"DgCategory({self.field}, objects={self.objects}, basis={len(self.elts)})"

    # ------------------------------------------------------------ serialization
    def to_dict(self) -> dict:
        F = self.field
        fmt = lambda e: [[n, F.fmt(c)] for n, c in e.items()]
        field = {"kind": F.kind} if not F.is_prime else {"kind": "prime", "p": F.p}
        homs = {}
        for A in self.objects:
            for B in self.objects:
                names = self.basis[(A, B)]
                if not names:
                    continue
                homs[f"{A}->{B}"] = {
                    "basis": [{"name": n, "deg": self.deg(n)} for n in names],
                    "d": {n: fmt(self.d[n]) for n in names if self.d.get(n)},
                }
        return {
            "format": 1,
            "field": field,
            "objects": list(self.objects),
            "homs": homs,
            "comp": {f"{g}*{f}": fmt(v) for (g, f), v in self.comp.items() if v},
            "ids": {A: fmt(self.ids[A]) for A in self.objects},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DgCategory":
        if data.get("format", 1) != 1:
            raise ValueError(f"unsupported format {data.get('format')!r}")
        fd = data["field"]
        F = FieldSpec(fd["kind"], fd.get("p"))
        objects = data["objects"]
        homs, d = {}, {}
        for key, h in data.get("homs", {}).items():
            A, B = _split_arrow(key)
            homs[(A, B)] = [(b["name"], b["deg"]) for b in h["basis"]]
            for n, v in h.get("d", {}).items():
                d[n] = [(m, F(c)) for m, c in v]
        comp = {}
        for key, v in data.get("comp", {}).items():
            if "*" not in key:
                raise ValueError(f"bad composition key {key!r}")
            g, f = key.split("*", 1)
            comp[(g, f)] = [(m, F(c)) for m, c in v]
        ids = {A: [(m, F(c)) for m, c in v] for A, v in data.get("ids", {}).items()}
        return cls(F, objects, homs, d, comp, ids)


def _split_arrow(key):
    if "->" not in key:
        raise ValueError(f"bad hom key {key!r}")
    A, B = key.split("->", 1)
    return A, B


# ---------------------------------------------------------------- validation

def validate_dg_category(q: DgCategory) -> Report:
    """Exhaustive axiom check over all basis pairs and triples."""
    rep = Report("dg-category axioms")
    F = q.field
    elts = q.elts

    # (a) homs are complexes, d raises degree by one inside the hom
    ok = True
    for n, img in q.d.items():
        for m in img:
            a, b = elts[n], elts[m]
            if (a.source, a.target) != (b.source, b.target) or b.deg != a.deg + 1:
                ok = rep.add("differential degree", False, f"d({n}) contains {m}")
                break
        if not ok:
            break
    if ok:
        rep.add("differential degree", True)
        for (A, B) in q.basis:
            v, msg = validate_complex(q.hom_complex(A, B))
            if not v:
                rep.add("d^2 = 0", False, f"hom({A},{B}): {msg}")
                ok = False
                break
        if ok:
            rep.add("d^2 = 0", True)

    # (e) composition degree additivity and composability
    bad = None
    for (g, f), v in q.comp.items():
        eg, ef = elts[g], elts[f]
        if ef.target != eg.source:
            bad = f"{g}*{f} is not composable"
            break
        for m in v:
            em = elts[m]
            if (em.source, em.target) != (ef.source, eg.target) or em.deg != eg.deg + ef.deg:
                bad = f"{g}*{f} contains {m} of degree {em.deg}, expected {eg.deg + ef.deg}"
                break
        if bad:
            break
    rep.add("degree additivity", bad is None, bad or "")

    # identities: degree 0 closed elements of end(A)
    bad = None
    for A in q.objects:
        e = q.ids[A]
        for n in e:
            if (elts[n].source, elts[n].target, elts[n].deg) != (A, A, 0):
                bad = f"identity of {A} contains {n}"
        if not bad and q.differential(e):
            bad = f"identity of {A} is not closed"
        if bad:
            break
    rep.add("identity closed of degree 0", bad is None, bad or "")

    # (b) unit laws
    bad = None
    for n, be in elts.items():
        f = {n: F.one}
        left = q.compose(q.ids[be.target], f)
        right = q.compose(f, q.ids[be.source])
        if left != f:
            bad = f"1_{be.target} o {n} = {_show(q, left)}"
        elif right != f:
            bad = f"{n} o 1_{be.source} = {_show(q, right)}"
        if bad:
            break
    rep.add("unit laws", bad is None, bad or "")

    # (c) associativity on composable basis triples
    bad = None
    out_of = {}
    for n, be in elts.items():
        out_of.setdefault(be.source, []).append(n)
    for f, ef in elts.items():
        for g in out_of.get(ef.target, []):
            gf = q.compose({g: 1}, {f: 1})
            for h in out_of.get(elts[g].target, []):
                lhs = q.compose({h: 1}, gf)
                rhs = q.compose(q.compose({h: 1}, {g: 1}), {f: 1})
                if lhs != rhs:
                    bad = f"({h} o {g}) o {f} != {h} o ({g} o {f})"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("associativity", bad is None, bad or "")

    # (d) Leibniz on composable pairs
    bad = None
    for f, ef in elts.items():
        for g in out_of.get(ef.target, []):
            lhs = q.differential(q.compose({g: 1}, {f: 1}))
            rhs = q.add(q.compose(q.differential({g: 1}), {f: 1}),
                        q.compose({g: 1}, q.differential({f: 1})), F.sign(q.deg(g)))
            if lhs != rhs:
                bad = f"d({g} o {f}) = {_show(q, lhs)} but Leibniz gives {_show(q, rhs)}"
                break
        if bad:
            break
    rep.add("Leibniz rule", bad is None, bad or "")
    return rep


def _show(q, e):
    if not e:
        return "0"
    return " + ".join(f"{q.field.fmt(c)}*{n}" for n, c in e.items())


def check_nonpositive_cohomology(q: DgCategory):
    """None if all homs have H^i = 0 for i > 0, else ``(A, B, i)``."""
    for A in q.objects:
        for B in q.objects:
            cx = q.hom_complex(A, B)
            for i in cx.degrees():
                if i > 0 and cohomology_dim(cx, i):
                    return (A, B, i)
    return None


# ---------------------------------------------------------------- H^0

class H0Category:
    """H^0 of a presentation: cocycle representatives and induced composition.

    ``reps[(A, B)]`` are degree 0 cocycles of hom(A, B) (as hom elements)
    whose classes form a basis.  ``comp[(B, C, j, A, i)]`` holds the
    coordinates of reps[(B,C)][j] o reps[(A,B)][i].
    """

    def __init__(self, q: DgCategory):
        self.q = q
        self.field = q.field
        self.objects = list(q.objects)
        self.reps = {}
        self._bound = {}
        for A in q.objects:
            for B in q.objects:
                cx = q.hom_complex(A, B)
                h = cohomology(cx, 0, check=False)
                self.reps[(A, B)] = [q.from_vec(z, A, B, 0) for z in h.representatives]
                self._bound[(A, B)] = (h.representatives, [c for c in cx.diff(-1).columns() if any(c)] if cx.dim(-1) and cx.dim(0) else [])
        self.comp = {}
        for A, B, C in itertools.product(self.objects, repeat=3):
            for i, f in enumerate(self.reps[(A, B)]):
                for j, g in enumerate(self.reps[(B, C)]):
                    self.comp[(B, C, j, A, i)] = self.coords(q.compose(g, f), A, C)

    def dim(self, A, B) -> int:
        return len(self.reps[(A, B)])

    def coords(self, z: dict, A, B) -> list:
        """Coordinates of the class of a degree 0 cocycle in the rep basis."""
        F = self.field
        reps, bnd = self._bound[(A, B)]
        if not reps:
            return []
        n = len(self.q.hom_basis(A, B, 0))
        cols = list(reps) + list(bnd)
        M = Matrix.from_columns(F, n, cols)
        v = solve_particular(M, self.q.to_vec(z, A, B, 0))
        if v is NoSolution:
            raise ValueError("element is not a cocycle")
        return v[:len(reps)]

    def identity(self, A) -> list:
        return self.coords(self.q.ids[A], A, A)

    def compose(self, g: list, B, C, f: list, A) -> list:
        F = self.field
        out = [F.zero] * self.dim(A, C)
        for i, a in enumerate(f):
            if not a:
                continue
            for j, b in enumerate(g):
                if not b:
                    continue
                for k, v in enumerate(self.comp[(B, C, j, A, i)]):
                    out[k] = F.norm(out[k] + a * b * v)
        return out

    def check(self) -> Report:
        rep = Report("H0 category")
        F = self.field
        bad = None
        for A, B in itertools.product(self.objects, repeat=2):
            idB, idA = self.identity(B), self.identity(A)
            for i in range(self.dim(A, B)):
                e = [F.one if k == i else F.zero for k in range(self.dim(A, B))]
                if self.compose(idB, B, B, e, A) != e or self.compose(e, A, B, idA, A) != e:
                    bad = f"unit law fails on H0({A},{B})[{i}]"
        rep.add("H0 unit laws", bad is None, bad or "")
        bad = None
        for A, B, C, D in itertools.product(self.objects, repeat=4):
            for i in range(self.dim(A, B)):
                f = _unit(F, self.dim(A, B), i)
                for j in range(self.dim(B, C)):
                    g = _unit(F, self.dim(B, C), j)
                    gf = self.compose(g, B, C, f, A)
                    for k in range(self.dim(C, D)):
                        h = _unit(F, self.dim(C, D), k)
                        if self.compose(h, C, D, gf, A) != self.compose(self.compose(h, C, D, g, B), B, D, f, A):
                            bad = f"associativity fails on {A}->{B}->{C}->{D}"
        rep.add("H0 associativity", bad is None, bad or "")
        return rep


def _unit(F, n, i):
    return [F.one if k == i else F.zero for k in range(n)]


def h0_category(q: DgCategory) -> H0Category:
    r = validate_dg_category(q)
    if not r.ok:
        raise ValueError(f"invalid dg-category: {r.first_failure().line()}")
    return H0Category(q)


# ---------------------------------------------------------------- opposite

def opposite(q: DgCategory) -> DgCategory:
    F = q.field
    homs = {(B, A): [(n, q.deg(n)) for n in q.basis[(A, B)]] for (A, B) in q.basis}
    comp = {}
    for (g, f), v in q.comp.items():
        # in the opposite, f o_op g = (-1)^{|f||g|} g o f
        comp[(f, g)] = q.scale(v, F.sign(q.deg(f) * q.deg(g)))
    return DgCategory(F, q.objects, homs, dict(q.d), comp, q.ids)


# ---------------------------------------------------------------- functors

class DgFunctor:
    def __init__(self, source: DgCategory, target: DgCategory, objmap: dict, hommap: dict):
        self.source, self.target = source, target
        self.objmap = dict(objmap)
        for A in source.objects:
            if self.objmap.get(A) not in target.objects:
                raise ValueError(f"object {A!r} has no valid image")
        self.hommap = {}
        for n in source.elts:
            self.hommap[n] = target._elem(hommap.get(n, {}))

    def obj(self, A):
        return self.objmap[A]

    def apply(self, e: dict) -> dict:
        T = self.target
        out = {}
        for n, c in e.items():
            out = T.add(out, T.scale(self.hommap[n], c))
        return out

    def __matmul__(self, other: "DgFunctor") -> "DgFunctor":
        """self o other."""
        return DgFunctor(other.source, self.target,
                         {A: self.objmap[other.objmap[A]] for A in other.source.objects},
                         {n: self.apply(other.hommap[n]) for n in other.source.elts})

    @classmethod
    def identity(cls, q: DgCategory):
        return cls(q, q, {A: A for A in q.objects}, {n: {n: q.field.one} for n in q.elts})


def validate_dg_functor(Fn: DgFunctor) -> Report:
    rep = Report("dg-functor")
    S, T = Fn.source, Fn.target
    bad = None
    for n, be in S.elts.items():
        img = Fn.hommap[n]
        for m in img:
            te = T.elts[m]
            if (te.source, te.target) != (Fn.obj(be.source), Fn.obj(be.target)):
                bad = f"{n} maps outside hom({Fn.obj(be.source)},{Fn.obj(be.target)})"
            elif te.deg != be.deg:
                bad = f"{n} of degree {be.deg} maps to {m} of degree {te.deg}"
            if bad:
                break
        if bad:
            break
    rep.add("degree and hom preserved", bad is None, bad or "")
    bad = None
    for A in S.objects:
        if Fn.apply(S.ids[A]) != T.ids[Fn.obj(A)]:
            bad = f"identity of {A} not preserved"
            break
    rep.add("identities preserved", bad is None, bad or "")
    bad = None
    for n in S.elts:
        if Fn.apply(S.differential({n: 1})) != T.differential(Fn.hommap[n]):
            bad = f"differential not preserved on {n}"
            break
    rep.add("differentials preserved", bad is None, bad or "")
    bad = None
    for f, ef in S.elts.items():
        for g, eg in S.elts.items():
            if eg.source != ef.target:
                continue
            if Fn.apply(S.compose({g: 1}, {f: 1})) != T.compose(Fn.hommap[g], Fn.hommap[f]):
                bad = f"composition {g} o {f} not preserved"
                break
        if bad:
            break
    rep.add("composition preserved", bad is None, bad or "")
    return rep


def is_quasi_equivalence(Fn: DgFunctor) -> bool:
    """Hom chain maps are quasi-isomorphisms and H^0 is essentially surjective."""
    from .graded_complex import ChainMap, induced_rank
    S, T = Fn.source, Fn.target
    for A in S.objects:
        for B in S.objects:
            src = S.hom_complex(A, B)
            tgt = T.hom_complex(Fn.obj(A), Fn.obj(B))
            comps = {}
            for k in src.degrees():
                cols = [T.to_vec(Fn.hommap[n], Fn.obj(A), Fn.obj(B), k) for n in S.hom_basis(A, B, k)]
                comps[k] = Matrix.from_columns(S.field, tgt.dim(k), cols)
            f = ChainMap(src, tgt, 0, comps)
            for k in sorted(set(src.degrees()) | set(tgt.degrees())):
                r = induced_rank(f, k)
                if r != cohomology_dim(src, k) or r != cohomology_dim(tgt, k):
                    return False
    # essential surjectivity: every target object is H^0-isomorphic to an image
    H = H0Category(T)
    images = {Fn.obj(A) for A in S.objects}
    for B in T.objects:
        if B in images:
            continue
        if not any(_h0_isomorphic(H, B, C) for C in images):
            return False
    return True


def _h0_isomorphic(H: H0Category, B, C) -> bool:
    """Brute-force search for mutually inverse classes (small prime fields only)."""
    F = H.field
    if H.dim(B, C) == 0 or H.dim(C, B) == 0:
        return False
    if not F.is_prime or F.p ** (H.dim(B, C) + H.dim(C, B)) > 20000:
        raise NotImplementedError("isomorphism search needs a small prime field")
    idB, idC = H.identity(B), H.identity(C)
    for u in itertools.product(range(F.p), repeat=H.dim(B, C)):
        for v in itertools.product(range(F.p), repeat=H.dim(C, B)):
            if H.compose(list(v), C, B, list(u), B) == idB and H.compose(list(u), B, C, list(v), C) == idC:
                return True
    return False
