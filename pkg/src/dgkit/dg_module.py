"""Right dg-modules over a presented dg-category.

For a basis element g in hom(A, B) of degree e the module stores
``rho(g): M(B) -> M(A)``, a graded map of degree e.  The invariants are

    rho(dg)    = d rho(g) - (-1)^e rho(g) d
    rho(g o h) = (-1)^{|g||h|} rho(h) rho(g)
    rho(1_A)   = 1

A degree p module map phi satisfies ``phi_A rho_M(g) = (-1)^{p e} rho_N(g) phi_B``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .dg_category import DgCategory, DgFunctor, H0Category, check_nonpositive_cohomology
from .exact_field import Matrix, Subspace, kernel_basis, rank
from .graded_complex import (ChainMap, Complex, CohomologyBasis, HomComplex, cohomology_dim,
                             cone as complex_cone, differential, induced_rank, shift, validate_complex)
from .report import Report


class DgModule:
    def __init__(self, base: DgCategory, values: dict, action: dict):
        """values: {A: Complex}; action: {basis name: ChainMap M(tgt) -> M(src)}."""
        self.base = base
        self.field = base.field
        self.values = {A: values.get(A) or Complex.zero(base.field) for A in base.objects}
        self.action = {}
        for g, be in base.elts.items():
            m = action.get(g)
            if m is None:
                m = ChainMap(self.values[be.target], self.values[be.source], be.deg, {})
            elif isinstance(m, dict):
                m = ChainMap(self.values[be.target], self.values[be.source], be.deg, m)
            if m.degree != be.deg:
                raise ValueError(f"action of {g} has degree {m.degree}, expected {be.deg}")
            self.action[g] = m

    def value(self, A) -> Complex:
        return self.values[A]

    def act(self, g: dict, A=None, B=None, e=None) -> ChainMap:
        """rho of a homogeneous hom element (linear extension)."""
        if not g:
            if A is None:
                raise ValueError("zero element needs explicit objects")
            return ChainMap(self.values[B], self.values[A], e, {})
        out = None
        for n, c in g.items():
            term = self.action[n].scale(c)
            out = term if out is None else out + term
        return out

    def bounds(self):
        ds = [n for A in self.base.objects for n in self.values[A].degrees()]
        return (min(ds), max(ds)) if ds else (0, -1)

    def betti(self, A, lo, hi) -> dict:
        c = self.values[A]
        return {i: cohomology_dim(c, i) for i in range(lo, hi + 1)}

    def total_betti(self, lo, hi) -> dict:
        return {i: sum(cohomology_dim(self.values[A], i) for A in self.base.objects) for i in range(lo, hi + 1)}

    def __eq__(self, other):
        return (isinstance(other, DgModule) and self.values == other.values
                and all(self.action[g] == other.action[g] for g in self.action))

    def __repr__(self):
        return "DgModule(" + ", ".join(f"{A}: {dict(sorted(c.dims.items()))}" for A, c in self.values.items()) + ")"


def validate_module(M: DgModule) -> Report:
    rep = Report("dg-module")
    q, F = M.base, M.field
    bad = None
    for A, c in M.values.items():
        ok, msg = validate_complex(c)
        if not ok:
            bad = f"M({A}): {msg}"
            break
    rep.add("values are complexes", bad is None, bad or "")
    bad = None
    for A in q.objects:
        if M.act(q.ids[A]) != ChainMap.identity(M.values[A]):
            bad = f"identity of {A} acts nontrivially"
            break
    rep.add("unit acts as identity", bad is None, bad or "")
    bad = None
    for g, be in q.elts.items():
        dg = q.differential({g: 1})
        lhs = M.act(dg, be.source, be.target, be.deg + 1)
        if lhs != differential(M.action[g]):
            bad = f"rho(d{g}) != d rho({g})"
            break
    rep.add("action commutes with d", bad is None, bad or "")
    bad = None
    for h, eh in q.elts.items():
        for g, eg in q.elts.items():
            if eg.source != eh.target:
                continue
            gh = q.compose({g: 1}, {h: 1})
            lhs = M.act(gh, eh.source, eg.target, eg.deg + eh.deg)
            rhs = (M.action[h] @ M.action[g]).scale(F.sign(eg.deg * eh.deg))
            if lhs != rhs:
                bad = f"rho({g} o {h}) != sign rho({h}) rho({g})"
                break
        if bad:
            break
    rep.add("action respects composition", bad is None, bad or "")
    return rep


# ---------------------------------------------------------------- constructions

def yoneda(q: DgCategory, A) -> DgModule:
    if A not in q.objects:
        raise ValueError(f"unknown object {A!r}")
    F = q.field
    values = {B: q.hom_complex(B, A) for B in q.objects}
    action = {}
    for g, be in q.elts.items():
        comps = {}
        for k in values[be.target].degrees():
            comps[k] = q.precomp_matrix(g, A, k).scale(F.sign(be.deg * k))
        action[g] = ChainMap(values[be.target], values[be.source], be.deg, comps)
    return DgModule(q, values, action)


def zero_module(q: DgCategory) -> DgModule:
    return DgModule(q, {}, {})


def shift_module(M: DgModule, n: int) -> DgModule:
    F = M.field
    values = {A: shift(c, n) for A, c in M.values.items()}
    action = {}
    for g, m in M.action.items():
        be = M.base.elts[g]
        s = F.sign(n * be.deg)
        action[g] = ChainMap(values[be.target], values[be.source], be.deg,
                             {i - n: x.scale(s) for i, x in m.components.items()})
    return DgModule(M.base, values, action)


def direct_sum_modules(*Ms: DgModule) -> DgModule:
    from .graded_complex import direct_sum
    q, F = Ms[0].base, Ms[0].field
    values = {A: direct_sum(*(M.values[A] for M in Ms)) for A in q.objects}
    action = {}
    for g, be in q.elts.items():
        src, tgt = be.target, be.source
        comps = {}
        for n in values[src].degrees():
            comps[n] = Matrix.block(F, [M.values[tgt].dim(n + be.deg) for M in Ms],
                                    [M.values[src].dim(n) for M in Ms],
                                    {(k, k): M.action[g].comp(n) for k, M in enumerate(Ms)})
        action[g] = ChainMap(values[src], values[tgt], be.deg, comps)
    return DgModule(q, values, action)


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: DgModule
    target: DgModule
    degree: int
    components: dict = dc_field(default_factory=dict)   # A -> ChainMap

    def comp(self, A) -> ChainMap:
        m = self.components.get(A)
        if m is None:
            return ChainMap(self.source.values[A], self.target.values[A], self.degree, {})
        return m

    def __add__(self, other):
        return ModuleMap(self.source, self.target, self.degree,
                         {A: self.comp(A) + other.comp(A) for A in self.source.base.objects})

    def __sub__(self, other):
        return ModuleMap(self.source, self.target, self.degree,
                         {A: self.comp(A) - other.comp(A) for A in self.source.base.objects})

    def scale(self, s):
        return ModuleMap(self.source, self.target, self.degree, {A: m.scale(s) for A, m in self.components.items()})

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(other.source, self.target, self.degree + other.degree,
                         {A: self.comp(A) @ other.comp(A) for A in self.source.base.objects})

    def is_zero(self):
        return all(self.comp(A).is_zero() for A in self.source.base.objects)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.degree == other.degree
                and all(self.comp(A) == other.comp(A) for A in self.source.base.objects))

    @classmethod
    def identity(cls, M: DgModule):
        return cls(M, M, 0, {A: ChainMap.identity(c) for A, c in M.values.items()})

    @classmethod
    def zero(cls, M, N, degree=0):
        return cls(M, N, degree, {})


def module_map_differential(f: ModuleMap) -> ModuleMap:
    return ModuleMap(f.source, f.target, f.degree + 1,
                     {A: differential(f.comp(A)) for A in f.source.base.objects})


def is_natural(f: ModuleMap) -> bool:
    q, F = f.source.base, f.source.field
    for g, be in q.elts.items():
        s = F.sign(f.degree * be.deg)
        lhs = f.comp(be.source) @ f.source.action[g]
        rhs = (f.target.action[g] @ f.comp(be.target)).scale(s)
        if lhs != rhs:
            return False
    return True


def is_closed_map(f: ModuleMap) -> bool:
    return module_map_differential(f).is_zero()


def shift_module_map(f: ModuleMap, n: int) -> ModuleMap:
    from .graded_complex import shift_map
    S, T = shift_module(f.source, n), shift_module(f.target, n)
    comps = {}
    for A in f.source.base.objects:
        m = shift_map(f.comp(A), n)
        comps[A] = ChainMap(S.values[A], T.values[A], f.degree, m.components)
    return ModuleMap(S, T, f.degree, comps)


@dataclass(frozen=True, eq=False)
class ModuleCone:
    module: DgModule
    i: ModuleMap   # M[1] -> cone
    j: ModuleMap   # N -> cone
    p: ModuleMap   # cone -> M[1]
    s: ModuleMap   # cone -> N


def module_cone(f: ModuleMap) -> ModuleCone:
    """cone(f)(A) = cone(f_A); rho = diag((-1)^e rho_M, rho_N)."""
    if f.degree != 0 or not is_closed_map(f):
        raise ValueError("module cone needs a closed degree 0 map")
    M, N, q, F = f.source, f.target, f.source.base, f.source.field
    cones = {A: complex_cone(f.comp(A)) for A in q.objects}
    values = {A: c.complex for A, c in cones.items()}
    action = {}
    for g, be in q.elts.items():
        src, tgt, e = be.target, be.source, be.deg
        comps = {}
        for n in values[src].degrees():
            comps[n] = Matrix.block(
                F, [M.values[tgt].dim(n + e + 1), N.values[tgt].dim(n + e)],
                [M.values[src].dim(n + 1), N.values[src].dim(n)],
                {(0, 0): M.action[g].comp(n + 1).scale(F.sign(e)), (1, 1): N.action[g].comp(n)})
        action[g] = ChainMap(values[src], values[tgt], e, comps)
    C = DgModule(q, values, action)
    M1 = shift_module(M, 1)

    def lift(name, src, tgt):
        return ModuleMap(src, tgt, 0, {A: ChainMap(src.values[A], tgt.values[A], 0,
                                                   getattr(cones[A], name).components) for A in q.objects})
    return ModuleCone(C, lift("i", M1, C), lift("j", N, C), lift("p", C, M1), lift("s", C, N))


def restrict_along(Fn: DgFunctor, M: DgModule) -> DgModule:
    S = Fn.source
    values = {A: M.values[Fn.obj(A)] for A in S.objects}
    action = {}
    for g, be in S.elts.items():
        img = Fn.hommap[g]
        m = M.act(img, Fn.obj(be.source), Fn.obj(be.target), be.deg)
        action[g] = ChainMap(values[be.target], values[be.source], be.deg, m.components)
    return DgModule(S, values, action)


# ---------------------------------------------------------------- hom complexes

class ModuleHomComplex(Complex):
    """Natural transformations M -> N as the kernel of the commutation system.

    Degree p coordinates are the free columns of the kernel basis inside
    (+)_A hom(M(A), N(A))^p.
    """

    def __init__(self, M: DgModule, N: DgModule, degrees=None):
        self.M, self.N = M, N
        q, F = M.base, M.field
        self.field = F
        self.homs = {A: HomComplex(M.values[A], N.values[A]) for A in q.objects}
        allp = sorted(set().union(*(h.dims for h in self.homs.values())))
        if degrees is not None:
            want = set(degrees)
            allp = [p for p in allp if p in want]
        self.kernels = {}
        for p in allp:
            self.kernels[p] = self._kernel(p)
        dims = {p: len(k[0]) for p, k in self.kernels.items()}
        d = {}
        for p in self.kernels:
            if p + 1 in self.kernels and dims[p] and dims[p + 1]:
                d[p] = self._diff(p)
        super().__init__(F, dims, d)

    def _offsets(self, p):
        off, out = 0, {}
        for A in self.M.base.objects:
            out[A] = off
            off += self.homs[A].dim(p)
        return out, off

    def _kernel(self, p):
        M, N, q, F = self.M, self.N, self.M.base, self.M.field
        offs, total = self._offsets(p)
        rows = []
        for g, be in q.elts.items():
            A, B, e = be.source, be.target, be.deg
            s = F.sign(p * e)
            hA, hB = self.homs[A], self.homs[B]
            oA = hA._offsets(p)
            oB = hB._offsets(p)
            for n in M.values[B].degrees():
                # phi_A^{n+e} rho_M(g)^n - s rho_N(g)^{n+p} phi_B^n  : M(B)^n -> N(A)^{n+e+p}
                R = M.action[g].comp(n)
                Y = N.action[g].comp(n + p)
                nr, nc = N.values[A].dim(n + e + p), M.values[B].dim(n)
                if not nr or not nc:
                    continue
                eq = [[{} for _ in range(nc)] for _ in range(nr)]
                if n + e in oA and not R.is_zero():
                    r_, c_, off = oA[n + e]
                    base = offs[A] + off
                    for k in range(R.nrows):
                        for j, v in R.row(k).items():
                            for i in range(nr):
                                var = base + i * c_ + k
                                eq[i][j][var] = eq[i][j].get(var, 0) + v
                if n in oB and not Y.is_zero():
                    r_, c_, off = oB[n]
                    base = offs[B] + off
                    for i in range(nr):
                        for k, v in Y.row(i).items():
                            for j in range(nc):
                                var = base + k * c_ + j
                                eq[i][j][var] = eq[i][j].get(var, 0) - s * v
                for i in range(nr):
                    for j in range(nc):
                        r = {k: F.norm(v) for k, v in eq[i][j].items()}
                        r = {k: v for k, v in r.items() if v}
                        if r:
                            rows.append(r)
        C = Matrix.from_row_dicts(F, rows, total)
        basis = kernel_basis(C) if rows else [[F.one if i == j else F.zero for i in range(total)] for j in range(total)]
        return basis, self._free(basis)

    @staticmethod
    def _free(basis):
        # kernel_basis puts a 1 at a free column that is zero in the other vectors
        out = []
        for k, vec in enumerate(basis):
            for i, v in enumerate(vec):
                if v == 1 and all(b[i] == 0 for j, b in enumerate(basis) if j != k):
                    out.append(i)
                    break
            else:
                raise AssertionError("kernel basis is not in normal form")
        return out

    def _ambient_diff(self, p, vec):
        offs, _ = self._offsets(p)
        offs1, total1 = self._offsets(p + 1)
        F = self.field
        out = [F.zero] * total1
        for A in self.M.base.objects:
            h = self.homs[A]
            if not h.dim(p) or not h.dim(p + 1):
                continue
            part = vec[offs[A]:offs[A] + h.dim(p)]
            img = h.diff(p) @ part
            for i, v in enumerate(img):
                out[offs1[A] + i] = v
        return out

    def _diff(self, p):
        basis, _ = self.kernels[p]
        _, free1 = self.kernels[p + 1]
        cols = []
        for vec in basis:
            img = self._ambient_diff(p, vec)
            cols.append([img[i] for i in free1])
        return Matrix.from_columns(self.field, len(free1), cols)

    def decode(self, p, coords) -> ModuleMap:
        basis, _ = self.kernels[p]
        F = self.field
        offs, total = self._offsets(p)
        vec = [F.zero] * total
        for a, b in zip(coords, basis):
            if a:
                for i, v in enumerate(b):
                    if v:
                        vec[i] = F.norm(vec[i] + a * v)
        comps = {}
        for A in self.M.base.objects:
            h = self.homs[A]
            comps[A] = h.decode(p, vec[offs[A]:offs[A] + h.dim(p)]) if h.dim(p) else \
                ChainMap(self.M.values[A], self.N.values[A], p, {})
        return ModuleMap(self.M, self.N, p, comps)

    def encode(self, f: ModuleMap) -> list:
        p = f.degree
        _, free = self.kernels[p]
        offs, total = self._offsets(p)
        vec = [self.field.zero] * total
        for A in self.M.base.objects:
            h = self.homs[A]
            if h.dim(p):
                part = h.encode(f.comp(A))
                vec[offs[A]:offs[A] + len(part)] = part
        return [vec[i] for i in free]


def module_hom_complex(M: DgModule, N: DgModule, degrees=None) -> ModuleHomComplex:
    return ModuleHomComplex(M, N, degrees)


def module_hom_h(M, N, p) -> int:
    """dim H^p of the module hom complex, building only degrees p-1..p+1."""
    H = ModuleHomComplex(M, N, degrees=[p - 1, p, p + 1])
    return cohomology_dim(H, p)


# ---------------------------------------------------------------- H^0-modules

class H0Module:
    """A right module over H^0 of the base, with explicit action matrices.

    ``action[(A, B, i)]`` is the action of the i-th basis class of H0(A, B),
    a ``dims[A] x dims[B]`` matrix.
    """

    def __init__(self, H: H0Category, dims: dict, action: dict):
        self.H = H
        self.field = H.field
        self.dims = {A: dims.get(A, 0) for A in H.objects}
        self.action = {}
        for A, B in itertools.product(H.objects, repeat=2):
            for i in range(H.dim(A, B)):
                m = action.get((A, B, i))
                if m is None:
                    m = Matrix.zeros(self.field, self.dims[A], self.dims[B])
                self.action[(A, B, i)] = m

    def act(self, coords, A, B) -> Matrix:
        out = Matrix.zeros(self.field, self.dims[A], self.dims[B])
        for i, c in enumerate(coords):
            if c:
                out = out + self.action[(A, B, i)].scale(c)
        return out

    @property
    def total_dim(self):
        return sum(self.dims.values())

    def check(self) -> Report:
        rep = Report("H0-module")
        H, F = self.H, self.field
        bad = None
        for A in H.objects:
            if self.act(H.identity(A), A, A) != Matrix.identity(F, self.dims[A]):
                bad = f"identity of {A}"
        for A, B, C in itertools.product(H.objects, repeat=3):
            for i in range(H.dim(A, B)):
                for j in range(H.dim(B, C)):
                    gf = H.comp[(B, C, j, A, i)]
                    if self.act(gf, A, C) != self.action[(A, B, i)] @ self.action[(B, C, j)]:
                        bad = f"functoriality on {A}->{B}->{C}"
        rep.add("H0 functoriality", bad is None, bad or "")
        return rep


def module_cohomology(M: DgModule, i: int, H: H0Category | None = None) -> H0Module:
    q = M.base
    H = H or H0Category(q)
    cb = {A: CohomologyBasis(M.values[A], i) for A in q.objects}
    dims = {A: cb[A].dim for A in q.objects}
    action = {}
    for A, B in itertools.product(q.objects, repeat=2):
        for k, g in enumerate(H.reps[(A, B)]):
            rho = M.act(g, A, B, 0).comp(i)
            cols = [cb[A].coords(rho @ z) for z in cb[B].reps]
            action[(A, B, k)] = Matrix.from_columns(M.field, dims[A], cols)
    return H0Module(H, dims, action)


def representable_h0(H: H0Category, A) -> H0Module:
    """H0(-, A): value(B) = H0(B, A), g acts by precomposition."""
    dims = {B: H.dim(B, A) for B in H.objects}
    action = {}
    for C, B in itertools.product(H.objects, repeat=2):
        for i in range(H.dim(C, B)):
            cols = [H.comp[(B, A, j, C, i)] for j in range(H.dim(B, A))]
            action[(C, B, i)] = Matrix.from_columns(H.field, dims[C], cols)
    return H0Module(H, dims, action)


def h0_module_hom_dim(M: H0Module, N: H0Module) -> int:
    """dim of H0-linear maps M -> N, by solving the naturality system."""
    H, F = M.H, M.field
    offs, total = {}, 0
    for A in H.objects:
        offs[A] = total
        total += N.dims[A] * M.dims[A]
    if not total:
        return 0
    rows = []
    for A, B in itertools.product(H.objects, repeat=2):
        for i in range(H.dim(A, B)):
            R, Y = M.action[(A, B, i)], N.action[(A, B, i)]
            # phi_A R - Y phi_B = 0 as N(A) x M(B) matrix
            for r in range(N.dims[A]):
                for c in range(M.dims[B]):
                    row = {}
                    for k, v in ((k, R[k, c]) for k in range(M.dims[A])):
                        if v:
                            var = offs[A] + r * M.dims[A] + k
                            row[var] = F.norm(row.get(var, 0) + v)
                    for k, v in Y.row(r).items():
                        var = offs[B] + k * M.dims[B] + c
                        row[var] = F.norm(row.get(var, 0) - v)
                    row = {k: v for k, v in row.items() if v}
                    if row:
                        rows.append(row)
    if not rows:
        return total
    return total - rank(Matrix.from_row_dicts(F, rows, total))


# ---------------------------------------------------------------- finite presentations

class NotFp(Exception):
    pass


@dataclass
class FpPresentation:
    """P1 -> P0 -> N -> 0 with P0 = (+) H0(-, A_k) for generators (A_k, x_k).

    Relations are elements of P0(B) written as one coordinate block per generator.
    """
    module: H0Module
    generators: list
    relations: list
    report: Report

    @property
    def ok(self):
        return self.report.ok


def _gen_images(N: H0Module, gens, B):
    """Images of all generators at object B: vectors in N(B)."""
    H, F = N.H, N.field
    out = []
    for A, x in gens:
        for i in range(H.dim(B, A)):
            out.append(N.action[(B, A, i)] @ x)
    return out


def _p0_map(N: H0Module, gens, B) -> Matrix:
    """P0(B) -> N(B); P0(B) basis is (generator k, H0(B, A_k) basis index)."""
    cols = _gen_images(N, gens, B)
    return Matrix.from_columns(N.field, N.dims[B], cols) if cols else Matrix.zeros(N.field, N.dims[B], 0)


def _p0_module(N: H0Module, gens) -> H0Module:
    H = N.H
    reps = [representable_h0(H, A) for A, _ in gens]
    dims = {B: sum(r.dims[B] for r in reps) for B in H.objects}
    action = {}
    for C, B in itertools.product(H.objects, repeat=2):
        for i in range(H.dim(C, B)):
            action[(C, B, i)] = Matrix.block(N.field, [r.dims[C] for r in reps], [r.dims[B] for r in reps],
                                             {(k, k): r.action[(C, B, i)] for k, r in enumerate(reps)})
    return H0Module(H, dims, action)


def greedy_generators(N: H0Module, sub=None):
    """Generators of N (or of the submodule given by spanning sets ``sub[B]``), greedily.

    Objects in declaration order, basis vectors in order; a vector is kept
    when it is not in the span of what earlier generators already reach.
    """
    H, F = N.H, N.field
    gens = []
    for A in H.objects:
        cands = sub[A] if sub is not None else [[F.one if i == j else F.zero for i in range(N.dims[A])] for j in range(N.dims[A])]
        S = Subspace(F, N.dims[A], _gen_images(N, gens, A))
        for x in cands:
            if S.add(x):
                gens.append((A, list(x)))
                for y in _gen_images(N, [(A, list(x))], A):
                    S.add(y)
    # drop generators reached by the others (a later object may generate an earlier one)
    k = 0
    while k < len(gens):
        A, x = gens[k]
        others = gens[:k] + gens[k + 1:]
        imgs = _gen_images(N, others, A)
        if imgs and Subspace(F, N.dims[A], imgs).contains(x):
            gens = others
        else:
            k += 1
    return gens


def fp_presentation(N: H0Module) -> FpPresentation:
    H, F = N.H, N.field
    rep = Report("fp presentation")
    gens = greedy_generators(N)
    surj = all(rank(_p0_map(N, gens, B)) == N.dims[B] for B in H.objects if N.dims[B])
    rep.add("generators surject", surj)
    P0 = _p0_module(N, gens)
    kern = {B: kernel_basis(_p0_map(N, gens, B)) if P0.dims[B] else [] for B in H.objects}
    rels = greedy_generators(P0, kern)
    # exactness at P0: relations span the kernel at every object
    ok = True
    for B in H.objects:
        img = _gen_images(P0, rels, B)
        r = len(Subspace(F, P0.dims[B], img).pivots) if img else 0
        if r != len(kern[B]):
            ok = False
        Kspace = Subspace(F, P0.dims[B], kern[B])
        if any(not Kspace.contains(v) for v in img):
            ok = False
    rep.add("relations span the kernel", ok)
    return FpPresentation(N, gens, rels, rep)


def weak_kernel(H: H0Category, A, B, f: list):
    """Generators (C_k, h_k in H0(C_k, A)) of the kernel of f o - : H0(-, A) -> H0(-, B)."""
    RA = representable_h0(H, A)
    kern = {}
    for C in H.objects:
        cols = [H.compose(f, A, B, _unit(H.field, H.dim(C, A), i), C) for i in range(H.dim(C, A))]
        if not H.dim(C, A):
            kern[C] = []
            continue
        Mx = Matrix.from_columns(H.field, H.dim(C, B), cols) if H.dim(C, B) else Matrix.zeros(H.field, 0, H.dim(C, A))
        kern[C] = kernel_basis(Mx)
    return greedy_generators(RA, kern), kern


def _unit(F, n, i):
    return [F.one if k == i else F.zero for k in range(n)]


def check_hlc(q: DgCategory, H: H0Category | None = None) -> Report:
    rep = Report("hlc")
    w = check_nonpositive_cohomology(q)
    rep.add("nonpositive", w is None, "" if w is None else f"H^{w[2]} hom({w[0]},{w[1]}) != 0")
    H = H or H0Category(q)
    ok, detail = True, ""
    for A, B in itertools.product(H.objects, repeat=2):
        for i in range(H.dim(A, B)):
            gens, kern = weak_kernel(H, A, B, _unit(H.field, H.dim(A, B), i))
            RA = representable_h0(H, A)
            for C in H.objects:
                img = _gen_images(RA, gens, C)
                if Subspace(H.field, H.dim(C, A), img).dim != len(kern[C]):
                    ok, detail = False, f"no weak kernel for class {i} of H0({A},{B})"
    rep.add("coherent", ok, detail)
    ok, detail = True, ""
    for A in q.objects:
        Y = yoneda(q, A)
        lo, hi = Y.bounds()
        for i in range(lo, hi + 1):
            N = module_cohomology(Y, i, H)
            if N.total_dim and not fp_presentation(N).ok:
                ok, detail = False, f"H^{i} of yoneda({A}) not fp"
    rep.add("hfp representables", ok, detail)
    return rep


# ---------------------------------------------------------------- block maps and cohomology verdicts

def block_module_map(src: DgModule, srcs: list, tgt: DgModule, tgts: list, degree: int, blocks: dict) -> ModuleMap:
    """Map between direct sums given ``{(t, s): ModuleMap srcs[s] -> tgts[t]}``."""
    q, F = src.base, src.field
    comps = {}
    for A in q.objects:
        cm = {}
        for n in src.values[A].degrees():
            cm[n] = Matrix.block(F, [T.values[A].dim(n + degree) for T in tgts], [S.values[A].dim(n) for S in srcs],
                                 {k: m.comp(A).comp(n) for k, m in blocks.items()})
        comps[A] = ChainMap(src.values[A], tgt.values[A], degree, cm)
    return ModuleMap(src, tgt, degree, comps)


def map_rank(f: ModuleMap, i: int) -> int:
    return sum(induced_rank(f.comp(A), i) for A in f.source.base.objects)


def map_verdict(f: ModuleMap, i: int) -> str:
    """'iso', 'epi', 'mono' or 'none' for H^i(f) (degree 0 closed f)."""
    epi = mono = True
    for A in f.source.base.objects:
        r = induced_rank(f.comp(A), i)
        if r != cohomology_dim(f.target.values[A], i):
            epi = False
        if r != cohomology_dim(f.source.values[A], i):
            mono = False
    return "iso" if epi and mono else "epi" if epi else "mono" if mono else "none"
