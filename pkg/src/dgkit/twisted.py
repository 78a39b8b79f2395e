"""One-sided twisted complexes over a presented dg-category.

An object X has entries ``X_i`` (a list of objects, read as a formal direct
sum placed at index i) and a twist ``q_i^j: X_i -> X_j`` of degree i-j+1.
Hom matrices are sparse dicts ``{(row, col): element}``; rows index the
target list and columns the source list.  Composition of hom matrices is the
plain matrix product.

Conventions (checked by the test-suite):

    MC identity        (-1)^j d q_i^j + q_k^j q_i^k = 0
    differential       (df)_i^j = (-1)^j d f_i^j + r_k^j f_i^k - (-1)^p f_k^j q_i^k
    Tot(X)(B)^n        (+)_j hom(B, X_j)^{n-j}, differential (-1)^j d + q o -,
                       action rho(g) m = (-1)^{|g| n} m o g
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .dg_category import DgCategory, DgFunctor
from .dg_module import DgModule, ModuleMap, module_map_differential
from .exact_field import Matrix, NoSolution, kernel_basis, solve_particular
from .graded_complex import ChainMap, Complex, HomComplex
from .report import Report


# ---------------------------------------------------------------- hom matrices

def hm_clean(m: dict) -> dict:
    return {k: v for k, v in m.items() if v}


def hm_add(q: DgCategory, a: dict, b: dict, s=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        w = q.add(out.get(k, {}), v, s)
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return out


def hm_scale(q: DgCategory, a: dict, s) -> dict:
    return hm_clean({k: q.scale(v, s) for k, v in a.items()})


def hm_compose(q: DgCategory, g: dict, f: dict) -> dict:
    """g o f for hom matrices (no signs)."""
    by_row = {}
    for (k, c), e in f.items():
        by_row.setdefault(k, []).append((c, e))
    out = {}
    for (r, k), ge in g.items():
        for c, fe in by_row.get(k, ()):
            prod = q.compose(ge, fe)
            if prod:
                w = q.add(out.get((r, c), {}), prod)
                if w:
                    out[(r, c)] = w
                else:
                    out.pop((r, c), None)
    return out


def hm_d(q: DgCategory, a: dict) -> dict:
    return hm_clean({k: q.differential(v) for k, v in a.items()})


def hm_identity(q: DgCategory, objs) -> dict:
    return {(r, r): q.identity(A) for r, A in enumerate(objs)}


# ---------------------------------------------------------------- objects

class TwistedComplex:
    def __init__(self, base: DgCategory, entries: dict, q: dict | None = None):
        self.base = base
        self.entries = {int(i): tuple(v) for i, v in sorted(entries.items()) if v}
        for i, objs in self.entries.items():
            for A in objs:
                if A not in base.objects:
                    raise ValueError(f"unknown object {A!r} at index {i}")
        self.q = {}
        for (i, j), m in (q or {}).items():
            m = hm_clean(m)
            if not m:
                continue
            if i not in self.entries or j not in self.entries:
                raise ValueError(f"q_{i}^{j} between empty entries")
            for (r, c), e in m.items():
                if not (0 <= r < len(self.entries[j]) and 0 <= c < len(self.entries[i])):
                    raise ValueError(f"q_{i}^{j} position {(r, c)} out of range")
            self.q[(i, j)] = m

    def entry(self, i) -> tuple:
        return self.entries.get(i, ())

    def twist(self, i, j) -> dict:
        return self.q.get((i, j), {})

    def indices(self) -> list:
        return sorted(self.entries)

    @property
    def is_zero(self):
        return not self.entries

    def window(self):
        idx = self.indices()
        return (idx[0], idx[-1]) if idx else (0, -1)

    @property
    def top(self):
        return self.window()[1]

    def __eq__(self, other):
        return (isinstance(other, TwistedComplex) and self.entries == other.entries
                and self.q == other.q)

    def __repr__(self):
        return f"TwistedComplex(entries={self.entries}, q_slots={sorted(self.q)})"

    @classmethod
    def single(cls, base, objs, index=0):
        """The objects placed at one index with zero twist."""
        return cls(base, {index: list(objs)}, {})


def validate_twisted(X: TwistedComplex) -> Report:
    rep = Report("twisted complex")
    q = X.base
    bad = None
    for (i, j), m in X.q.items():
        if j <= i:
            bad = f"one-sided violated at {(i, j)}"
            break
        for (r, c), e in m.items():
            A, B = X.entries[i][c], X.entries[j][r]
            for n in e:
                be = q.elts[n]
                if (be.source, be.target, be.deg) != (A, B, i - j + 1):
                    bad = f"q_{i}^{j}[{r},{c}] contains {n}, expected hom({A},{B})^{i - j + 1}"
                    break
            if bad:
                break
        if bad:
            break
    rep.add("one-sided and degrees", bad is None, bad or "")
    bad = None
    for i in X.indices():
        for j in X.indices():
            total = hm_scale(q, hm_d(q, X.twist(i, j)), q.field.sign(j))
            for k in X.indices():
                if (k, j) in X.q and (i, k) in X.q:
                    total = hm_add(q, total, hm_compose(q, X.q[(k, j)], X.q[(i, k)]))
            if total:
                bad = f"MC fails at {(i, j)}"
                break
        if bad:
            break
    rep.add("Maurer-Cartan", bad is None, bad or "")
    return rep


# ---------------------------------------------------------------- morphisms

@dataclass(frozen=True, eq=False)
class TwMorphism:
    source: TwistedComplex
    target: TwistedComplex
    degree: int
    components: dict = dc_field(default_factory=dict)    # (i, j) -> hom matrix

    def __post_init__(self):
        object.__setattr__(self, "components", {k: hm_clean(v) for k, v in self.components.items() if hm_clean(v)})

    @property
    def base(self):
        return self.source.base

    def comp(self, i, j) -> dict:
        return self.components.get((i, j), {})

    @property
    def one_sided(self) -> bool:
        return all(i - j + self.degree <= 0 for (i, j) in self.components)

    def violating_slots(self):
        return sorted(k for k in self.components if k[0] - k[1] + self.degree > 0)

    def __add__(self, other):
        q = self.base
        out = dict(self.components)
        for k, v in other.components.items():
            out[k] = hm_add(q, out.get(k, {}), v)
        return TwMorphism(self.source, self.target, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        q = self.base
        return TwMorphism(self.source, self.target, self.degree,
                          {k: hm_scale(q, v, s) for k, v in self.components.items()})

    def __matmul__(self, other: "TwMorphism") -> "TwMorphism":
        q = self.base
        out = {}
        for (i, j), f in other.components.items():
            for (j2, k), g in self.components.items():
                if j2 == j:
                    out[(i, k)] = hm_add(q, out.get((i, k), {}), hm_compose(q, g, f))
        return TwMorphism(other.source, self.target, self.degree + other.degree, out)

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        return (isinstance(other, TwMorphism) and self.degree == other.degree
                and self.components == other.components)

    def __repr__(self):
        return f"TwMorphism(deg={self.degree}, {self.components})"

    @classmethod
    def identity(cls, X: TwistedComplex):
        return cls(X, X, 0, {(i, i): hm_identity(X.base, objs) for i, objs in X.entries.items()})


def tw_differential(f: TwMorphism) -> TwMorphism:
    X, Y, p, q = f.source, f.target, f.degree, f.base
    F = q.field
    out = {}

    def acc(key, m, s=1):
        if m:
            out[key] = hm_add(q, out.get(key, {}), m, s)

    for (i, j), m in f.components.items():
        acc((i, j), hm_d(q, m), F.sign(j))
        for (k, l), r in Y.q.items():
            if k == j:
                acc((i, l), hm_compose(q, r, m))
        for (k, l), x in X.q.items():
            if l == i:
                acc((k, j), hm_compose(q, m, x), -F.sign(p))
    return TwMorphism(X, Y, p + 1, out)


def is_closed(f: TwMorphism) -> bool:
    return tw_differential(f).is_zero()


# ---------------------------------------------------------------- shift, cone, truncation

def tw_shift(X: TwistedComplex, n: int) -> TwistedComplex:
    q = X.base
    s = q.field.sign(n)
    return TwistedComplex(q, {i - n: v for i, v in X.entries.items()},
                          {(i - n, j - n): hm_scale(q, m, s) for (i, j), m in X.q.items()})


def tw_shift_map(f: TwMorphism, n: int) -> TwMorphism:
    """f[n] with sign (-1)^{n p}, matching the module shift under Tot."""
    q = f.base
    s = q.field.sign(n * f.degree)
    return TwMorphism(tw_shift(f.source, n), tw_shift(f.target, n), f.degree,
                      {(i - n, j - n): hm_scale(q, m, s) for (i, j), m in f.components.items()})


@dataclass(frozen=True, eq=False)
class TwCone:
    complex: TwistedComplex
    j: TwMorphism      # Y -> cone
    p: TwMorphism      # cone -> X[1]


def _offset_hm(m, dr, dc):
    return {(r + dr, c + dc): e for (r, c), e in m.items()}


def tw_cone(f: TwMorphism) -> TwCone:
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 morphism")
    if not f.one_sided:
        raise ValueError("cone needs a one-sided morphism")
    if not is_closed(f):
        raise ValueError("cone needs a closed morphism")
    X, Y, q = f.source, f.target, f.base
    idx = sorted({i - 1 for i in X.entries} | set(Y.entries))
    entries = {i: list(X.entry(i + 1)) + list(Y.entry(i)) for i in idx}
    qq = {}
    for i in idx:
        nx = len(X.entry(i + 1))
        for j in idx:
            if j <= i:
                continue
            ny = len(X.entry(j + 1))
            m = hm_scale(q, X.twist(i + 1, j + 1), -1)
            m = hm_add(q, m, _offset_hm(f.comp(i + 1, j), ny, 0))
            m = hm_add(q, m, _offset_hm(Y.twist(i, j), ny, nx))
            if m:
                qq[(i, j)] = m
    C = TwistedComplex(q, entries, qq)
    X1 = tw_shift(X, 1)
    jc, pc = {}, {}
    for i in idx:
        nx = len(X.entry(i + 1))
        if Y.entry(i):
            jc[(i, i)] = _offset_hm(hm_identity(q, Y.entry(i)), nx, 0)
        if X.entry(i + 1):
            pc[(i, i)] = hm_identity(q, X.entry(i + 1))
    return TwCone(C, TwMorphism(Y, C, 0, jc), TwMorphism(C, X1, 0, pc))


def restrict(X: TwistedComplex, lo=None, hi=None) -> TwistedComplex:
    keep = lambda i: (lo is None or i >= lo) and (hi is None or i <= hi)
    return TwistedComplex(X.base, {i: v for i, v in X.entries.items() if keep(i)},
                          {k: m for k, m in X.q.items() if keep(k[0]) and keep(k[1])})


def inclusion(S: TwistedComplex, X: TwistedComplex) -> TwMorphism:
    """Identity components from a restriction S of X into X."""
    return TwMorphism(S, X, 0, {(i, i): hm_identity(X.base, objs) for i, objs in S.entries.items()})


@dataclass(frozen=True, eq=False)
class Truncation:
    sigma: TwistedComplex       # indices >= n
    phi_n: TwMorphism           # sigma -> X
    phi_step: TwMorphism        # sigma -> sigma_{>= n-1} X
    beta: TwMorphism            # X_{n-1} placed at index n -> sigma


def stupid_truncate(X: TwistedComplex, n: int) -> Truncation:
    sig = restrict(X, lo=n)
    prev = restrict(X, lo=n - 1)
    src = TwistedComplex.single(X.base, X.entry(n - 1), n)
    beta = TwMorphism(src, sig, 0, {(n, j): X.twist(n - 1, j) for j in sig.indices() if X.twist(n - 1, j)})
    return Truncation(sig, inclusion(sig, X), inclusion(sig, prev), beta)


def assemble_from_cones(base: DgCategory, seed, top: int, steps) -> TwistedComplex:
    """Seed objects at index ``top``, then one cone per beta (each with source at index n)."""
    X = TwistedComplex.single(base, seed, top)
    for beta in steps:
        if beta.target != X:
            raise ValueError("beta does not land in the complex built so far")
        X = tw_cone(beta).complex
    return X


# ---------------------------------------------------------------- functoriality

def tw_map(Fn: DgFunctor, X):
    T = Fn.target

    def mp(m):
        return hm_clean({k: Fn.apply(e) for k, e in m.items()})

    if isinstance(X, TwistedComplex):
        return TwistedComplex(T, {i: [Fn.obj(A) for A in v] for i, v in X.entries.items()},
                              {k: mp(m) for k, m in X.q.items()})
    f = X
    return TwMorphism(tw_map(Fn, f.source), tw_map(Fn, f.target), f.degree,
                      {k: mp(m) for k, m in f.components.items()})


# ---------------------------------------------------------------- hom complexes

class TwHomComplex(Complex):
    """Morphisms X -> Y with the MC differential, as a complex of vector spaces.

    With ``one_sided=True`` the degree p part is spanned by the slots with
    i - j + p <= 0, where slots of inner degree 0 are restricted to cocycles
    (without that the differential would leave the space).  With
    ``one_sided=False`` every slot is allowed.

    Basis order: slots (i, j) sorted, then target position, source position,
    then the hom basis (or the cocycle basis for restricted slots).
    """

    def __init__(self, X: TwistedComplex, Y: TwistedComplex, one_sided=True, degrees=None):
        self.X, self.Y, self.one_sided = X, Y, one_sided
        q = X.base
        self.base = q
        self.field = q.field
        self._zbasis = {}
        ps = set()
        for i, j in itertools.product(X.indices(), Y.indices()):
            for a in X.entry(i):
                for b in Y.entry(j):
                    for k in q.hom_degrees(a, b):
                        p = k - i + j
                        if one_sided and k > 0:
                            continue
                        ps.add(p)
        if degrees is not None:
            ps &= set(degrees)
        self.layout = {p: self._layout(p) for p in sorted(ps)}
        self.layout = {p: v for p, v in self.layout.items() if v[1]}
        dims = {p: v[1] for p, v in self.layout.items()}
        d = {}
        for p in self.layout:
            if p + 1 in self.layout:
                d[p] = self._diff_matrix(p)
        super().__init__(q.field, dims, d)

    def _cocycles(self, a, b):
        key = (a, b)
        if key not in self._zbasis:
            cx = self.base.hom_complex(a, b)
            basis = kernel_basis(cx.diff(0)) if cx.dim(0) and cx.dim(1) else \
                [[self.field.one if r == c else self.field.zero for r in range(cx.dim(0))] for c in range(cx.dim(0))]
            free = []
            for k, vec in enumerate(basis):
                for t, v in enumerate(vec):
                    if v == 1 and all(o[t] == 0 for o2, o in enumerate(basis) if o2 != k):
                        free.append(t)
                        break
            self._zbasis[key] = (basis, free)
        return self._zbasis[key]

    def _layout(self, p):
        X, Y, q = self.X, self.Y, self.base
        blocks, off = [], 0
        for i in X.indices():
            for j in Y.indices():
                k = i - j + p
                if self.one_sided and k > 0:
                    continue
                for r, b in enumerate(Y.entry(j)):
                    for c, a in enumerate(X.entry(i)):
                        if self.one_sided and k == 0:
                            size = len(self._cocycles(a, b)[0])
                        else:
                            size = len(q.hom_basis(a, b, k))
                        if size:
                            blocks.append(((i, j, r, c), k, a, b, off, size))
                            off += size
        return blocks, off

    def decode(self, p, vec) -> TwMorphism:
        q = self.base
        comps = {}
        blocks, _ = self.layout.get(p, ([], 0))
        for (i, j, r, c), k, a, b, off, size in blocks:
            part = vec[off:off + size]
            if not any(part):
                continue
            if self.one_sided and k == 0:
                basis, _ = self._cocycles(a, b)
                full = [self.field.zero] * len(q.hom_basis(a, b, 0))
                for coef, bv in zip(part, basis):
                    if coef:
                        full = [self.field.norm(x + coef * y) for x, y in zip(full, bv)]
                e = q.from_vec(full, a, b, 0)
            else:
                e = q.from_vec(part, a, b, k)
            if e:
                comps.setdefault((i, j), {})[(r, c)] = e
        return TwMorphism(self.X, self.Y, p, comps)

    def encode(self, f: TwMorphism) -> list:
        q, p = self.base, f.degree
        blocks, total = self.layout.get(p, ([], 0))
        vec = [self.field.zero] * total
        seen = set()
        for (i, j, r, c), k, a, b, off, size in blocks:
            e = f.comp(i, j).get((r, c))
            if not e:
                continue
            seen.add((i, j, r, c))
            full = q.to_vec(e, a, b, k)
            if self.one_sided and k == 0:
                basis, free = self._cocycles(a, b)
                part = [full[t] for t in free]
                # verify the element really is a cocycle combination
                chk = [self.field.zero] * len(full)
                for coef, bv in zip(part, basis):
                    if coef:
                        chk = [self.field.norm(x + coef * y) for x, y in zip(chk, bv)]
                if chk != full:
                    raise ValueError(f"slot {(i, j)} of inner degree 0 is not a cocycle")
            else:
                part = full
            vec[off:off + size] = part
        for (i, j), m in f.components.items():
            for (r, c) in m:
                if (i, j, r, c) not in seen:
                    raise ValueError(f"morphism has a component outside the complex at {(i, j)}")
        return vec

    def _diff_matrix(self, p):
        blocks, n = self.layout[p]
        cols = []
        for t in range(n):
            e = [self.field.zero] * n
            e[t] = self.field.one
            df = tw_differential(self.decode(p, e))
            cols.append(self.encode(df))
        return Matrix.from_columns(self.field, self.layout[p + 1][1], cols)


def tw_hom_complex(X, Y, degrees=None) -> TwHomComplex:
    return TwHomComplex(X, Y, True, degrees)


def mc_hom_complex(X, Y, degrees=None) -> TwHomComplex:
    return TwHomComplex(X, Y, False, degrees)


# ---------------------------------------------------------------- totalization

class TotLayout:
    """Basis of Tot(X)(B)^n: blocks (index j, position b) in order, each a hom basis."""

    def __init__(self, X: TwistedComplex):
        self.X = X
        q = X.base
        self.blocks = {}
        for B in q.objects:
            per = {}
            for j in X.indices():
                for b, A in enumerate(X.entry(j)):
                    for k in q.hom_degrees(B, A):
                        size = len(q.hom_basis(B, A, k))
                        per.setdefault(k + j, []).append((j, b, A, size))
            out = {}
            for n, lst in per.items():
                off, blocks = 0, []
                for j, b, A, size in lst:
                    blocks.append((j, b, A, off, size))
                    off += size
                out[n] = (blocks, off)
            self.blocks[B] = out

    def dim(self, B, n):
        return self.blocks[B].get(n, ([], 0))[1]

    def sizes(self, B, n):
        return [blk[4] for blk in self.blocks[B].get(n, ([], 0))[0]]

    def keyed(self, B, n):
        return {(blk[0], blk[1]): blk for blk in self.blocks[B].get(n, ([], 0))[0]}


def _hm_block_matrix(q, m_src: TotLayout, m_tgt: TotLayout, B, n, shift_deg, comp_of, diag=None):
    """Assemble Tot(source)(B)^n -> Tot(target)(B)^{n+shift_deg} from per-slot hom matrices.

    comp_of(i, j) gives the hom matrix from index i to index j; ``diag`` is
    an optional extra (j, b) -> Matrix for the diagonal blocks.
    """
    F = q.field
    src_blocks = m_src.blocks[B].get(n, ([], 0))[0]
    tgt_blocks = m_tgt.blocks[B].get(n + shift_deg, ([], 0))[0]
    tindex = {(blk[0], blk[1]): t for t, blk in enumerate(tgt_blocks)}
    blocks = {}
    for s, (i, a, A, off, size) in enumerate(src_blocks):
        if diag is not None:
            m = diag(i, a, A)
            if m is not None and (i, a) in tindex:
                blocks[(tindex[(i, a)], s)] = m
        for j in m_tgt.X.indices():
            hm = comp_of(i, j)
            if not hm:
                continue
            for (b, c), e in hm.items():
                if c != a or (j, b) not in tindex:
                    continue
                M = q.postcomp_matrix(e, B, n - i)
                t = tindex[(j, b)]
                blocks[(t, s)] = blocks[(t, s)] + M if (t, s) in blocks else M
    return Matrix.block(F, [blk[4] for blk in tgt_blocks], [blk[4] for blk in src_blocks], blocks)


def totalize(X: TwistedComplex, layout: TotLayout | None = None) -> DgModule:
    q, F = X.base, X.base.field
    L = layout or TotLayout(X)
    values = {}
    for B in q.objects:
        dims = {n: v[1] for n, v in L.blocks[B].items()}
        d = {}
        for n in dims:
            if dims.get(n + 1):
                d[n] = _hm_block_matrix(
                    q, L, L, B, n, 1, X.twist,
                    diag=lambda j, b, A, B=B, n=n: q.hom_complex(B, A).diff(n - j).scale(F.sign(j))
                    if q.hom_complex(B, A).dim(n - j + 1) else None)
        values[B] = Complex(F, dims, d)
    action = {}
    for g, be in q.elts.items():
        A, B, e = be.source, be.target, be.deg
        comps = {}
        for n, (blocks, total) in L.blocks[B].items():
            tgt = L.keyed(A, n + e)
            tb = L.blocks[A].get(n + e, ([], 0))[0]
            tpos = {(blk[0], blk[1]): t for t, blk in enumerate(tb)}
            mats = {}
            s = F.sign(e * n)
            for sidx, (j, b, Xjb, off, size) in enumerate(blocks):
                if (j, b) in tpos:
                    M = q.precomp_matrix(g, Xjb, n - j)
                    if not M.is_zero():
                        mats[(tpos[(j, b)], sidx)] = M.scale(s)
            comps[n] = Matrix.block(F, [blk[4] for blk in tb], [blk[4] for blk in blocks], mats)
        action[g] = ChainMap(values[B], values[A], e, comps)
    return DgModule(q, values, action)


def totalize_map(f: TwMorphism, TX: DgModule | None = None, TY: DgModule | None = None) -> ModuleMap:
    X, Y, q = f.source, f.target, f.base
    LX, LY = TotLayout(X), TotLayout(Y)
    TX = TX or totalize(X, LX)
    TY = TY or totalize(Y, LY)
    comps = {}
    for B in q.objects:
        cm = {}
        for n in LX.blocks[B]:
            cm[n] = _hm_block_matrix(q, LX, LY, B, n, f.degree, f.comp)
        comps[B] = ChainMap(TX.values[B], TY.values[B], f.degree, cm)
    return ModuleMap(TX, TY, f.degree, comps)


# ---------------------------------------------------------------- one-sided reduction

class NotReducible(Exception):
    def __init__(self, degree, slot):
        super().__init__(f"coboundary equation unsolvable in inner degree {degree} at slot {slot}")
        self.degree = degree
        self.slot = slot


@dataclass
class Reduction:
    g: TwMorphism
    alpha: TwMorphism
    thresholds: dict          # source index i -> n_i
    report: Report


def make_one_sided(f: TwMorphism) -> Reduction:
    """Find alpha of degree p-1 with f - d(alpha) one-sided.

    Source indices are handled from the top down and, for each, target
    indices upward, so every term on the right of the slot equation is
    already known when that slot is solved.
    """
    X, Y, p, q = f.source, f.target, f.degree, f.base
    F = q.field
    rep = Report("one-sided reduction")
    if not tw_differential(f).one_sided:
        raise ValueError("d(f) must be one-sided")
    alpha = {}
    thresholds = {}
    prev = None
    for i in sorted(X.indices(), reverse=True):
        ks = [k for k in Y.indices() if i - k + p > 0]
        nonzero = [k for k in Y.indices() if f.comp(i, k)]
        cand = [i - 1] + ([prev] if prev is not None else []) + nonzero
        thresholds[i] = min(cand)
        prev = thresholds[i]
        for k in sorted(ks):
            # rhs = f_i^k - r_s^k alpha_i^s + (-1)^{p-1} alpha_s^k q_i^s
            rhs = dict(f.comp(i, k))
            for s in Y.indices():
                if (s, k) in Y.q and (i, s) in alpha:
                    rhs = hm_add(q, rhs, hm_compose(q, Y.q[(s, k)], alpha[(i, s)]), -1)
            for s in X.indices():
                if (i, s) in X.q and (s, k) in alpha:
                    rhs = hm_add(q, rhs, hm_compose(q, alpha[(s, k)], X.q[(i, s)]), F.sign(p - 1))
            if not rhs:
                continue
            deg = i - k + p
            sol = {}
            for (r, c), e in rhs.items():
                a, b = X.entry(i)[c], Y.entry(k)[r]
                cx = q.hom_complex(a, b)
                target = q.scale(e, F.sign(k))
                if not cx.dim(deg - 1):
                    raise NotReducible(deg, (i, k))
                v = solve_particular(cx.diff(deg - 1), q.to_vec(target, a, b, deg))
                if v is NoSolution:
                    raise NotReducible(deg, (i, k))
                el = q.from_vec(v, a, b, deg - 1)
                if el:
                    sol[(r, c)] = el
            if sol:
                alpha[(i, k)] = sol
    A = TwMorphism(X, Y, p - 1, alpha)
    g = f - tw_differential(A)
    rep.add("g one-sided", g.one_sided, "" if g.one_sided else f"violations at {g.violating_slots()}")
    rep.add("f - d(alpha) = g", f - tw_differential(A) == g)
    return Reduction(g, A, thresholds, rep)


def certify_reduction(f: TwMorphism, red: Reduction) -> Report:
    """Module-level check: Tot f - Tot g = d(Tot alpha), so [Tot f] = [Tot g]."""
    rep = Report("reduction certificate")
    TX, TY = totalize(f.source), totalize(f.target)
    Tf = totalize_map(f, TX, TY)
    Tg = totalize_map(red.g, TX, TY)
    Ta = totalize_map(red.alpha, TX, TY)
    rep.add("Tot f - Tot g = d Tot alpha", Tf - Tg == module_map_differential(Ta))
    if is_closed(f):
        rep.add("g closed", is_closed(red.g))
    return rep


# ---------------------------------------------------------------- serialization

def twisted_to_dict(X: TwistedComplex, base_ref=None) -> dict:
    F = X.base.field
    fmt = lambda e: [[n, F.fmt(c)] for n, c in e.items()]

    def mat(m, nr, nc):
        return [[fmt(m.get((r, c), {})) for c in range(nc)] for r in range(nr)]
    out = {"format": 1}
    if base_ref is not None:
        out["base"] = base_ref
    out["entries"] = {str(i): list(v) for i, v in X.entries.items()}
    out["q"] = {f"{i}->{j}": mat(m, len(X.entry(j)), len(X.entry(i))) for (i, j), m in sorted(X.q.items())}
    return out


def twisted_from_dict(base: DgCategory, data: dict) -> TwistedComplex:
    if data.get("format", 1) != 1:
        raise ValueError("unsupported format")
    entries = {int(i): v for i, v in data.get("entries", {}).items()}
    qq = {}
    for key, rows in data.get("q", {}).items():
        i, j = (int(x) for x in key.split("->"))
        m = {}
        for r, row in enumerate(rows):
            for c, e in enumerate(row):
                el = base._elem([(n, base.field(v)) for n, v in e])
                if el:
                    m[(r, c)] = el
        qq[(i, j)] = m
    return TwistedComplex(base, entries, qq)


def morphism_to_dict(f: TwMorphism) -> dict:
    F = f.base.field
    fmt = lambda e: [[n, F.fmt(c)] for n, c in e.items()]
    comps = {}
    for (i, j), m in sorted(f.components.items()):
        nr, nc = len(f.target.entry(j)), len(f.source.entry(i))
        comps[f"{i}->{j}"] = [[fmt(m.get((r, c), {})) for c in range(nc)] for r in range(nr)]
    return {"format": 1, "degree": f.degree, "components": comps}


def morphism_from_dict(X, Y, data) -> TwMorphism:
    base = X.base
    comps = {}
    for key, rows in data.get("components", {}).items():
        i, j = (int(x) for x in key.split("->"))
        m = {}
        for r, row in enumerate(rows):
            for c, e in enumerate(row):
                el = base._elem([(n, base.field(v)) for n, v in e])
                if el:
                    m[(r, c)] = el
        comps[(i, j)] = m
    return TwMorphism(X, Y, int(data["degree"]), comps)


def tot_cone_comparison(f: TwMorphism, cone_result: "TwCone | None" = None):
    """Permutation Tot(cone f) -> cone(Tot f) matching basis blocks, and a report.

    An X entry at cone index j-1 is the block (j, b) of Tot X one degree up,
    a Y entry at index j is the block (j, len(X_{j+1}) + b) of Tot Y.
    The report checks that the permutation commutes with d and the action
    exactly, so the two modules agree after relabelling.
    """
    from .dg_module import is_closed_map, is_natural, module_cone
    X, Y, q = f.source, f.target, f.base
    F = q.field
    tc = cone_result or tw_cone(f)
    C = tc.complex
    LC, LX, LY = TotLayout(C), TotLayout(X), TotLayout(Y)
    TX, TY = totalize(X, LX), totalize(Y, LY)
    mc = module_cone(totalize_map(f, TX, TY))
    TC = totalize(C, LC)
    comps = {}
    perm_ok = True
    for B in q.objects:
        cm = {}
        for m, (blocks, total) in LC.blocks[B].items():
            xoff = LX.dim(B, m + 1)
            tgt_dim = xoff + LY.dim(B, m)
            entries = {}
            kx, ky = LX.keyed(B, m + 1), LY.keyed(B, m)
            for (i, b, A, off, size) in blocks:
                nx = len(X.entry(i + 1))
                if b < nx:
                    start = kx[(i + 1, b)][3]
                else:
                    start = xoff + ky[(i, b - nx)][3]
                for s in range(size):
                    entries[(start + s, off + s)] = F.one
            perm_ok = perm_ok and total == tgt_dim and len({r for r, _ in entries}) == total
            cm[m] = Matrix(F, tgt_dim, total, entries)
        comps[B] = ChainMap(TC.values[B], mc.module.values[B], 0, cm)
    P = ModuleMap(TC, mc.module, 0, comps)
    rep = Report("Tot(cone) = cone(Tot)")
    rep.add("bijection on bases", perm_ok)
    rep.add("commutes with d", is_closed_map(P))
    rep.add("commutes with the action", is_natural(P))
    return P, rep
