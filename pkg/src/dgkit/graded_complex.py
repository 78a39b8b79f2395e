"""Bounded cochain complexes of finite-dimensional vector spaces.

Conventions used throughout the package:

* ``d[n]`` maps degree ``n`` to degree ``n+1`` (a ``dims[n+1] x dims[n]`` matrix).
* ``shift(c, n)`` has ``dims[i] = c.dims[i+n]`` and differential ``(-1)^n d``.
* The hom complex differential is ``D(f) = d_b f - (-1)^p f d_a`` for ``f`` of degree ``p``.
* ``cone(f)^n = a^{n+1} (+) b^n`` with ``D(x, y) = (-d x, f x + d y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exact_field import FieldSpec, Matrix, NoSolution, Subspace, kernel_basis, rank, solve_particular


class Complex:
    """A bounded cochain complex; missing degrees are zero."""

    def __init__(self, field: FieldSpec, dims: dict, d: dict | None = None):
        self.field = field
        self.dims = {int(k): int(v) for k, v in dims.items() if v}
        if any(v < 0 for v in self.dims.values()):
            raise ValueError("negative dimension")
        self.d = {}
        for n, m in (d or {}).items():
            n = int(n)
            if m.shape != (self.dim(n + 1), self.dim(n)):
                raise ValueError(f"d[{n}] has shape {m.shape}, expected {(self.dim(n + 1), self.dim(n))}")
            if not m.is_zero():
                self.d[n] = m

    def dim(self, n: int) -> int:
        return self.dims.get(n, 0)

    def diff(self, n: int) -> Matrix:
        m = self.d.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.dim(n + 1), self.dim(n))
        return m

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def bounds(self):
        ds = self.degrees()
        return (ds[0], ds[-1]) if ds else (0, -1)

    def __eq__(self, other):
        return (isinstance(other, Complex) and self.field == other.field
                and self.dims == other.dims and self.d == other.d)

    def __repr__(self):
        return f"Complex({self.field}, dims={dict(sorted(self.dims.items()))})"

    @classmethod
    def zero(cls, field):
        return cls(field, {})


def validate_complex(c: Complex):
    """``(True, None)`` or ``(False, message)`` naming the first degree with d^2 != 0."""
    for n in c.degrees():
        if c.dim(n + 1) and c.dim(n + 2):
            prod = c.diff(n + 1) @ c.diff(n)
            if not prod.is_zero():
                return False, f"d^{n + 1} d^{n} != 0: {prod.to_dense()}"
    return True, None


def direct_sum(*cs: Complex) -> Complex:
    F = cs[0].field
    degs = sorted(set().union(*(c.dims for c in cs)))
    dims = {n: sum(c.dim(n) for c in cs) for n in degs}
    d = {}
    for n in degs:
        if dims.get(n + 1):
            d[n] = Matrix.block(F, [c.dim(n + 1) for c in cs], [c.dim(n) for c in cs],
                                {(k, k): c.diff(n) for k, c in enumerate(cs)})
    return Complex(F, dims, d)


def shift(c: Complex, n: int) -> Complex:
    s = c.field.sign(n)
    return Complex(c.field, {i - n: v for i, v in c.dims.items()},
                   {i - n: m.scale(s) for i, m in c.d.items()})


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Graded map of degree ``degree``; ``components[n]`` goes from degree n to n+degree."""

    source: Complex
    target: Complex
    degree: int
    components: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for n, m in self.components.items():
            n = int(n)
            want = (self.target.dim(n + self.degree), self.source.dim(n))
            if m.shape != want:
                raise ValueError(f"component {n} has shape {m.shape}, expected {want}")
            if not m.is_zero():
                clean[n] = m
        object.__setattr__(self, "components", clean)

    @property
    def field(self):
        return self.source.field

    def comp(self, n: int) -> Matrix:
        m = self.components.get(n)
        if m is None:
            return Matrix.zeros(self.field, self.target.dim(n + self.degree), self.source.dim(n))
        return m

    def is_zero(self) -> bool:
        return not self.components

    def __add__(self, other):
        _same_shape(self, other)
        ns = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target, self.degree, {n: self.comp(n) + other.comp(n) for n in ns})

    def __sub__(self, other):
        _same_shape(self, other)
        ns = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target, self.degree, {n: self.comp(n) - other.comp(n) for n in ns})

    def scale(self, s):
        return ChainMap(self.source, self.target, self.degree, {n: m.scale(s) for n, m in self.components.items()})

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Plain composition self o other (no signs)."""
        if other.target.dims != self.source.dims:
            raise ValueError("composition of incompatible maps")
        comps = {}
        for n, m in other.components.items():
            g = self.components.get(n + other.degree)
            if g is not None:
                comps[n] = g @ m
        return ChainMap(other.source, self.target, self.degree + other.degree, comps)

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.degree == other.degree
                and self.source == other.source and self.target == other.target
                and self.components == other.components)

    def __repr__(self):
        return f"ChainMap(deg={self.degree}, {dict(sorted(self.components.items()))})"

    @classmethod
    def identity(cls, c: Complex):
        return cls(c, c, 0, {n: Matrix.identity(c.field, k) for n, k in c.dims.items()})

    @classmethod
    def zero(cls, a, b, degree=0):
        return cls(a, b, degree, {})


def _same_shape(f, g):
    if f.degree != g.degree or f.source.dims != g.source.dims or f.target.dims != g.target.dims:
        raise ValueError("maps differ in degree or shape")


def differential(f: ChainMap) -> ChainMap:
    """Hom-complex differential d_b f - (-1)^p f d_a."""
    a, b, p = f.source, f.target, f.degree
    s = f.field.sign(p)
    comps = {}
    for n in set(a.dims) | {n - 1 for n in f.components}:
        m = b.diff(n + p) @ f.comp(n) - (f.comp(n + 1) @ a.diff(n)).scale(s)
        comps[n] = m
    return ChainMap(a, b, p + 1, comps)


def is_closed(f: ChainMap) -> bool:
    return differential(f).is_zero()


def sigma(c: Complex, n: int = 1) -> ChainMap:
    """Shifted identity c[n] -> c of degree n, the identity matrix in every degree."""
    src = shift(c, n)
    return ChainMap(src, c, n, {i - n: Matrix.identity(c.field, k) for i, k in c.dims.items()})


def shift_map(f: ChainMap, n: int) -> ChainMap:
    """f[n]: a[n] -> b[n], conjugated by shifted identities (sign (-1)^{n p})."""
    s = f.field.sign(n * f.degree)
    return ChainMap(shift(f.source, n), shift(f.target, n), f.degree,
                    {i - n: m.scale(s) for i, m in f.components.items()})


@dataclass(frozen=True, eq=False)
class Cone:
    complex: Complex
    i: ChainMap      # a[1] -> cone
    j: ChainMap      # b -> cone
    p: ChainMap      # cone -> a[1]
    s: ChainMap      # cone -> b
    sigma: ChainMap  # a[1] -> a, degree 1


def cone(f: ChainMap) -> Cone:
    if f.degree != 0:
        raise ValueError("cone needs a degree 0 map")
    if not is_closed(f):
        raise ValueError("cone needs a closed map")
    a, b, F = f.source, f.target, f.field
    degs = sorted({n - 1 for n in a.dims} | set(b.dims))
    dims = {n: a.dim(n + 1) + b.dim(n) for n in degs}
    d = {}
    for n in degs:
        d[n] = Matrix.block(F, [a.dim(n + 2), b.dim(n + 1)], [a.dim(n + 1), b.dim(n)],
                            {(0, 0): -a.diff(n + 1), (1, 0): f.comp(n + 1), (1, 1): b.diff(n)})
    c = Complex(F, dims, d)
    a1 = shift(a, 1)
    i_c, j_c, p_c, s_c = {}, {}, {}, {}
    for n in degs:
        na, nb = a.dim(n + 1), b.dim(n)
        i_c[n] = Matrix.block(F, [na, nb], [na], {(0, 0): Matrix.identity(F, na)})
        j_c[n] = Matrix.block(F, [na, nb], [nb], {(1, 0): Matrix.identity(F, nb)})
        p_c[n] = Matrix.block(F, [na], [na, nb], {(0, 0): Matrix.identity(F, na)})
        s_c[n] = Matrix.block(F, [nb], [na, nb], {(0, 1): Matrix.identity(F, nb)})
    return Cone(c, ChainMap(a1, c, 0, i_c), ChainMap(b, c, 0, j_c),
                ChainMap(c, a1, 0, p_c), ChainMap(c, b, 0, s_c), sigma(a, 1))


class HomComplex(Complex):
    """hom(a, b) with an explicit basis: per degree p, blocks n ascending, each row-major."""

    def __init__(self, a: Complex, b: Complex):
        self.a, self.b = a, b
        F = a.field
        self.layout = {}
        ps = sorted({m - n for n in a.dims for m in b.dims})
        for p in ps:
            off, blocks = 0, []
            for n in a.degrees():
                r, c = b.dim(n + p), a.dim(n)
                if r:
                    blocks.append((n, r, c, off))
                    off += r * c
            if off:
                self.layout[p] = (blocks, off)
        dims = {p: v[1] for p, v in self.layout.items()}
        d = {}
        for p in self.layout:
            if p + 1 in self.layout:
                d[p] = self._diff_matrix(p)
        super().__init__(F, dims, d)

    def _offsets(self, p):
        blocks, _ = self.layout.get(p, ([], 0))
        return {n: (r, c, off) for n, r, c, off in blocks}

    def _diff_matrix(self, p):
        a, b, F = self.a, self.b, self.a.field
        src = self._offsets(p)
        tgt = self._offsets(p + 1)
        ncols = self.layout[p][1]
        nrows = self.layout[p + 1][1]
        s = F.sign(p + 1)  # coefficient of f d_a is -(-1)^p
        rows = [dict() for _ in range(nrows)]
        for n, (r, c, off) in src.items():
            # d_b f_n lands in block n of degree p+1
            if n in tgt:
                db = b.diff(n + p)
                tr, tc, toff = tgt[n]
                for rr in range(r):
                    for r2, v in _col_entries(db, rr):
                        for cc in range(c):
                            col = off + rr * c + cc
                            row = toff + r2 * tc + cc
                            rows[row][col] = F.norm(rows[row].get(col, 0) + v)
            # -(-1)^p f_n d_a^{n-1} lands in block n-1
            if n - 1 in tgt:
                da = a.diff(n - 1)
                tr, tc, toff = tgt[n - 1]
                for cc in range(c):
                    for c2, v in da.row(cc).items():
                        for rr in range(r):
                            col = off + rr * c + cc
                            row = toff + rr * tc + c2
                            rows[row][col] = F.norm(rows[row].get(col, 0) + s * v)
        rows = [{k: v for k, v in row.items() if v != 0} for row in rows]
        return Matrix.from_row_dicts(F, rows, ncols)

    def encode(self, f: ChainMap) -> list:
        F = self.field
        vec = [F.zero] * self.dim(f.degree)
        for n, (r, c, off) in self._offsets(f.degree).items():
            for (rr, cc), v in f.comp(n).entries.items():
                vec[off + rr * c + cc] = v
        return vec

    def decode(self, p: int, vec) -> ChainMap:
        comps = {}
        for n, (r, c, off) in self._offsets(p).items():
            ent = {(k // c, k % c): vec[off + k] for k in range(r * c) if vec[off + k] != 0}
            if ent:
                comps[n] = Matrix(self.field, r, c, ent)
        return ChainMap(self.a, self.b, p, comps)


def _col_entries(m: Matrix, c: int):
    return [(r, row[c]) for r, row in enumerate(m._rows) if c in row]


def hom_complex(a: Complex, b: Complex) -> HomComplex:
    return HomComplex(a, b)


@dataclass
class Cohomology:
    degree: int
    dim: int
    representatives: list


def cocycles(c: Complex, n: int) -> list:
    if not c.dim(n):
        return []
    return kernel_basis(c.diff(n))


def coboundaries(c: Complex, n: int) -> list:
    if not c.dim(n) or not c.dim(n - 1):
        return []
    return [col for col in c.diff(n - 1).columns() if any(col)]


def cohomology(c: Complex, n: int, check: bool = True) -> Cohomology:
    if check:
        ok, msg = validate_complex(c)
        if not ok:
            raise ValueError(f"not a complex: {msg}")
    S = Subspace(c.field, c.dim(n), coboundaries(c, n))
    reps = [z for z in cocycles(c, n) if S.add(z)]
    return Cohomology(n, len(reps), reps)


def cohomology_dim(c: Complex, n: int) -> int:
    if not c.dim(n):
        return 0
    k = c.dim(n) - (rank(c.diff(n)) if c.dim(n + 1) else 0)
    return k - (rank(c.diff(n - 1)) if c.dim(n - 1) else 0)


def betti(c: Complex, lo=None, hi=None) -> dict:
    a, b = c.bounds()
    lo = a if lo is None else lo
    hi = b if hi is None else hi
    return {n: cohomology_dim(c, n) for n in range(lo, hi + 1)}


def induced_rank(f: ChainMap, n: int) -> int:
    """Rank of H^n(f) for a closed map f (target degree n + |f|)."""
    a, b = f.source, f.target
    m = n + f.degree
    S = Subspace(f.field, b.dim(m), coboundaries(b, m))
    base = S.dim
    fm = f.comp(n)
    for z in cocycles(a, n):
        S.add(fm @ z)
    return S.dim - base


class _NotNullHomotopic:
    def __repr__(self):
        return "NotNullHomotopic"

    def __bool__(self):
        return False


NotNullHomotopic = _NotNullHomotopic()


def null_homotopy_witness(f: ChainMap):
    """h of degree |f|-1 with d(h) = f, or ``NotNullHomotopic``."""
    H = HomComplex(f.source, f.target)
    p = f.degree
    if not any(not m.is_zero() for m in f.components.values()):
        return ChainMap(f.source, f.target, p - 1, {})
    if p not in H.layout:
        return NotNullHomotopic
    b = H.encode(f)
    if p - 1 not in H.layout:
        return NotNullHomotopic
    v = solve_particular(H.diff(p - 1), b)
    if v is NoSolution:
        return NotNullHomotopic
    h = H.decode(p - 1, v)
    if differential(h) != f:
        raise AssertionError("homotopy witness failed verification")
    return h


class CohomologyBasis:
    """Chosen cocycle representatives in one degree plus a coordinate solver."""

    def __init__(self, c: Complex, n: int):
        self.complex, self.degree = c, n
        h = cohomology(c, n, check=False)
        self.reps = h.representatives
        self.dim = h.dim
        bnd = coboundaries(c, n)
        if bnd:
            bnd = Subspace(c.field, c.dim(n), bnd).basis()
        self._bnd = bnd
        self._mat = Matrix.from_columns(c.field, c.dim(n), list(self.reps) + list(bnd)) if self.reps else None

    def coords(self, z) -> list:
        """Coordinates of the class of cocycle z."""
        if not self.reps:
            return []
        v = solve_particular(self._mat, z)
        if v is NoSolution:
            raise ValueError("vector is not a cocycle")
        return v[:self.dim]

    def is_coboundary(self, z) -> bool:
        return not any(self.coords(z))
