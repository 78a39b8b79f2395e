"""Exact arithmetic over Q and F_p, plus the linear solvers everything else uses.

Matrices are stored sparsely as a tuple of row dictionaries.  Row reduction
picks a backend by size and field: a dense pure-Python routine for small
matrices, a numpy routine for large matrices over a prime field, and a sparse
incremental routine otherwise.  All three produce the same reduced row
echelon form.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DENSE_THRESHOLD = 64 * 64


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for k in range(3, math.isqrt(n) + 1, 2):
        if n % k == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either the rationals (``kind='rational'``) or F_p (``kind='prime'``)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.p is not None:
                raise ValueError("rational field takes no modulus")
        elif self.kind == "prime":
            if self.p is None or not _is_prime(self.p):
                raise ValueError(f"modulus {self.p!r} is not prime")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls("rational")

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        return cls("prime", p)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Accepts ``Q``, ``QQ``, ``rational``, ``F101``, ``F_101``, ``GF(101)``."""
        t = text.strip().replace(" ", "")
        if t.upper() in ("Q", "QQ", "RATIONAL"):
            return cls.rational()
        for prefix in ("F_", "F", "GF(", "GF"):
            if t.upper().startswith(prefix):
                digits = t[len(prefix):].rstrip(")")
                if digits.isdigit():
                    return cls.prime(int(digits))
        raise ValueError(f"cannot parse field {text!r}")

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    @property
    def zero(self):
        return 0 if self.is_prime else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime else Fraction(1)

    def __call__(self, x):
        """Coerce an int, Fraction or canonical string into the field."""
        if isinstance(x, str):
            return self.parse_element(x)
        if self.is_prime:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def norm(self, x):
        return x % self.p if self.is_prime else x

    def inv(self, x):
        if self.is_zero(x):
            raise ZeroDivisionError("inverse of zero")
        if self.is_prime:
            return pow(x, self.p - 2, self.p)
        return 1 / x

    def is_zero(self, x) -> bool:
        return x == 0

    def sign(self, k: int):
        """(-1)^k as a field element."""
        return self.one if k % 2 == 0 else self.norm(-self.one)

    def parse_element(self, s: str):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/")
            return self(Fraction(int(num), int(den)))
        return self(int(s))

    def fmt(self, x) -> str:
        if self.is_prime:
            return str(int(x))
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def random_element(self, rng, nonzero: bool = False, bound: int = 3):
        """Small random element: uniform over F_p, or a small integer over Q."""
        while True:
            if self.is_prime:
                x = rng.randrange(self.p)
            else:
                x = Fraction(rng.randint(-bound, bound))
            if not nonzero or x != 0:
                return x

    def __str__(self):
        return "Q" if not self.is_prime else f"F{self.p}"


def default_field(fallback: FieldSpec | None = None) -> FieldSpec:
    """Field for randomized suites: ``$DGKIT_FIELD`` if set, else F_101."""
    env = os.environ.get("DGKIT_FIELD")
    if env:
        return FieldSpec.parse(env)
    return fallback if fallback is not None else FieldSpec.prime(101)


class _NoSolution:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NoSolution"

    def __bool__(self):
        return False


NoSolution = _NoSolution()


class Matrix:
    """Immutable sparse matrix over a FieldSpec."""

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field: FieldSpec, nrows: int, ncols: int, entries=None, _rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if _rows is not None:
            self._rows = _rows
            return
        rows = [dict() for _ in range(nrows)]
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise IndexError(f"entry {(r, c)} outside {nrows}x{ncols}")
                v = field(v)
                if v != 0:
                    rows[r][c] = v
        self._rows = tuple(rows)

    # construction
    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, nrows, ncols, _rows=tuple({} for _ in range(nrows)))

    @classmethod
    def identity(cls, field, n, scale=None):
        s = field.one if scale is None else field(scale)
        if s == 0:
            return cls.zeros(field, n, n)
        return cls(field, n, n, _rows=tuple({i: s} for i in range(n)))

    @classmethod
    def from_dense(cls, field, rows: Sequence[Sequence], ncols: int | None = None):
        rows = list(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        out = []
        for row in rows:
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            d = {}
            for c, v in enumerate(row):
                v = field(v)
                if v != 0:
                    d[c] = v
            out.append(d)
        return cls(field, len(out), ncols, _rows=tuple(out))

    @classmethod
    def from_row_dicts(cls, field, rows, ncols):
        return cls(field, len(rows), ncols, _rows=tuple(dict(r) for r in rows))

    @classmethod
    def from_columns(cls, field, nrows: int, cols: Sequence[Sequence]):
        rows = [dict() for _ in range(nrows)]
        for c, col in enumerate(cols):
            if len(col) != nrows:
                raise ValueError("column length mismatch")
            for r, v in enumerate(col):
                if v != 0:
                    rows[r][c] = v
        return cls(field, nrows, len(cols), _rows=tuple(rows))

    @classmethod
    def block(cls, field, row_sizes, col_sizes, blocks: dict):
        """Assemble from ``{(bi, bj): Matrix}``; missing blocks are zero."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        coff = [0]
        for s in col_sizes:
            coff.append(coff[-1] + s)
        rows = [dict() for _ in range(roff[-1])]
        for (bi, bj), m in blocks.items():
            if m.nrows != row_sizes[bi] or m.ncols != col_sizes[bj]:
                raise ValueError(f"block {(bi, bj)} has shape {m.shape}")
            for r, row in enumerate(m._rows):
                tgt = rows[roff[bi] + r]
                for c, v in row.items():
                    tgt[coff[bj] + c] = v
        return cls(field, roff[-1], coff[-1], _rows=tuple(rows))

    # access
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def entries(self) -> dict:
        return {(r, c): v for r, row in enumerate(self._rows) for c, v in row.items()}

    def row(self, r) -> dict:
        return self._rows[r]

    def __getitem__(self, rc):
        r, c = rc
        return self._rows[r].get(c, self.field.zero)

    def to_dense(self) -> list[list]:
        z = self.field.zero
        return [[row.get(c, z) for c in range(self.ncols)] for row in self._rows]

    def column(self, c) -> list:
        z = self.field.zero
        return [row.get(c, z) for row in self._rows]

    def columns(self) -> list[list]:
        return [self.column(c) for c in range(self.ncols)]

    def is_zero(self) -> bool:
        return not any(self._rows)

    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    # algebra
    def transpose(self):
        rows = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                rows[c][r] = v
        return Matrix(self.field, self.ncols, self.nrows, _rows=tuple(rows))

    def scale(self, s):
        F = self.field
        s = F(s)
        if s == 0:
            return Matrix.zeros(F, self.nrows, self.ncols)
        return Matrix(F, self.nrows, self.ncols,
                      _rows=tuple({c: F.norm(v * s) for c, v in row.items()} for row in self._rows))

    def __neg__(self):
        return self.scale(-1)

    def _combine(self, other, sgn):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        F = self.field
        out = []
        for a, b in zip(self._rows, other._rows):
            d = dict(a)
            for c, v in b.items():
                w = F.norm(d.get(c, 0) + sgn * v)
                if w == 0:
                    d.pop(c, None)
                else:
                    d[c] = w
            out.append(d)
        return Matrix(F, self.nrows, self.ncols, _rows=tuple(out))

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __matmul__(self, other):
        F = self.field
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            orows = other._rows
            out = []
            for row in self._rows:
                acc = {}
                for k, a in row.items():
                    for c, b in orows[k].items():
                        acc[c] = acc.get(c, 0) + a * b
                out.append({c: w for c, v in acc.items() if (w := F.norm(v)) != 0})
            return Matrix(F, self.nrows, other.ncols, _rows=tuple(out))
        vec = list(other)
        if len(vec) != self.ncols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape}")
        return [F.norm(sum((v * vec[c] for c, v in row.items()), F.zero)) for row in self._rows]

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.shape == other.shape
                and self.field == other.field and self._rows == other._rows)

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols}, {self.to_dense()})"


# ---------------------------------------------------------------- row reduction

def _rref_sparse(rows: list[dict], ncols: int, F: FieldSpec):
    """Incremental reduction; returns (pivot_rows, pivots) in increasing pivot order."""
    piv: dict[int, dict] = {}
    norm = F.norm
    for row in rows:
        r = dict(row)
        # pivot rows vanish on other pivot columns, so one pass suffices
        for c in [c for c in r if c in piv]:
            a = r.get(c)
            if not a:
                continue
            for cc, v in piv[c].items():
                w = norm(r.get(cc, 0) - a * v)
                if w == 0:
                    r.pop(cc, None)
                else:
                    r[cc] = w
        if not r:
            continue
        lead = min(r)
        inv = F.inv(r[lead])
        r = {c: norm(v * inv) for c, v in r.items()}
        for c, prow in piv.items():
            a = prow.get(lead)
            if a:
                for cc, v in r.items():
                    w = norm(prow.get(cc, 0) - a * v)
                    if w == 0:
                        prow.pop(cc, None)
                    else:
                        prow[cc] = w
        piv[lead] = r
    order = sorted(piv)
    return [piv[c] for c in order], order


def _rref_dense(rows: list[dict], ncols: int, F: FieldSpec):
    z = F.zero
    A = [[row.get(c, z) for c in range(ncols)] for row in rows]
    norm = F.norm
    pivots = []
    r = 0
    n = len(A)
    for c in range(ncols):
        if r == n:
            break
        k = next((i for i in range(r, n) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        inv = F.inv(A[r][c])
        pr = [norm(v * inv) for v in A[r]]
        A[r] = pr
        for i in range(n):
            if i != r and A[i][c] != 0:
                a = A[i][c]
                Ai = A[i]
                A[i] = [norm(x - a * y) for x, y in zip(Ai, pr)]
        pivots.append(c)
        r += 1
    out = [{c: v for c, v in enumerate(A[i]) if v != 0} for i in range(r)]
    return out, pivots


def _rref_numpy(rows: list[dict], ncols: int, F: FieldSpec):
    p = F.p
    n = len(rows)
    A = np.zeros((n, ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            A[i, c] = v
    pivots = []
    r = 0
    for c in range(ncols):
        if r == n:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        idx = np.flatnonzero(col)
        if idx.size:
            A[idx] = (A[idx] - np.outer(col[idx], A[r])) % p
        pivots.append(c)
        r += 1
    out = []
    for i in range(r):
        nzc = np.flatnonzero(A[i])
        out.append({int(c): int(A[i, c]) for c in nzc})
    return out, pivots


def rref_rows(rows: list[dict], ncols: int, F: FieldSpec, backend: str | None = None):
    """Reduced row echelon form of a list of sparse rows.

    Returns ``(pivot_rows, pivot_columns)``; pivot entries are 1 and every
    pivot column is zero outside its pivot row.
    """
    if backend is None:
        size = len(rows) * ncols
        if size <= DENSE_THRESHOLD:
            backend = "dense"
        elif F.is_prime and F.p < 2**31:
            backend = "numpy"
        else:
            backend = "sparse"
    if backend == "dense":
        return _rref_dense(rows, ncols, F)
    if backend == "numpy":
        return _rref_numpy(rows, ncols, F)
    if backend == "sparse":
        return _rref_sparse(rows, ncols, F)
    raise ValueError(f"unknown backend {backend!r}")


def rref(m: Matrix, backend: str | None = None):
    return rref_rows(list(m._rows), m.ncols, m.field, backend)


def rank(m: Matrix) -> int:
    if m.is_zero():
        return 0
    return len(rref(m)[1])


def kernel_basis(m: Matrix) -> list[list]:
    """Basis of {v : m v = 0}; one vector per free column, 1 at that column."""
    F = m.field
    red, pivots = rref(m)
    pset = set(pivots)
    basis = []
    for f in range(m.ncols):
        if f in pset:
            continue
        v = [F.zero] * m.ncols
        v[f] = F.one
        for prow, pc in zip(red, pivots):
            a = prow.get(f)
            if a:
                v[pc] = F.norm(-a)
        basis.append(v)
    return basis


def solve_particular(m: Matrix, b: Sequence):
    """Some v with m v = b, or ``NoSolution``."""
    F = m.field
    if len(b) != m.nrows:
        raise ValueError(f"right-hand side of length {len(b)} for {m.shape}")
    n = m.ncols
    rows = []
    for row, bi in zip(m._rows, b):
        r = dict(row)
        bi = F(bi)
        if bi != 0:
            r[n] = bi
        rows.append(r)
    red, pivots = rref_rows(rows, n + 1, F)
    if pivots and pivots[-1] == n:
        return NoSolution
    v = [F.zero] * n
    for prow, pc in zip(red, pivots):
        v[pc] = prow.get(n, F.zero)
    return v


def quotient_representatives(sub: Iterable[Sequence], ambient_dim: int, field: FieldSpec) -> list[list]:
    """Standard basis vectors whose classes form a basis of ambient/span(sub)."""
    rows = [{c: field(v) for c, v in enumerate(vec) if field(v) != 0} for vec in sub]
    for vec in sub:
        if len(vec) != ambient_dim:
            raise ValueError("vector length differs from ambient dimension")
    _, pivots = rref_rows(rows, ambient_dim, field) if rows else ([], [])
    pset = set(pivots)
    out = []
    for c in range(ambient_dim):
        if c not in pset:
            e = [field.zero] * ambient_dim
            e[c] = field.one
            out.append(e)
    return out


class Subspace:
    """Span of some vectors, kept in reduced echelon form.

    Vectors can be added one at a time.  ``coords(v)`` reads off coordinates
    at the pivot columns, so it is only meaningful for vectors already known
    to lie in the span.
    """

    def __init__(self, field: FieldSpec, dim: int, vectors: Iterable[Sequence] = ()):
        self.field = field
        self.ambient = dim
        self._piv: dict[int, dict] = {}
        vectors = list(vectors)
        if vectors:
            rows = [{c: field(v) for c, v in enumerate(vec) if field(v) != 0} for vec in vectors]
            red, pivots = rref_rows(rows, dim, field)
            self._piv = dict(zip(pivots, red))

    @property
    def pivots(self) -> list[int]:
        return sorted(self._piv)

    @property
    def dim(self) -> int:
        return len(self._piv)

    def basis(self) -> list[list]:
        z = self.field.zero
        return [[self._piv[p].get(c, z) for c in range(self.ambient)] for p in self.pivots]

    def _reduce(self, r: dict) -> dict:
        norm = self.field.norm
        for c in [c for c in r if c in self._piv]:
            a = r.get(c)
            if not a:
                continue
            for cc, v in self._piv[c].items():
                w = norm(r.get(cc, 0) - a * v)
                if w == 0:
                    r.pop(cc, None)
                else:
                    r[cc] = w
        return r

    def reduce(self, vec: Sequence) -> dict:
        return self._reduce({c: self.field(v) for c, v in enumerate(vec) if self.field(v) != 0})

    def contains(self, vec: Sequence) -> bool:
        return not self.reduce(vec)

    def add(self, vec: Sequence) -> bool:
        """Insert ``vec``; False if it was already in the span."""
        r = self.reduce(vec)
        if not r:
            return False
        F = self.field
        lead = min(r)
        inv = F.inv(r[lead])
        r = {c: F.norm(v * inv) for c, v in r.items()}
        for prow in self._piv.values():
            a = prow.get(lead)
            if a:
                for cc, v in r.items():
                    w = F.norm(prow.get(cc, 0) - a * v)
                    if w == 0:
                        prow.pop(cc, None)
                    else:
                        prow[cc] = w
        self._piv[lead] = r
        return True

    def coords(self, vec: Sequence) -> list:
        z = self.field.zero
        return [vec[pc] if pc < len(vec) else z for pc in self.pivots]

    def combine(self, coeffs: Sequence) -> list:
        F = self.field
        out = [F.zero] * self.ambient
        for a, p in zip(coeffs, self.pivots):
            if a:
                for c, v in self._piv[p].items():
                    out[c] = F.norm(out[c] + a * v)
        return out


def vec_add(F, a, b):
    return [F.norm(x + y) for x, y in zip(a, b)]


def vec_sub(F, a, b):
    return [F.norm(x - y) for x, y in zip(a, b)]


def vec_scale(F, s, a):
    return [F.norm(s * x) for x in a]


def is_zero_vec(a) -> bool:
    return all(x == 0 for x in a)
