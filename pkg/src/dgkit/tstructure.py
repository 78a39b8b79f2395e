"""The standard t-structure on dg-modules, as checks on cohomology.

Aisle membership is read off from H^i: M is in the <= n aisle when H^i(M)
vanishes above n, and in the >= n aisle when it vanishes below n.  Both
directions rely on non-degeneracy, so every verdict says so.  A verdict
is Inconclusive when some degree it depends on is outside the window
where the cohomology is trusted.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .dg_category import DgCategory, H0Category
from .dg_module import (DgModule, H0Module, fp_presentation, h0_module_hom_dim, module_cohomology, module_hom_h,
                        representable_h0, validate_module, yoneda)
from .exact_field import Matrix, Subspace, kernel_basis, quotient_representatives, solve_particular, NoSolution
from .graded_complex import ChainMap, Complex, cohomology_dim, coboundaries, cocycles
from .report import Report


class _Inconclusive:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Inconclusive"

    def __str__(self):
        return "inconclusive"


Inconclusive = _Inconclusive()

NONDEGENERACY = "aisles detected by cohomology (non-degenerate)"


@dataclass
class AisleVerdict:
    side: str
    n: int
    value: object                  # True, False or Inconclusive
    witness: int | None = None     # a degree with H^i != 0 that decides False
    note: str = NONDEGENERACY

    def __str__(self):
        v = self.value if self.value is Inconclusive else ("true" if self.value else "false")
        w = f" (H^{self.witness} != 0)" if self.witness is not None else ""
        return f"{self.side} {self.n}: {v}{w}"


def cohomology_dims(M: DgModule, degrees) -> dict:
    return {i: sum(cohomology_dim(M.values[A], i) for A in M.base.objects) for i in degrees}


def _known(M, window):
    """Predicate on degrees whose cohomology is trusted."""
    lo, hi = M.bounds()
    if window is None:
        return lambda i: True
    wlo, whi = window
    return lambda i: wlo <= i <= whi or i < lo or i > hi


def aisle_check(M: DgModule, n: int, side: str = "leq", window=None) -> AisleVerdict:
    """Is M in the <= n (side 'leq') or >= n (side 'geq') aisle?

    ``window`` = (lo, hi) restricts the degrees where H^i is trusted; outside
    the module's own bounds H^i is zero and always trusted.
    """
    if side not in ("leq", "geq"):
        raise ValueError("side must be 'leq' or 'geq'")
    lo, hi = M.bounds()
    known = _known(M, window)
    if side == "leq":
        degs = range(n + 1, hi + 1)
    else:
        degs = range(lo, n)
    unknown = False
    for i in degs:
        if not known(i):
            unknown = True
            continue
        if cohomology_dims(M, [i])[i]:
            return AisleVerdict(side, n, False, i)
    return AisleVerdict(side, n, Inconclusive if unknown else True)


@dataclass
class AisleReport:
    module: str
    window: tuple
    verdicts: dict = field(default_factory=dict)      # n -> (leq, geq)

    def lines(self):
        out = [f"aisles of {self.module} in window {self.window[0]}..{self.window[1]}"]
        for n in sorted(self.verdicts):
            le, ge = self.verdicts[n]
            out.append(f"  {le}; {ge}")
        out.append(f"  note: {NONDEGENERACY}")
        return out

    def concentrated_in(self):
        """Degrees n with M in both aisles."""
        return [n for n, (le, ge) in sorted(self.verdicts.items()) if le.value is True and ge.value is True]


def aisle_report(M: DgModule, window=None, name="M", ns=None) -> AisleReport:
    lo, hi = M.bounds()
    w = window or (lo, hi)
    ns = ns if ns is not None else range(w[0] - 1, w[1] + 2)
    rep = AisleReport(name, tuple(w))
    for n in ns:
        rep.verdicts[n] = (aisle_check(M, n, "leq", window), aisle_check(M, n, "geq", window))
    return rep


# ---------------------------------------------------------------- explicit truncations

def is_nonpositive_base(q: DgCategory) -> bool:
    return all(q.deg(g) <= 0 for g in q.elts)


def _require_nonpositive(q):
    if not is_nonpositive_base(q):
        raise ValueError("explicit truncations need a base with no positive degree homs")


def _sub_complex(c: Complex, bases: dict):
    """Subcomplex spanned by ``bases[n]`` (closed under d); returns (complex, inclusion matrices)."""
    F = c.field
    incl = {n: Matrix.from_columns(F, c.dim(n), b) for n, b in bases.items() if b}
    dims = {n: len(b) for n, b in bases.items() if b}
    d = {}
    for n in dims:
        if dims.get(n + 1):
            cols = []
            S = incl[n + 1]
            for v in bases[n]:
                x = solve_particular(S, c.diff(n) @ v)
                if x is NoSolution:
                    raise ValueError("subspace is not closed under d")
                cols.append(x)
            d[n] = Matrix.from_columns(F, dims[n + 1], cols)
    return Complex(F, dims, d), incl


def truncate_leq(M: DgModule, n: int) -> DgModule:
    """tau_{<= n}: M^i for i < n, the cocycles in degree n, nothing above."""
    q = M.base
    _require_nonpositive(q)
    bases, incl, values = {}, {}, {}
    for A in q.objects:
        c = M.values[A]
        b = {i: [[c.field.one if r == k else c.field.zero for r in range(c.dim(i))] for k in range(c.dim(i))]
             for i in c.degrees() if i < n}
        z = cocycles(c, n)
        if z:
            b[n] = Subspace(c.field, c.dim(n), z).basis()
        bases[A] = b
        values[A], incl[A] = _sub_complex(c, b)
    return _induced(M, values, lambda A, i, v: solve_particular(incl[A][i], v) if i in incl[A] else [],
                    lambda A, i: [incl[A][i].column(k) for k in range(incl[A][i].ncols)] if i in incl[A] else [])


def truncate_geq(M: DgModule, n: int) -> DgModule:
    """tau_{>= n}: M^n / B^n, then M^i for i > n."""
    q = M.base
    _require_nonpositive(q)
    F = M.field
    reps, values = {}, {}
    for A in q.objects:
        c = M.values[A]
        rp = {}
        for i in c.degrees():
            if i > n:
                rp[i] = [[F.one if r == k else F.zero for r in range(c.dim(i))] for k in range(c.dim(i))]
            elif i == n:
                rp[i] = quotient_representatives(coboundaries(c, n), c.dim(n), F)
        reps[A] = rp
    coord = _quotient_coords(M, n, reps)
    for A in q.objects:
        c = M.values[A]
        dims = {i: len(v) for i, v in reps[A].items() if v}
        d = {}
        for i in dims:
            if dims.get(i + 1):
                d[i] = Matrix.from_columns(F, dims[i + 1], [coord(A, i + 1, c.diff(i) @ v) for v in reps[A][i]])
        values[A] = Complex(F, dims, d)
    return _induced(M, values, coord, lambda A, i: reps[A].get(i, []))


def _quotient_coords(M, n, reps):
    F = M.field
    cache = {}

    def coord(A, i, v):
        if i > n:
            return list(v)
        if i < n:
            return []
        if A not in cache:
            c = M.values[A]
            cols = list(reps[A].get(n, [])) + list(coboundaries(c, n))
            cache[A] = (Matrix.from_columns(F, c.dim(n), cols), len(reps[A].get(n, [])))
        mat, k = cache[A]
        if not k:
            return []
        x = solve_particular(mat, v)
        return x[:k]
    return coord


def _induced(M, values, coord, basis):
    """Module on new values; the action is computed through ``basis`` and ``coord``."""
    q, F = M.base, M.field
    action = {}
    for g, be in q.elts.items():
        src, tgt, e = be.target, be.source, be.deg
        comps = {}
        for i in values[src].degrees():
            if not values[tgt].dim(i + e):
                continue
            rho = M.action[g].comp(i)
            cols = [coord(tgt, i + e, rho @ v) for v in basis(src, i)]
            comps[i] = Matrix.from_columns(F, values[tgt].dim(i + e), cols)
        action[g] = ChainMap(values[src], values[tgt], e, comps)
    return DgModule(q, values, action)


def heart_object(M: DgModule) -> DgModule:
    """tau_{>= 0} tau_{<= 0} M, a module concentrated in degree 0."""
    return truncate_geq(truncate_leq(M, 0), 0)


def h0_lift(q: DgCategory, N: H0Module) -> DgModule:
    """An H0-module seen as a dg-module concentrated in degree 0."""
    _require_nonpositive(q)
    H, F = N.H, q.field
    values = {A: Complex(F, {0: N.dims[A]} if N.dims[A] else {}, {}) for A in q.objects}
    action = {}
    for g, be in q.elts.items():
        A, B, e = be.source, be.target, be.deg
        comps = {}
        if e == 0 and N.dims[A] and N.dims[B]:
            comps[0] = N.act(H.coords({g: F.one}, A, B), A, B)
        action[g] = ChainMap(values[B], values[A], e, comps)
    return DgModule(q, values, action)


# ---------------------------------------------------------------- derived projectives and the heart

def derived_projective_check(q: DgCategory, A, samples, H: H0Category | None = None) -> Report:
    """Compare H^0 hom(yoneda(A), M) with Hom(H0(-, A), H^0 M) on each sample."""
    H = H or H0Category(q)
    rep = Report(f"derived projective {A}")
    Y = yoneda(q, A)
    RA = representable_h0(H, A)
    for k, M in enumerate(samples):
        lhs = module_hom_h(Y, M, 0)
        rhs = h0_module_hom_dim(RA, module_cohomology(M, 0, H))
        rep.add(f"sample {k}", lhs == rhs, f"dg {lhs}, H0 {rhs}")
    return rep


def in_heart(M: DgModule, window=None) -> bool:
    return aisle_check(M, 0, "leq", window).value is True and aisle_check(M, 0, "geq", window).value is True


def derived_hom_h0(M: DgModule, N: DgModule, depth=2) -> int:
    """dim Hom(M, N) in the derived category, for M, N in the heart.

    M is replaced by the totalization of its resolution down to -depth;
    below that the cone has no maps into a heart object.
    """
    from .resolution import resolve
    tr = resolve(M, depth)
    return module_hom_h(tr.tot, N, 0)


def heart_compare(q: DgCategory, samples, H: H0Category | None = None, depth=2) -> Report:
    H = H or H0Category(q)
    rep = Report("heart")
    heart = []
    for k, M in enumerate(samples):
        if not in_heart(M):
            rep.note(f"sample {k} skipped: cohomology not concentrated in degree 0")
            continue
        N0 = module_cohomology(M, 0, H)
        rep.add(f"sample {k} H^0 finitely presented", fp_presentation(N0).ok)
        heart.append((k, M, N0))
    for (a, M, M0), (b, N, N0) in itertools.product(heart, repeat=2):
        lhs = derived_hom_h0(M, N, depth)
        rhs = h0_module_hom_dim(M0, N0)
        rep.add(f"hom({a},{b})", lhs == rhs, f"derived {lhs}, H0 {rhs}")
    return rep


def random_h0_quotient(H: H0Category, rng, max_summands=2) -> H0Module:
    """Quotient of a sum of representables by the submodule generated by random elements."""
    from .dg_module import _gen_images, _p0_module
    F = H.field
    objs = [rng.choice(H.objects) for _ in range(rng.randint(1, max_summands))]
    P = _p0_module(H0Module(H, {}, {}), [(A, []) for A in objs])
    gens = []
    for B in H.objects:
        if P.dims[B] and rng.random() < 0.3:
            gens.append((B, [F.random_element(rng) for _ in range(P.dims[B])]))
    return h0_quotient(P, gens)


def h0_quotient(P: H0Module, gens) -> H0Module:
    from .dg_module import _gen_images
    H, F = P.H, P.field
    sub = {B: _gen_images(P, gens, B) for B in H.objects}
    reps = {B: quotient_representatives(sub[B], P.dims[B], F) if P.dims[B] else [] for B in H.objects}
    solvers = {}
    for B in H.objects:
        cols = list(reps[B]) + [v for v in sub[B] if any(v)]
        solvers[B] = (Matrix.from_columns(F, P.dims[B], cols), len(reps[B])) if P.dims[B] else None
    dims = {B: len(reps[B]) for B in H.objects}
    action = {}
    for A, B in itertools.product(H.objects, repeat=2):
        for i in range(H.dim(A, B)):
            if not dims[A] or not dims[B]:
                continue
            mat, k = solvers[A]
            cols = [solve_particular(mat, P.action[(A, B, i)] @ v)[:k] for v in reps[B]]
            action[(A, B, i)] = Matrix.from_columns(F, dims[A], cols)
    return H0Module(H, dims, action)


def heart_samples(q: DgCategory, rng, count: int, H: H0Category | None = None) -> list:
    """Modules with cohomology concentrated in degree 0.

    With a nonpositive base these are random H0-module quotients lifted to
    degree 0; otherwise sums of representables that happen to be in the heart.
    """
    H = H or H0Category(q)
    out = []
    if is_nonpositive_base(q):
        tries = 0
        while len(out) < count and tries < 20 * count:
            tries += 1
            N = random_h0_quotient(H, rng)
            if N.total_dim:
                out.append(h0_lift(q, N))
        return out
    from .dg_module import direct_sum_modules
    reps = [A for A in q.objects if in_heart(yoneda(q, A))]
    if not reps:
        return out
    while len(out) < count:
        out.append(direct_sum_modules(*[yoneda(q, rng.choice(reps)) for _ in range(rng.randint(1, 2))]))
    return out


# ---------------------------------------------------------------- idempotents

def _end_algebra(H: H0Category, A):
    n = H.dim(A, A)
    F = H.field

    def mul(x, y):
        return H.compose(x, A, A, y, A)
    return n, mul, H.identity(A)


def _power(mul, x, k, one):
    out, base = one, x
    while k:
        if k & 1:
            out = mul(out, base)
        base = mul(base, base)
        k >>= 1
    return out


def fitting_idempotent(H: H0Category, A, x):
    """Idempotent e with x invertible on eA and nilpotent on (1-e)A."""
    F = H.field
    n, mul, one = _end_algebra(H, A)
    if not n:
        return None
    # L_x^n as a matrix, then split 1 along image + kernel of its n-th power
    cols = [mul(x, [F.one if k == i else F.zero for k in range(n)]) for i in range(n)]
    L = Matrix.from_columns(F, n, cols)
    P = Matrix.identity(F, n)
    for _ in range(n):
        P = L @ P
    img = [c for c in P.columns() if any(c)]
    ker = kernel_basis(P)
    if not img:
        return [F.zero] * n
    if not ker:
        return list(one)
    M = Matrix.from_columns(F, n, img + ker)
    c = solve_particular(M, one)
    e = [F.zero] * n
    for coef, v in zip(c[:len(img)], img):
        e = [F.norm(a + coef * b) for a, b in zip(e, v)]
    return e


def find_idempotents(H: H0Category, A, rng=None, samples=20) -> list:
    """Nontrivial idempotents of H^0 End(A) found by Fitting decomposition.

    Candidates are x - lambda for basis and random elements x; every
    returned element is checked to satisfy e^2 = e, e != 0, 1.
    """
    F = H.field
    n, mul, one = _end_algebra(H, A)
    if n <= 1:
        return []
    rng = rng or random.Random(0)
    xs = [[F.one if k == i else F.zero for k in range(n)] for i in range(n)]
    xs += [[F.random_element(rng) for _ in range(n)] for _ in range(samples)]
    lams = range(F.p) if F.is_prime and F.p <= 257 else range(-8, 9)
    found = []
    for x in xs:
        for lam in lams:
            y = [F.norm(a - lam * b) for a, b in zip(x, one)]
            e = fitting_idempotent(H, A, y)
            if e is None or not any(e) or e == list(one):
                continue
            if mul(e, e) == e and e not in found:
                found.append(e)
        if found:
            break
    return found


def splits_through(H: H0Category, A, e, B, rng=None, tries=20) -> bool:
    """Search for r: A -> B, s: B -> A with s r = e and r s = 1_B."""
    F = H.field
    rng = rng or random.Random(0)
    nAB, nBA = H.dim(A, B), H.dim(B, A)
    if not nAB or not nBA:
        return False
    idB = H.identity(B)
    # s in e H0(B, A): image of left multiplication by e
    s_space = [H.compose(e, A, A, [F.one if k == i else F.zero for k in range(nBA)], B) for i in range(nBA)]
    s_space = [v for v in s_space if any(v)]
    if not s_space:
        return False
    for _ in range(tries):
        s = [F.zero] * nBA
        for v in s_space:
            c = F.random_element(rng)
            s = [F.norm(a + c * b) for a, b in zip(s, v)]
        # r s = 1_B and s r = e are linear in r
        rows, rhs = [], []
        units = [[F.one if k == i else F.zero for k in range(nAB)] for i in range(nAB)]
        img1 = [H.compose(u, A, B, s, B) for u in units]         # r o s
        img2 = [H.compose(s, B, A, u, A) for u in units]         # s o r
        M1 = Matrix.from_columns(F, len(idB), img1)
        M2 = Matrix.from_columns(F, len(e), img2)
        M = Matrix.from_dense(F, M1.to_dense() + M2.to_dense())
        r = solve_particular(M, list(idB) + list(e))
        if r is not NoSolution:
            return True
    return False


def karoubian_check(q: DgCategory, H: H0Category | None = None, seed=0) -> Report:
    """Look for idempotents of H^0 End(A) that do not split through an object.

    Finding none is evidence, not proof; a non-split idempotent is reported
    as a warning since later checks assume the Karoubian property.
    """
    H = H or H0Category(q)
    rng = random.Random(seed)
    rep = Report("Karoubian")
    for A in H.objects:
        ok = True
        for e in find_idempotents(H, A, rng):
            if not any(splits_through(H, A, e, B, rng) for B in H.objects if B != A):
                ok = False
                rep.note(f"warning: idempotent {e} of End({A}) does not split")
        rep.add(f"idempotents of End({A}) split", ok)
    return rep


def simple_module(q: DgCategory, A, H: H0Category | None = None) -> DgModule:
    """Top of the representable at A, in degree 0 (nonpositive, local End(A) only)."""
    from .dg_module import _p0_module
    H = H or H0Category(q)
    F = H.field
    R = representable_h0(H, A)
    n = H.dim(A, A)
    gens = []
    for B in H.objects:
        if B != A:
            gens.extend((B, [F.one if k == i else F.zero for k in range(R.dims[B])]) for i in range(R.dims[B]))
    one = H.identity(A)
    for i in range(n):
        e = [F.one if k == i else F.zero for k in range(n)]
        if e == one:
            continue
        p = e
        for _ in range(n):
            p = H.compose(p, A, A, e, A)
        if any(p):
            raise ValueError(f"End({A}) basis element {i} is not nilpotent")
        gens.append((A, e))
    S = h0_quotient(R, gens)
    if S.total_dim != 1:
        raise ValueError(f"top of the representable at {A} is not simple")
    return h0_lift(q, S)
