"""Resolving hfp modules by twisted complexes, one index at a time.

Start from the empty complex with the zero map to M.  At each step the
fiber of alpha: Tot X -> M is examined in one degree; fp generators of
that cohomology (over H^0) give new objects, a closed one-sided map beta
into X and elements c of M.  Coning off beta adds the objects one index
lower and alpha extends by c.

The map alpha is stored through Yoneda coordinates: one element of
M(A)^j per entry A at index j.  A basis element g of hom(B, A)^{m-j}
inside Tot X(B)^m goes to (-1)^{|g| j} rho(g) y.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .dg_category import DgCategory, H0Category
from .dg_module import (DgModule, ModuleMap, check_hlc, fp_presentation, greedy_generators, is_closed_map,
                        is_natural, map_verdict, module_cohomology, module_cone, module_hom_complex, zero_module)
from .exact_field import Matrix
from .graded_complex import ChainMap, CohomologyBasis, cohomology_dim
from .report import Report
from .twisted import (TotLayout, hm_identity, TwistedComplex, TwMorphism, totalize, totalize_map, tw_cone, tw_hom_complex)

COPRODUCT_NOTE = "countable coproducts replaced by a finite sequence that stabilizes"


class HypothesisFailure(Exception):
    pass


class SolverFailure(RuntimeError):
    pass


# ---------------------------------------------------------------- Yoneda coordinates

def yoneda_coords_map(X: TwistedComplex, M: DgModule, coords: dict, TX=None, layout=None) -> ModuleMap:
    """Tot X -> M from elements coords[(j, b)] in M(X_j[b])^j."""
    q, F = M.base, M.field
    L = layout or TotLayout(X)
    TX = TX or totalize(X, L)
    comps = {}
    for B in q.objects:
        cm = {}
        for m, (blocks, total) in L.blocks[B].items():
            cols = []
            rows = M.values[B].dim(m)
            for (j, b, A, off, size) in blocks:
                y = coords.get((j, b))
                basis = q.hom_basis(B, A, m - j)
                for g in basis:
                    if y is None or not rows or not any(y):
                        cols.append([F.zero] * rows)
                        continue
                    v = M.action[g].comp(j) @ y
                    s = F.sign((m - j) * j)
                    cols.append([F.norm(s * x) for x in v])
            cm[m] = Matrix.from_columns(F, rows, cols) if cols else Matrix.zeros(F, rows, 0)
        comps[B] = ChainMap(TX.values[B], M.values[B], 0, cm)
    return ModuleMap(TX, M, 0, comps)


def top_degree(M: DgModule):
    """Highest degree with nonzero cohomology, or None."""
    lo, hi = M.bounds()
    for i in range(hi, lo - 1, -1):
        if any(cohomology_dim(M.values[A], i) for A in M.base.objects):
            return i
    return None


# ---------------------------------------------------------------- trace

@dataclass
class ResolutionStep:
    n: int                        # the new objects sit at index n
    objects: list                 # Q_n
    beta: TwMorphism | None       # single(Q_n at n + 1) -> X_{n+1}
    c: list                       # one element of M(Q_n[k])^n per new object
    X: TwistedComplex             # X_n
    verdicts: dict                # i -> verdict of H^i(alpha_n)
    report: Report

    @property
    def ok(self):
        return self.report.ok


@dataclass
class ResolutionTrace:
    target: DgModule
    window: int
    top: int | None
    steps: list = field(default_factory=list)
    coords: dict = field(default_factory=dict)
    tot: DgModule | None = None
    alpha: ModuleMap | None = None

    @property
    def X(self) -> TwistedComplex:
        return self.steps[-1].X if self.steps else TwistedComplex(self.target.base, {})

    @property
    def lo(self):
        return self.top - self.window if self.top is not None else None

    @property
    def ok(self):
        return all(s.ok for s in self.steps)

    def report(self) -> Report:
        rep = Report("resolution")
        for s in self.steps:
            rep.extend(s.report, f"step {s.n}: ")
        rep.note(COPRODUCT_NOTE)
        return rep


_HLC_CACHE = {}


def _hlc_ok(q):
    key = id(q)
    if key not in _HLC_CACHE:
        _HLC_CACHE[key] = (q, check_hlc(q))
    return _HLC_CACHE[key][1]


def projective_cover_step(M: DgModule, n: int, H: H0Category | None = None):
    """Objects B and elements of M(B)^n whose classes generate H^n(M) over H^0.

    Returns (objects, cocycles); both are empty when H^n(M) = 0.
    """
    q = M.base
    H = H or H0Category(q)
    N = module_cohomology(M, n, H)
    if not N.total_dim:
        return [], []
    cb = {A: CohomologyBasis(M.values[A], n) for A in q.objects}
    objs, elts = [], []
    for A, x in greedy_generators(N):
        F = M.field
        z = [F.zero] * M.values[A].dim(n)
        for c, r in zip(x, cb[A].reps):
            if c:
                z = [F.norm(a + c * b) for a, b in zip(z, r)]
        objs.append(A)
        elts.append(z)
    return objs, elts


def _decode_x(q, X, L, A, n, x, k):
    """Split x in Tot X(A)^n into hom elements: {(n+1?, j): {(b, k): elem}} keyed by target index."""
    out = {}
    for (j, b, Ob, off, size) in L.blocks[A].get(n, ([], 0))[0]:
        vec = x[off:off + size]
        if any(vec):
            out.setdefault(j, {})[(b, k)] = q.from_vec(vec, A, Ob, n - j)
    return out


def resolve(M: DgModule, W: int, H: H0Category | None = None, check=True) -> ResolutionTrace:
    """Steps down to index top - W, where top is the highest nonzero H^i(M)."""
    q, F = M.base, M.field
    if check:
        hl = _hlc_ok(q)
        if not hl.ok:
            raise HypothesisFailure(f"base is not hlc: {hl.first_failure().line()}")
    H = H or H0Category(q)
    top = top_degree(M)
    trace = ResolutionTrace(M, W, top)
    X = TwistedComplex(q, {})
    coords = {}
    L = TotLayout(X)
    TX = totalize(X, L)
    alpha = ModuleMap(TX, M, 0, {A: ChainMap(TX.values[A], M.values[A], 0, {}) for A in q.objects})
    if top is None:
        trace.tot, trace.alpha = TX, alpha
        return trace
    mhi = M.bounds()[1]
    for n in range(top, top - W - 1, -1):
        rep = Report(f"step {n}")
        # cone(-alpha) is isomorphic to cone(alpha) by y -> -y; its classes give the new coordinates directly
        C = module_cone(alpha.scale(-1)).module
        # fiber classes in degree n + 1: pairs (x, y), x in Tot X^{n+1}, y in M^n
        N = module_cohomology(C, n, H)
        if check and N.total_dim and not fp_presentation(N).ok:
            raise HypothesisFailure(f"cohomology of the fiber in degree {n + 1} is not finitely presented")
        objs, zs = projective_cover_step(C, n, H)
        beta = None
        ys = []
        if objs:
            src = TwistedComplex.single(q, objs, n + 1)
            comps = {}
            for k, (A, z) in enumerate(zip(objs, zs)):
                dx = TX.values[A].dim(n + 1)
                x, y = z[:dx], z[dx:]
                for j, hm in _decode_x(q, X, L, A, n + 1, x, k).items():
                    comps.setdefault((n + 1, j), {}).update(hm)
                ys.append(y)
            beta = TwMorphism(src, X, 0, comps)
            cone = tw_cone(beta)
            Xn = cone.complex
            new_coords = dict(coords)
            for k, y in enumerate(ys):
                new_coords[(n, k)] = list(y)
            Ln = TotLayout(Xn)
            TXn = totalize(Xn, Ln)
            alpha_n = yoneda_coords_map(Xn, M, new_coords, TXn, Ln)
            if not (is_natural(alpha_n) and is_closed_map(alpha_n)):
                raise SolverFailure(f"extended map is not closed at step {n}")
            jmap = totalize_map(cone.j, TX, TXn)
            rep.add("alpha_n j = alpha_{n+1}", alpha_n @ jmap == alpha)
            X, coords, L, TX, alpha = Xn, new_coords, Ln, TXn, alpha_n
        else:
            rep.add("no new objects", True)
        verdicts = {}
        hi = max(mhi, TX.bounds()[1])
        for i in range(n, hi + 1):
            v = map_verdict(alpha, i)
            verdicts[i] = v
            want = ("iso", "epi") if i == n else ("iso",)
            rep.add(f"H^{i} {'epi' if i == n else 'iso'}", v in want, v)
        rep.add("entries in [n, top]", all(n <= j <= top for j in X.indices()))
        trace.steps.append(ResolutionStep(n, objs, beta, ys, X, verdicts, rep))
    trace.coords = coords
    trace.tot, trace.alpha = TX, alpha
    return trace


# ---------------------------------------------------------------- reconstruction

@dataclass
class Reconstruction:
    X: TwistedComplex
    alpha: ModuleMap
    trace: ResolutionTrace
    certificate: Report

    @property
    def ok(self):
        return self.certificate.ok


def reconstruct(M: DgModule, W: int, H: H0Category | None = None, check=True) -> Reconstruction:
    tr = resolve(M, W, H, check)
    rep = Report("reconstruction")
    if tr.top is None:
        rep.add("target acyclic, empty complex", tr.X.is_zero)
        return Reconstruction(tr.X, tr.alpha, tr, rep)
    rep.extend(tr.report(), "")
    C = module_cone(tr.alpha).module
    lo, hi = tr.lo, max(M.bounds()[1], tr.tot.bounds()[1])
    for i in range(lo + 1, hi + 1):
        d = sum(cohomology_dim(C.values[A], i) for A in M.base.objects)
        rep.add(f"H^{i} of the cone vanishes", d == 0, f"dim {d}")
    rep.note(COPRODUCT_NOTE)
    return Reconstruction(tr.X, tr.alpha, tr, rep)


def window_dims(M: DgModule, lo, hi) -> dict:
    return {i: tuple(cohomology_dim(M.values[A], i) for A in M.base.objects) for i in range(lo, hi + 1)}


# ---------------------------------------------------------------- hocolim of the resolution sequence

def resolution_sequence(tr: ResolutionTrace):
    """Tot X_top -> Tot X_{top-1} -> ... with the maps alpha_n to the target."""
    from .holim import ModuleSequence
    q, M = tr.target.base, tr.target
    terms, alphas, maps = [], [], []
    prev = None
    for s in tr.steps:
        L = TotLayout(s.X)
        T = totalize(s.X, L)
        coords = {k: v for k, v in tr.coords.items() if k[0] >= s.n}
        a = yoneda_coords_map(s.X, M, coords, T, L)
        if prev is not None:
            incl = TwMorphism(prev[0], s.X, 0, {(i, i): hm_identity(q, objs) for i, objs in prev[0].entries.items()})
            maps.append(totalize_map(incl, prev[1], T))
        terms.append(T)
        alphas.append(a)
        prev = (s.X, T)
    return ModuleSequence(terms, maps), alphas


def verify_resolution_hocolim(tr: ResolutionTrace) -> Report:
    from .holim import verify_hocolim_cohomology
    seq, alphas = resolution_sequence(tr)
    if not seq.terms:
        rep = Report("hocolim cohomology")
        rep.add("empty resolution", True)
        return rep
    thresholds = [s.n for s in tr.steps]
    lo, hi = tr.lo + 1, max(tr.target.bounds()[1], tr.tot.bounds()[1])
    rep = verify_hocolim_cohomology(seq, (lo, hi), thresholds, tr.target, alphas)
    rep.note(COPRODUCT_NOTE)
    return rep


# ---------------------------------------------------------------- verification suites

def hom_window(TX: DgModule, TY: DgModule):
    (xlo, xhi), (ylo, yhi) = TX.bounds(), TY.bounds()
    return ylo - xhi, yhi - xlo


def verify_quasi_ff(q: DgCategory, pairs, degrees=None) -> Report:
    rep = Report("quasi fully faithful")
    for k, (X, Y) in enumerate(pairs):
        TX, TY = totalize(X), totalize(Y)
        lo, hi = degrees if degrees is not None else hom_window(TX, TY)
        if lo > hi:
            rep.add(f"pair {k}", True, "empty window")
            continue
        degs = list(range(lo - 1, hi + 2))
        A = tw_hom_complex(X, Y, degrees=degs)
        B = module_hom_complex(TX, TY, degrees=degs)
        bad = [(p, cohomology_dim(A, p), cohomology_dim(B, p)) for p in range(lo, hi + 1)
               if cohomology_dim(A, p) != cohomology_dim(B, p)]
        detail = "; ".join(f"H^{p}: tw {a}, mod {b}" for p, a, b in bad) or f"degrees {lo}..{hi}"
        rep.add(f"pair {k}", not bad, detail)
    return rep


def verify_comparison(q: DgCategory, samples, W: int, H: H0Category | None = None) -> Report:
    """Aisles, homs and essential image, compared through resolutions."""
    from .tstructure import Inconclusive, aisle_check
    H = H or H0Category(q)
    rep = Report("comparison")
    recs = []
    for k, M in enumerate(samples):
        rec = reconstruct(M, W, H)
        recs.append(rec)
        ff = rec.certificate.first_failure()
        rep.add(f"sample {k} reconstruct", rec.ok, ff.line() if ff else "")
        if rec.trace.top is None:
            continue
        # (a) t-exactness: aisle verdicts agree where both are decided
        T = rec.trace.tot
        lo = rec.trace.lo
        big = max(M.bounds()[1], T.bounds()[1]) + 1
        ok, where = True, ""
        for n in range(lo + 1, big + 1):
            for side in ("leq", "geq"):
                a = aisle_check(M, n, side).value
                b = aisle_check(T, n, side, window=(lo + 1, big)).value
                if a is Inconclusive or b is Inconclusive:
                    continue
                if a != b:
                    ok, where = False, f"{side} {n}"
        rep.add(f"sample {k} aisles", ok, where)
    # (b) homs on H^0: tw hom between resolutions against module homs into the target
    K = len(samples)
    pairs = sorted({(a, a) for a in range(K)} | {(a, (a + 1) % K) for a in range(K)})
    deep = {}
    for a, b in pairs:
        ra, M, N = recs[a], samples[a], samples[b]
        if ra.trace.top is None:
            continue
        tb = top_degree(N)
        if tb is None:
            continue
        depth = max(tb - ra.trace.lo + 2, 0)
        key = (b, depth)
        if key not in deep:
            deep[key] = resolve(N, depth, H)
        rb = deep[key]
        lhs_c = tw_hom_complex(ra.X, rb.X, degrees=[-1, 0, 1])
        rhs_c = module_hom_complex(ra.trace.tot, N, degrees=[-1, 0, 1])
        lhs, rhs = cohomology_dim(lhs_c, 0), cohomology_dim(rhs_c, 0)
        rep.add(f"hom({a},{b}) on H^0", lhs == rhs, f"tw {lhs}, mod {rhs}")
    rep.note(COPRODUCT_NOTE)
    return rep


# ---------------------------------------------------------------- text rendering

def _fmt_hm(q, hm):
    F = q.field
    parts = []
    for (r, c) in sorted(hm):
        e = hm[(r, c)]
        terms = " ".join(f"{F.fmt(e[n])}*{n}" for n in sorted(e))
        parts.append(f"({r},{c}) {terms}")
    return "; ".join(parts)


def _fmt_vec(F, v):
    return "[" + " ".join(F.fmt(x) for x in v) + "]"


def render_trace(tr: ResolutionTrace) -> str:
    M = tr.target
    q, F = M.base, M.field
    lo, hi = M.bounds()
    out = ["dgkit resolution trace", "format 1", f"field {F}", f"objects {' '.join(q.objects)}"]
    for A in q.objects:
        dims = " ".join(f"{i}:{M.values[A].dim(i)}" for i in sorted(M.values[A].degrees()))
        out.append(f"target {A} dims {dims or '-'}")
    out.append(f"window {tr.window}")
    out.append(f"top {tr.top if tr.top is not None else 'none'}")
    for s in tr.steps:
        out.append(f"step {s.n}")
        out.append(f"  Q {' '.join(s.objects) if s.objects else '-'}")
        if s.beta is not None:
            for (i, j) in sorted(s.beta.components):
                out.append(f"  beta {i}->{j} {_fmt_hm(q, s.beta.components[(i, j)])}")
        for k, y in enumerate(s.c):
            out.append(f"  c {k} {_fmt_vec(F, y)}")
        ent = " ".join(f"{i}:{','.join(s.X.entries[i])}" for i in sorted(s.X.entries, reverse=True))
        out.append(f"  X entries {ent or '-'}")
        for (i, j) in sorted(s.X.q):
            out.append(f"  X q {i}->{j} {_fmt_hm(q, s.X.q[(i, j)])}")
        out.append("  verdicts " + " ".join(f"{i}:{v}" for i, v in sorted(s.verdicts.items(), reverse=True)))
        out.append(f"  status {'ok' if s.ok else 'FAIL'}")
    out.append(f"note {COPRODUCT_NOTE}")
    return "\n".join(out) + "\n"
