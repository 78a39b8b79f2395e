"""Telescopes, the split-cone comparison and the truncation colimit of a twisted complex.

Sequences are finite: M_0 -> ... -> M_N.  The telescope uses
1 - mu : (+)_{n<N} M_n -> (+)_{n<=N} M_n, which models a sequence that is
constant (with identity maps) after N; the last source summand of the
infinite telescope only contributes a contractible piece.
"""
from __future__ import annotations

from dataclasses import dataclass

from .dg_module import (DgModule, ModuleMap, block_module_map, direct_sum_modules, is_closed_map, is_natural,
                        map_verdict, module_cone, module_map_differential, shift_module, zero_module)
from .exact_field import Matrix, NoSolution, solve_particular
from .graded_complex import ChainMap, cohomology_dim
from .report import Report


@dataclass
class ModuleSequence:
    terms: list
    maps: list               # maps[n]: terms[n] -> terms[n+1]
    stabilized_from: int | None = None

    def check(self) -> Report:
        rep = Report("module sequence")
        rep.add("map count", len(self.maps) == len(self.terms) - 1)
        for n, m in enumerate(self.maps):
            rep.add(f"map {n} closed of degree 0", m.degree == 0 and is_closed_map(m) and is_natural(m))
        if self.stabilized_from is not None:
            for n in range(self.stabilized_from, len(self.maps)):
                rep.add(f"map {n} is the identity", self.maps[n] == ModuleMap.identity(self.terms[n]))
        return rep


@dataclass
class Hocolim:
    module: DgModule
    shift_map: ModuleMap           # 1 - mu
    source_sum: DgModule
    target_sum: DgModule
    j: list                        # j_n: M_n -> hocolim
    k: list                        # k_n: M_n -> hocolim of degree -1, d k_n = j_n - j_{n+1} mu_n
    cone: object


def _inclusion(q, M, S, pos, parts):
    return block_module_map(M, [M], S, parts, 0, {(pos, 0): ModuleMap.identity(M)})


def hocolim_modules(seq: ModuleSequence) -> Hocolim:
    terms, maps = seq.terms, seq.maps
    N = len(terms) - 1
    q = terms[0].base
    srcs = terms[:N]
    S = direct_sum_modules(*srcs) if srcs else zero_module(q)
    T = direct_sum_modules(*terms)
    blocks = {}
    for n in range(N):
        blocks[(n, n)] = ModuleMap.identity(terms[n])
        blocks[(n + 1, n)] = maps[n].scale(-1)
    one_minus_mu = block_module_map(S, srcs, T, terms, 0, blocks) if srcs else ModuleMap.zero(S, T)
    C = module_cone(one_minus_mu)
    js, ks = [], []
    F = q.field
    S1 = shift_module(S, 1)
    for n, M in enumerate(terms):
        jn = C.j @ _inclusion(q, M, T, n, terms)
        js.append(jn)
        if n < N:
            incl = _inclusion(q, M, S, n, srcs)
            # M -> S -> S[1] -> cone, the middle step is the degree -1 shifted identity
            comps = {}
            for A in q.objects:
                cm = {}
                for m, mat in incl.comp(A).components.items():
                    cm[m] = mat
                comps[A] = ChainMap(M.values[A], S1.values[A], -1, cm)
            kn = C.i @ ModuleMap(M, S1, -1, comps)
            ks.append(kn)
    return Hocolim(C.module, one_minus_mu, S, T, js, ks, C)


def check_hocolim(h: Hocolim, seq: ModuleSequence) -> Report:
    rep = Report("telescope")
    for n, m in enumerate(seq.maps):
        lhs = h.j[n] - h.j[n + 1] @ m
        rep.add(f"d k_{n} = j_{n} - j_{n + 1} mu_{n}", module_map_differential(h.k[n]) == lhs)
    for n, jn in enumerate(h.j):
        rep.add(f"j_{n} closed", is_closed_map(jn))
    return rep


def induced_map(h: Hocolim, seq: ModuleSequence, Y: DgModule, fs: list) -> ModuleMap:
    """(0, (+) f_n): hocolim -> Y, for maps with f_{n+1} mu_n = f_n strictly."""
    for n, m in enumerate(seq.maps):
        if fs[n + 1] @ m != fs[n]:
            raise ValueError(f"triangle {n} does not commute strictly")
    sumf = block_module_map(h.target_sum, seq.terms, Y, [Y], 0, {(0, n): f for n, f in enumerate(fs)})
    return sumf @ h.cone.s


def verify_hocolim_cohomology(seq: ModuleSequence, window, thresholds=None, Y=None, fs=None) -> Report:
    """Checks the telescope conclusion from the hypothesis on the maps.

    thresholds[n] = t_n means H^i(mu_n) is iso for i > t_n and epi at t_n;
    the conclusion is the same statement for j_n: M_n -> hocolim.
    """
    lo, hi = window
    N = len(seq.terms) - 1
    thresholds = thresholds if thresholds is not None else [-n for n in range(N + 1)]
    rep = Report("hocolim cohomology")
    rep.extend(seq.check())
    for n, m in enumerate(seq.maps):
        t = thresholds[n]
        ok = all(map_verdict(m, i) == "iso" for i in range(max(lo, t + 1), hi + 1))
        ok = ok and (t < lo or t > hi or map_verdict(m, t) in ("iso", "epi"))
        rep.add(f"hypothesis on mu_{n}", ok)
    if not rep.ok:
        rep.note("hypothesis violated")
        return rep
    h = hocolim_modules(seq)
    rep.extend(check_hocolim(h, seq))
    for n, jn in enumerate(h.j):
        t = thresholds[n] if n < len(thresholds) else thresholds[-1]
        # t_n for the last term: it maps isomorphically onto the telescope
        if n == N:
            t = lo - 1
        ok = all(map_verdict(jn, i) == "iso" for i in range(max(lo, t + 1), hi + 1))
        ok = ok and (t < lo or t > hi or map_verdict(jn, t) in ("iso", "epi"))
        rep.add(f"conclusion for j_{n}", ok)
    if Y is not None:
        phi = induced_map(h, seq, Y, fs)
        rep.add("induced map closed", is_closed_map(phi))
        rep.add("induced map quasi-iso in window",
                all(map_verdict(phi, i) == "iso" for i in range(lo, hi + 1)))
    return rep


# ---------------------------------------------------------------- split cones

@dataclass
class SplitCompare:
    phi: ModuleMap        # cone(f) -> C
    psi: ModuleMap        # C -> cone(f)
    H: ModuleMap          # cone(f) -> cone(f), degree -1, 1 - psi phi = d H
    report: Report
    cone: object


def split_cone_compare(f: ModuleMap, g: ModuleMap, sigma: ModuleMap, rho: ModuleMap) -> SplitCompare:
    """Homotopy equivalence cone(f) ~ C for a degreewise split 0 -> A -> B -> C -> 0."""
    A, B, Cm = f.source, f.target, g.target
    q, F = A.base, A.field
    rep = Report("split cone")
    checks = [
        ("f closed of degree 0", f.degree == 0 and is_closed_map(f)),
        ("g closed of degree 0", g.degree == 0 and is_closed_map(g)),
        ("g f = 0", (g @ f).is_zero()),
        ("rho sigma = 0", (rho @ sigma).is_zero()),
        ("g sigma = 1", g @ sigma == ModuleMap.identity(Cm)),
        ("rho f = 1", rho @ f == ModuleMap.identity(A)),
        ("sigma g + f rho = 1", sigma @ g + f @ rho == ModuleMap.identity(B)),
        ("sigma, rho natural", is_natural(sigma) and is_natural(rho)),
    ]
    for name, ok in checks:
        if not rep.add(name, ok):
            raise ValueError(f"not split data: {name}")
    cn = module_cone(f)
    Cf = cn.module
    A1 = cn.p.target
    phi = g @ cn.s
    delta = rho @ module_map_differential(sigma)          # C -> A, degree 1
    # as a degree 0 map C -> A[1] the matrices are unchanged
    delta0 = ModuleMap(Cm, A1, 0, {X: ChainMap(Cm.values[X], A1.values[X], 0, delta.comp(X).components)
                                    for X in q.objects})
    psi = cn.j @ sigma - cn.i @ delta0
    # H(a, b) = (rho b, 0): cone -> B -> A -> A[1] -> cone, degree -1
    rb = rho @ cn.s
    Hm = cn.i @ ModuleMap(Cf, A1, -1, {X: ChainMap(Cf.values[X], A1.values[X], -1,
                                                    {n + 0: m for n, m in rb.comp(X).components.items()})
                                       for X in q.objects})
    rep.add("phi closed", is_closed_map(phi))
    rep.add("psi closed", is_closed_map(psi))
    rep.add("phi psi = 1", phi @ psi == ModuleMap.identity(Cm))
    rep.add("1 - psi phi = d H", ModuleMap.identity(Cf) - psi @ phi == module_map_differential(Hm))
    return SplitCompare(phi, psi, Hm, rep, cn)


# ---------------------------------------------------------------- truncation colimit

def _coord_map(src_mod, tgt_mod, picks, q):
    """Degree 0 map whose matrices place source basis vectors at given target positions.

    picks(A, n) -> list of target positions, one per source basis vector.
    """
    F = q.field
    comps = {}
    for A in q.objects:
        cm = {}
        for n, dim in src_mod.values[A].dims.items():
            pos = picks(A, n)
            cm[n] = Matrix(F, tgt_mod.values[A].dim(n), dim, {(p, c): 1 for c, p in enumerate(pos)})
        comps[A] = ChainMap(src_mod.values[A], tgt_mod.values[A], 0, cm)
    return ModuleMap(src_mod, tgt_mod, 0, comps)


@dataclass
class TruncationSequence:
    seq: ModuleSequence        # Tot sigma_{>= hi} X -> Tot sigma_{>= hi-1} X -> ...
    thresholds: list           # p -> hi - p
    tot: DgModule
    layout: object
    layouts: list
    phis: list                 # Tot sigma_{>= hi-p} X -> Tot X


def truncation_sequence(X) -> TruncationSequence:
    from .twisted import TotLayout, restrict, totalize, totalize_map, inclusion, stupid_truncate
    lo, hi = X.window()
    P = hi - lo
    sigmas = [restrict(X, lo=hi - p) for p in range(P + 1)]
    layouts = [TotLayout(s) for s in sigmas]
    tots = [totalize(s, L) for s, L in zip(sigmas, layouts)]
    LX = TotLayout(X)
    TX = totalize(X, LX)
    steps = [totalize_map(stupid_truncate(X, hi - p).phi_step, tots[p], tots[p + 1]) for p in range(P)]
    phis = [totalize_map(inclusion(s, X), T, TX) for s, T in zip(sigmas, tots)]
    return TruncationSequence(ModuleSequence(tots, steps), [hi - p for p in range(P + 1)], TX, LX, layouts, phis)


def verify_truncation_hocolim(X, window=None) -> Report:
    """Telescope lemma on the truncation sequence, with Y = Tot X."""
    if X.is_zero:
        rep = Report("hocolim cohomology")
        rep.add("empty complex", True)
        return rep
    ts = truncation_sequence(X)
    if window is None:
        lo, hi = ts.tot.bounds()
        window = (lo - 1, hi + 1)
    return verify_hocolim_cohomology(ts.seq, window, ts.thresholds, ts.tot, ts.phis)


def verify_truncation_colimit(X) -> Report:
    q = X.base
    rep = Report("truncation colimit")
    lo, hi = X.window()
    if X.is_zero:
        rep.add("empty complex", True)
        return rep
    P = hi - lo
    ts = truncation_sequence(X)
    seq, tots, layouts, TX, LX, phis, steps = ts.seq, ts.seq.terms, ts.layouts, ts.tot, ts.layout, ts.phis, ts.seq.maps

    # (a) nested subcomplexes exhausting Tot X, identified by basis position
    ok = all(phis[p + 1] @ steps[p] == phis[p] for p in range(P))
    rep.add("phi_{n-1} o phi_step = phi_n", ok)
    ok = tots[-1] == TX and phis[-1] == ModuleMap.identity(TX)
    rep.add("union is Tot X", ok)

    # (b) 0 -> (+)_{p<P} -> (+)_p -> Tot X -> 0, split in each degree
    h = hocolim_modules(seq)
    S, T = h.source_sum, h.target_sum
    f = h.shift_map
    g = block_module_map(T, tots, TX, [TX], 0, {(0, p): phis[p] for p in range(P + 1)})
    rep.add("g f = 0", (g @ f).is_zero())

    # section: a basis vector of Tot X at index j goes to the summand where j first appears
    def sec_picks(A, n):
        out = []
        blocks = LX.blocks[A].get(n, ([], 0))[0]
        offs = []
        acc = 0
        for t in tots:
            offs.append(acc)
            acc += t.values[A].dim(n)
        for (j, b, Ob, off, size) in blocks:
            p = hi - j
            kb = layouts[p].keyed(A, n)[(j, b)]
            out.extend(offs[p] + kb[3] + s for s in range(size))
        return out
    sigma = _coord_map(TX, T, sec_picks, q)
    rep.add("g sigma = 1", g @ sigma == ModuleMap.identity(TX))
    rho = _solve_retraction(f, sigma, g, S, T)
    if rho is None:
        rep.add("retraction exists", False)
        return rep
    sc = split_cone_compare(f, g, sigma, rho)
    rep.extend(sc.report, "split: ")
    # (c) telescope comparison: phi o j_p = Tot(phi_p)
    for p in range(P + 1):
        rep.add(f"phi o j_{p} = Tot(phi_{hi - p})", sc.phi @ h.j[p] == phis[p])
    lo_deg, hi_deg = TX.bounds()
    rep.add("phi quasi-iso", all(map_verdict(sc.phi, i) == "iso" for i in range(lo_deg - 1, hi_deg + 2)))
    rep.extend(check_hocolim(h, seq))
    return rep


def _solve_retraction(f, sigma, g, S, T):
    """rho = f^{-1}(1 - sigma g), solved degreewise."""
    q, F = S.base, S.field
    e = ModuleMap.identity(T) - sigma @ g
    comps = {}
    for A in q.objects:
        cm = {}
        for n in T.values[A].degrees():
            fm = f.comp(A).comp(n)
            em = e.comp(A).comp(n)
            cols = []
            for c in range(em.ncols):
                v = solve_particular(fm, em.column(c))
                if v is NoSolution:
                    return None
                cols.append(v)
            cm[n] = Matrix.from_columns(F, S.values[A].dim(n), cols)
        comps[A] = ChainMap(T.values[A], S.values[A], 0, cm)
    return ModuleMap(T, S, 0, comps)


def verify_truncation_stabilization(X) -> Report:
    """H^i(Tot sigma_{>= n} X) -> H^i(Tot X) is iso above n and onto at n, for every n."""
    rep = Report("truncation stabilization")
    if X.is_zero:
        rep.add("empty complex", True)
        return rep
    ts = truncation_sequence(X)
    lo, hi = ts.tot.bounds()
    for n, phi in zip(ts.thresholds, ts.phis):
        bad = []
        for i in range(min(lo, n), hi + 1):
            v = map_verdict(phi, i)
            if i > n and v != "iso" or i == n and v not in ("iso", "epi"):
                bad.append(f"H^{i} {v}")
        rep.add(f"sigma >= {n}", not bad, ", ".join(bad))
    return rep
