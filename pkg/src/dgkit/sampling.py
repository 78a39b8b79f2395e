"""Random instances for the property and acceptance suites.

Twisted complexes are grown by iterated cones: start from objects at the
top index, then repeatedly attach a new entry one index lower through a
random closed one-sided degree 0 map.  Every output satisfies the MC
identity by construction, so no rejection step is needed.
"""
from __future__ import annotations

import random

from .dg_category import DgCategory
from .dg_module import DgModule
from .graded_complex import cocycles
from .twisted import (TwistedComplex, TwMorphism, is_closed, mc_hom_complex, tw_cone, tw_hom_complex,
                      totalize)


def _rng(seed_or_rng):
    return seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)


def random_objects(q: DgCategory, rng, lo=0, hi=2):
    return [rng.choice(q.objects) for _ in range(rng.randint(lo, hi))]


def random_combination(F, vectors, rng, density=0.7):
    if not vectors:
        return []
    n = len(vectors[0])
    out = [F.zero] * n
    for v in vectors:
        if rng.random() < density:
            c = F.random_element(rng, nonzero=True)
            out = [F.norm(x + c * y) for x, y in zip(out, v)]
    return out


def random_closed_map(X: TwistedComplex, Y: TwistedComplex, rng, one_sided=True, degree=0) -> TwMorphism:
    H = (tw_hom_complex if one_sided else mc_hom_complex)(X, Y, degrees=[degree - 1, degree, degree + 1])
    Z = cocycles(H, degree)
    if not Z:
        return TwMorphism(X, Y, degree, {})
    return H.decode(degree, random_combination(X.base.field, Z, rng))


def random_twisted(q: DgCategory, seed_or_rng, width=None, max_mult=2, top=None) -> TwistedComplex:
    """Random valid one-sided twisted complex with at most ``width`` indices."""
    rng = _rng(seed_or_rng)
    width = rng.randint(1, 5) if width is None else width
    top = rng.randint(-1, 2) if top is None else top
    X = TwistedComplex.single(q, random_objects(q, rng, 1, max_mult), top)
    for n in range(top, top - width + 1, -1):
        objs = random_objects(q, rng, 0, max_mult)
        if not objs:
            continue
        src = TwistedComplex.single(q, objs, n)
        beta = random_closed_map(src, X, rng)
        X = tw_cone(beta).complex
    return X


def random_pair(q, seed_or_rng, **kw):
    rng = _rng(seed_or_rng)
    return random_twisted(q, rng, **kw), random_twisted(q, rng, **kw)


def random_non_one_sided(q, seed_or_rng, tries=200, **kw):
    """(X, Y, f) with f closed of degree 0 but not one-sided."""
    rng = _rng(seed_or_rng)
    for _ in range(tries):
        X, Y = random_pair(q, rng, **kw)
        f = random_closed_map(X, Y, rng, one_sided=False)
        if not f.one_sided:
            return X, Y, f
    raise RuntimeError("could not sample a non one-sided closed morphism")


def random_module(q: DgCategory, seed_or_rng, **kw) -> tuple[DgModule, TwistedComplex]:
    """A random hfp module, realized as the totalization of a random twisted complex."""
    X = random_twisted(q, seed_or_rng, **kw)
    return totalize(X), X


def random_split_data(q: DgCategory, seed_or_rng, **kw):
    """(f, g, sigma, rho) for 0 -> N -> cone(h) -> M[1] -> 0 with h = Tot of a random closed map."""
    from .dg_module import module_cone
    from .twisted import totalize_map
    rng = _rng(seed_or_rng)
    X, Y = random_pair(q, rng, **kw)
    h = totalize_map(random_closed_map(X, Y, rng))
    c = module_cone(h)
    return c.j, c.p, c.i, c.s
