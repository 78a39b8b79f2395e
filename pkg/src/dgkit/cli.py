"""Command line interface.

Exit codes: 0 all checks pass, 1 a verification failed, 2 bad input,
3 a hypothesis of the computation does not hold (for example hlc).
"""
from __future__ import annotations

import argparse
import random
import sys
from dataclasses import dataclass

from .dg_category import H0Category, check_nonpositive_cohomology, validate_dg_category
from .dg_module import check_hlc, validate_module, yoneda
from .exact_field import FieldSpec, default_field
from .fixtures import MAIN_FIXTURES, fixture
from .graded_complex import cohomology_dim
from .io import (FormatError, category_to_text, dumps, load_category, load_module, load_morphism, load_twisted,
                 module_to_dict, morphism_file_dict, read_json, write_text)
from .report import Report
from .twisted import (NotReducible, certify_reduction, make_one_sided, stupid_truncate, totalize, tw_cone,
                      twisted_to_dict, validate_twisted)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2, 3
SUITES = ("quasi-ff", "truncation", "hocolim", "comparison", "heart", "derived-proj")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    field: FieldSpec | None
    window: int | None
    seed: int
    samples: int
    command: str

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("--samples must be at least 1")
        if self.window is not None and self.window < 0:
            raise InputError("--window must be nonnegative")


def parse_range(text: str):
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise InputError(f"bad range {text!r}; expected a..b")
    if lo > hi:
        raise InputError(f"empty range {text!r}")
    return lo, hi


def _emit(out, text):
    out.write(text if text.endswith("\n") else text + "\n")


def _result(rep: Report, out, verbose=True) -> int:
    _emit(out, rep.render(verbose))
    return EXIT_OK if rep.ok else EXIT_FAIL


def _write_or_print(text, path, out):
    if path:
        write_text(path, text)
        _emit(out, f"wrote {path}")
    else:
        _emit(out, text)


def _base(args):
    return load_category(args.base, args.field) if getattr(args, "base", None) else None


# ---------------------------------------------------------------- plain commands

def cmd_validate(args, out):
    path = args.file
    if path.endswith(".dgm"):
        _, M = load_module(path, _base(args), args.field)
        return _result(validate_module(M), out, args.verbose)
    if path.endswith(".twc"):
        _, X = load_twisted(path, _base(args), args.field)
        return _result(validate_twisted(X), out, args.verbose)
    q = load_category(path, args.field)
    rep = validate_dg_category(q)
    if not rep.ok:
        return _result(rep, out, args.verbose)
    w = check_nonpositive_cohomology(q)
    rep.add("nonpositive cohomology", w is None, "" if w is None else f"H^{w[2]} hom({w[0]},{w[1]}) != 0")
    return _result(rep, out, args.verbose)


def cmd_h0(args, out):
    q = load_category(args.file, args.field)
    H = H0Category(q)
    _emit(out, f"H0 of {args.file} over {q.field}")
    for A in q.objects:
        for B in q.objects:
            _emit(out, f"dim H0({A},{B}) = {H.dim(A, B)}")
    return _result(H.check(), out, args.verbose)


def cmd_hlc(args, out):
    q = load_category(args.file, args.field)
    rep = check_hlc(q)
    _emit(out, rep.render(True))
    return EXIT_OK if rep.ok else EXIT_HYPOTHESIS


def cmd_cohomology(args, out):
    lo, hi = parse_range(args.range)
    if args.file.endswith(".twc"):
        q, X = load_twisted(args.file, _base(args), args.field)
        M = totalize(X)
    else:
        q, M = load_module(args.file, _base(args), args.field)
    for i in range(lo, hi + 1):
        dims = " ".join(f"{A}:{cohomology_dim(M.values[A], i)}" for A in q.objects)
        _emit(out, f"H^{i} {dims}")
    return EXIT_OK


def cmd_tot(args, out):
    q, X = load_twisted(args.file, _base(args), args.field)
    M = totalize(X)
    data = module_to_dict(M, read_json(args.file).get("base"))
    _write_or_print(dumps(data), args.out, out)
    return EXIT_OK


def cmd_cone(args, out):
    q, X = load_twisted(args.file, _base(args), args.field)
    f = load_morphism(args.map, X, args.field)
    try:
        C = tw_cone(f).complex
    except ValueError as e:
        raise InputError(str(e))
    rep = validate_twisted(C)
    _write_or_print(dumps(twisted_to_dict(C, read_json(args.file).get("base"))), args.out, out)
    return _result(rep, out, args.verbose)


def cmd_truncate(args, out):
    q, X = load_twisted(args.file, _base(args), args.field)
    tr = stupid_truncate(X, args.at)
    _write_or_print(dumps(twisted_to_dict(tr.sigma, read_json(args.file).get("base"))), args.out, out)
    rep = validate_twisted(tr.sigma)
    return _result(rep, out, args.verbose)


def cmd_reduce(args, out):
    q, X = load_twisted(args.file, _base(args), args.field)
    f = load_morphism(args.map, X, args.field)
    try:
        red = make_one_sided(f)
    except NotReducible as e:
        _emit(out, f"FAIL not reducible: {e}")
        return EXIT_FAIL
    except ValueError as e:
        raise InputError(str(e))
    rep = Report("reduce-onesided")
    rep.extend(red.report)
    rep.extend(certify_reduction(f, red))
    data = {"format": 1, "g": morphism_file_dict(red.g, False), "alpha": morphism_file_dict(red.alpha, False)}
    _write_or_print(dumps(data), args.out, out)
    return _result(rep, out, args.verbose)


def cmd_resolve(args, out):
    from .resolution import render_trace, resolve
    q = load_category(args.dgc, args.field)
    _, M = load_module(args.dgm, q)
    tr = resolve(M, args.window)
    if args.trace:
        write_text(args.trace, render_trace(tr))
        _emit(out, f"wrote {args.trace}")
    return _result(tr.report(), out, args.verbose)


def cmd_reconstruct(args, out):
    from .resolution import reconstruct
    q = load_category(args.dgc, args.field)
    _, M = load_module(args.dgm, q)
    rec = reconstruct(M, args.window)
    base_ref = args.dgc
    _write_or_print(dumps(twisted_to_dict(rec.X, base_ref)), args.out, out)
    return _result(rec.certificate, out, args.verbose)


# ---------------------------------------------------------------- verification suites

def _rng(seed, name, k):
    return random.Random(f"{seed}/{name}/{k}")


def run_suite(suite: str, name: str, q, cfg: RunConfig, complexes=None) -> Report:
    """One suite on one base category; sample k uses its own seeded generator."""
    from .holim import (split_cone_compare, verify_truncation_colimit, verify_truncation_hocolim,
                        verify_truncation_stabilization)
    from .resolution import verify_comparison, verify_quasi_ff
    from .sampling import random_module, random_pair, random_split_data, random_twisted
    from .tstructure import derived_projective_check, heart_compare, heart_samples, karoubian_check
    K = cfg.samples
    rep = Report(f"{suite} on {name} ({q.field}, seed {cfg.seed}, {K} samples)")
    if suite == "quasi-ff":
        pairs = [random_pair(q, _rng(cfg.seed, name, k)) for k in range(K)]
        rep.extend(verify_quasi_ff(q, pairs))
    elif suite in ("truncation", "hocolim"):
        Xs = complexes if complexes is not None else [random_twisted(q, _rng(cfg.seed, name, k)) for k in range(K)]
        for k, X in enumerate(Xs):
            if suite == "truncation":
                rep.extend(verify_truncation_stabilization(X), f"sample {k}: ")
                rep.extend(verify_truncation_colimit(X), f"sample {k}: ")
            else:
                rep.extend(verify_truncation_hocolim(X), f"sample {k}: ")
        if suite == "hocolim" and complexes is None:
            for k in range(K):
                sc = split_cone_compare(*random_split_data(q, _rng(cfg.seed, name + "/split", k)))
                rep.extend(sc.report, f"split {k}: ")
    elif suite == "comparison":
        W = cfg.window if cfg.window is not None else 4
        samples = [random_module(q, _rng(cfg.seed, name, k))[0] for k in range(K)]
        rep.extend(verify_comparison(q, samples, W))
    elif suite == "heart":
        rep.extend(karoubian_check(q, seed=cfg.seed))
        rep.extend(heart_compare(q, heart_samples(q, _rng(cfg.seed, name, 0), K)))
    elif suite == "derived-proj":
        samples = [random_module(q, _rng(cfg.seed, name, k))[0] for k in range(K)]
        for A in q.objects:
            rep.extend(derived_projective_check(q, A, samples + [yoneda(q, A)]), f"{A}: ")
    else:
        raise InputError(f"unknown suite {suite!r}")
    return rep


def cmd_verify(args, out):
    cfg = RunConfig(args.field, args.window, args.seed, args.samples, "verify " + args.suite)
    targets = []
    complexes = None
    if args.twc:
        q, X = load_twisted(args.twc, _base(args), args.field)
        targets.append((args.twc, q))
        complexes = [X]
        if args.suite not in ("truncation", "hocolim"):
            raise InputError("--twc only applies to the truncation and hocolim suites")
    elif args.base:
        targets.append((args.base, load_category(args.base, args.field)))
    else:
        names = args.fixture or list(MAIN_FIXTURES)
        F = args.field or default_field()
        for n in names:
            try:
                targets.append((n, fixture(n, F)))
            except KeyError as e:
                raise InputError(str(e.args[0]))
    code = EXIT_OK
    for name, q in targets:
        if args.suite in ("quasi-ff", "comparison", "heart", "derived-proj"):
            hl = check_hlc(q)
            if not hl.ok:
                _emit(out, hl.render(True))
                _emit(out, f"hypothesis failure on {name}: base is not hlc")
                return EXIT_HYPOTHESIS
        rep = run_suite(args.suite, name, q, cfg, complexes)
        _emit(out, rep.render(args.verbose))
        if not rep.ok:
            code = EXIT_FAIL
    return code


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgkit", description="Exact computations with twisted complexes over dg-categories.")
    p.add_argument("--field", type=_field_arg, default=None,
                   help="coefficient field, e.g. Q or F101 (fixtures default to $DGKIT_FIELD, else F101)")
    p.add_argument("-v", "--verbose", action="store_true", help="print passing checks too")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(func=fn)
        s.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
        return s

    s = cmd("validate", cmd_validate, "check axioms of a .dgc, .dgm or .twc file")
    s.add_argument("file")
    s.add_argument("--base")
    s = cmd("h0", cmd_h0, "print H0 of a dg-category")
    s.add_argument("file")
    s = cmd("hlc", cmd_hlc, "check the hlc hypotheses")
    s.add_argument("file")
    s = cmd("cohomology", cmd_cohomology, "cohomology dims of a module or a totalized twisted complex")
    s.add_argument("file")
    s.add_argument("--range", required=True)
    s.add_argument("--base")
    s = cmd("tot", cmd_tot, "totalize a twisted complex into a .dgm module")
    s.add_argument("file")
    s.add_argument("--base")
    s.add_argument("-o", "--out")
    s = cmd("cone", cmd_cone, "cone of a closed degree 0 one-sided map")
    s.add_argument("file")
    s.add_argument("map")
    s.add_argument("--base")
    s.add_argument("-o", "--out")
    s = cmd("truncate", cmd_truncate, "stupid truncation at an index")
    s.add_argument("file")
    s.add_argument("--at", type=int, required=True)
    s.add_argument("--base")
    s.add_argument("-o", "--out")
    s = cmd("reduce-onesided", cmd_reduce, "make a closed map one-sided up to homotopy")
    s.add_argument("file")
    s.add_argument("map")
    s.add_argument("--base")
    s.add_argument("-o", "--out")
    s = cmd("resolve", cmd_resolve, "resolve a module by a twisted complex")
    s.add_argument("dgc")
    s.add_argument("dgm")
    s.add_argument("--window", type=int, required=True)
    s.add_argument("--trace")
    s = cmd("reconstruct", cmd_reconstruct, "twisted complex whose totalization models the module")
    s.add_argument("dgc")
    s.add_argument("dgm")
    s.add_argument("--window", type=int, required=True)
    s.add_argument("-o", "--out")
    s = cmd("verify", cmd_verify, "randomized verification suites")
    s.add_argument("suite", choices=SUITES)
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--window", type=int)
    s.add_argument("--fixture", action="append")
    s.add_argument("--base")
    s.add_argument("--twc")
    return p


def _field_arg(text):
    try:
        return FieldSpec.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _join_negative(argv):
    """Let ``--range -4..1`` through: argparse would read -4..1 as an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--range" and i + 1 < len(argv):
            out.append(f"--range={argv[i + 1]}")
            i += 2
            continue
        out.append(argv[i])
        i += 1
    return out


def run_command(argv, out=None) -> int:
    from .resolution import HypothesisFailure
    out = out or sys.stdout
    parser = build_parser()
    argv = _join_negative(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        return args.func(args, out)
    except (FormatError, InputError, FileNotFoundError) as e:
        _emit(sys.stderr, f"dgkit: input error: {e}")
        return EXIT_INPUT
    except HypothesisFailure as e:
        _emit(out, f"hypothesis failure: {e}")
        return EXIT_HYPOTHESIS


def main(argv=None):
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
