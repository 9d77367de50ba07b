"""``pifs`` command line: one subcommand per workflow.

Exit codes: 0 success, 1 a verification failed (a witness is printed),
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys

import numpy as np

from .collage import CSV_HEADER, collage_bound_check, collage_sweep, random_collage_cases, sweep_csv
from .config import ConfigError, load_config, sequence_literal
from .conspace import ConElement, cauchy_completeness_probe, continuity_probe
from .errors import CarrierError, ConvergenceError, PreconditionError, SizeCapError
from .hyperspace import (
    Interval1D,
    directed_distance,
    format_float,
    hausdorff_partial,
    read_set,
    write_set,
)
from .ifs import attractor, condensation_contraction_check, default_tol
from .maps import affine1d, compose, lipschitz_estimate, parse_map, quad1d, semigroup_closure_check
from .pmetric import PartialMetric, verify_axioms
from .render import write_pgm
from .shiftspace import Word, address_to_point, composed_fixed_point_check

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _out_dir(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _experiment(args):
    if not args.config:
        raise UsageError(f"{args.command} needs --config PATH")
    exp = load_config(args.config)
    if getattr(args, "tol", None) is not None:
        exp.tol = args.tol
    if getattr(args, "snap", None) is not None:
        exp.snap = args.snap
    if getattr(args, "max_iter", None) is not None:
        exp.max_iter = args.max_iter
    if getattr(args, "seed_set", None):
        exp.seed_set = read_set(args.seed_set)
    return exp


def _build_ifs(exp):
    try:
        return exp.ifs()
    except (CarrierError, PreconditionError) as exc:
        raise ConfigError(f"invalid IFS in {exp.path}: {exc}") from None


def _attractor(exp, ifs):
    tol = exp.tol if exp.tol is not None else default_tol(ifs.space)
    A, diag = attractor(ifs, seed=exp.seed_set, tol=tol, max_iter=exp.max_iter, snap=exp.snap)
    return A, diag, tol


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def cmd_axioms(args):
    key = args.metric
    if key is None and args.config:
        key = load_config(args.config).space.key
    if key is None:
        key = "euclid"
    try:
        space = PartialMetric.from_key(key, allow_broken=args.allow_broken)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rng = np.random.default_rng(args.seed)
    X = space.sample(args.samples, rng)
    n_triples = args.triples
    if n_triples is None and args.samples > 200:
        n_triples = 10**4
    report = verify_axioms(space, X, tol=args.tol if args.tol is not None else 1e-12,
                           n_triples=n_triples, seed=args.seed)
    print(f"metric {space.key}: {report.n_samples} samples, {report.n_triples} triples")
    print(report)
    return OK if report.passed else FAILED


def cmd_attractor(args):
    exp = _experiment(args)
    ifs = _build_ifs(exp)
    A, diag, tol = _attractor(exp, ifs)
    out = _out_dir(args)
    write_set(os.path.join(out, "points.csv"), A)
    write_pgm(os.path.join(out, "attractor.pgm"), ifs.space, A, exp.width, exp.height)
    print(
        f"attractor: {len(A)} points after {diag.iterations} iterations; "
        f"gap {diag.gap:.3g}, h_p(A, W(A)) - self = {diag.invariance_gap:.3g}, "
        f"grid accuracy {diag.resolution:.3g}"
    )
    if diag.invariance_gap > 2 * tol:
        print(f"FAILED: h_p(A, W(A)) gap {diag.invariance_gap:.6g} > 2 * tol = {2 * tol:.6g}")
        return FAILED
    return OK


def cmd_render(args):
    exp = _experiment(args)
    if args.points:
        A = read_set(args.points)
    else:
        A, _, _ = _attractor(exp, _build_ifs(exp))
    out = _out_dir(args)
    path = os.path.join(out, "attractor.pgm")
    write_pgm(path, exp.space, A, exp.width, exp.height)
    print(f"wrote {path}")
    return OK


def cmd_collage(args):
    exp = _experiment(args)
    out = _out_dir(args)
    cases = args.cases if args.cases is not None else exp.collage.get("cases", 0)
    if cases:
        workers = args.workers if args.workers is not None else exp.collage.get("workers", 1)
        seed = args.seed if args.seed is not None else exp.collage.get("seed", 0)
        snap = exp.snap if exp.snap is not None else 2.0**-8
        results = collage_sweep(random_collage_cases(cases, seed), workers, exp.tol, snap)
        _write_text(os.path.join(out, "collage.csv"), sweep_csv(results))
        bad = [(i, r) for i, r in enumerate(results) if not r.holds]
        print(f"collage sweep: {cases - len(bad)}/{cases} cases hold")
        for i, r in bad:
            print(f"case {i}: {r.verdict()}")
        return FAILED if bad else OK
    ifs = _build_ifs(exp)
    L = exp.seed_set if args.seed_set else exp.collage.get("set")
    if L is None:
        raise UsageError("collage needs a set L: --seed-set PATH or [collage] set")
    result = collage_bound_check(ifs, L, tol=exp.tol, snap=exp.snap, max_iter=exp.max_iter)
    print(result.verdict())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerow(result.row(0))
    _write_text(os.path.join(out, "collage.csv"), buf.getvalue())
    print(buf.getvalue().splitlines()[1])
    return OK if result.holds else FAILED


def cmd_address(args):
    exp = _experiment(args)
    if not args.word:
        raise UsageError("address needs --word DIGITS")
    ifs = _build_ifs(exp)
    try:
        w = Word.parse(args.word, ifs.n_maps)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    A, _, tol = _attractor(exp, ifs)
    point, bound = address_to_point(ifs, w, A.points[0])
    check = composed_fixed_point_check(ifs, w, A, tol=max(tol, 1e-9))
    coords = [f"x{k + 1}" for k in range(ifs.space.dim)]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["word", *coords, "bound"])
    writer.writerow([str(w), *[format_float(v) for v in point], format_float(bound)])
    _write_text(os.path.join(_out_dir(args), "address.csv"), buf.getvalue())
    print(buf.getvalue().splitlines()[1])
    if not check.holds:
        print(
            f"FAILED: p(x_w, a_w) = {check.distance:.6g} > c^m diam(A) = {check.bound:.6g} "
            f"for word {w}"
        )
        return FAILED
    print(f"fixed point of f_w within {check.distance:.3g} <= {check.bound:.3g} of the address")
    return OK


def cmd_semigroup(args):
    exp = _experiment(args)
    if not exp.maps:
        raise ConfigError("semigroup needs [map.<k>] sections")
    predicate = args.predicate or exp.semigroup.get("predicate", "contraction")
    depth = args.depth if args.depth is not None else exp.semigroup.get("depth", 2)
    try:
        report = semigroup_closure_check(exp.maps, predicate, depth, exp.space)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["word", "declared", "estimate", "member"])
    for e in report.entries:
        declared = "unknown" if e.declared is None else format_float(e.declared)
        writer.writerow([" o ".join(e.word), declared, format_float(e.estimate),
                         "true" if e.member else "false"])
    _write_text(os.path.join(_out_dir(args), "semigroup.csv"), buf.getvalue())
    print(report)
    return OK if report.closed else FAILED


def cmd_conspace(args):
    exp = _experiment(args)
    cs = exp.conspace
    if not cs:
        raise ConfigError("conspace needs a [conspace] section")
    t, space = cs["t"], exp.space
    try:
        seq = []
        for n in range(1, cs["terms"] + 1):
            lit = sequence_literal(cs["sequence"], n)
            seq.append(ConElement(parse_map(lit, lip=t), t, space))
        limit = None
        if cs["limit"]:
            limit = ConElement(parse_map(cs["limit"], lip=t), t, space)
    except (CarrierError, PreconditionError) as exc:
        raise ConfigError(f"[conspace]: {exc}") from None
    out = _out_dir(args)
    if cs["mode"] == "continuity":
        if limit is None:
            raise ConfigError("[conspace] continuity mode needs a limit map")
        report = continuity_probe(seq, limit, grid=cs["grid"])
        _write_text(os.path.join(out, "conspace.csv"), report.to_csv())
        print(f"continuity probe: {len(report.rows)} terms, final excess {report.final_excess:.3g}")
        if not report.holds:
            r = report.witness
            print(
                f"FAILED at n={r.n}: p(r(f_n), r(f)) - p(r(f), r(f)) = {r.excess:.6g} "
                f"> pbar/(1-t) = {r.bound:.6g}"
            )
            return FAILED
        return OK
    report = cauchy_completeness_probe(seq, grid=cs["grid"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "pbar_to_limit"])
    for n, d in enumerate(report.distances, start=1):
        writer.writerow([n, format_float(d)])
    _write_text(os.path.join(out, "conspace.csv"), buf.getvalue())
    lim = report.limit_map.literal if report.limit_map is not None else "grid values"
    print(f"Cauchy probe: tail gap {report.tail_gap:.3g}, limit {lim}")
    if not report.in_con_t:
        print(f"FAILED: limit breaks p(f(x), f(y)) <= t p(x, y) by {report.con_excess:.6g}")
        return FAILED
    print(f"limit lies in Con_{t:g} (worst excess {report.con_excess:.3g})")
    return OK


def golden_values():
    """The pinned worked examples, computed through the public API."""
    space = PartialMetric.from_key("max")
    B1, B2, C = Interval1D(0, 1), Interval1D(2, 3), Interval1D(3, 4)
    verdict = condensation_contraction_check(C, space, probes=[(B1, B2)])
    unit = PartialMetric.from_key("max", box=((0.0,), (1.0,)))
    f = affine1d(2.0, 0.0, lip=2.0, label="f")
    g = quad1d(2.0, lip=2.0, label="g")
    return {
        "h_p(C, C)": hausdorff_partial(space, C, C),
        "rho_p(B1, B2)": directed_distance(space, B1, B2),
        "rho_p(B2, B1)": directed_distance(space, B2, B1),
        "h_p(B1, B2)": hausdorff_partial(space, B1, B2),
        "h_p(w0(B1), w0(B2))": verdict.rows[0].image_distance,
        "condensation is a contraction": verdict.contraction,
        "Lip_p(f)": lipschitz_estimate(f, unit),
        "Lip_p(g)": lipschitz_estimate(g, unit),
        "Lip_p(f o g)": lipschitz_estimate(compose(f, g), unit),
    }


GOLDEN_EXPECTED = {
    "h_p(C, C)": 4.0,
    "rho_p(B1, B2)": 2.0,
    "rho_p(B2, B1)": 3.0,
    "h_p(B1, B2)": 3.0,
    "h_p(w0(B1), w0(B2))": 4.0,
    "condensation is a contraction": False,
    "Lip_p(f)": 2.0,
    "Lip_p(g)": 2.0,
    "Lip_p(f o g)": 4.0,
}


def cmd_golden(args):
    vals = golden_values()
    w0, hb = vals["h_p(w0(B1), w0(B2))"], vals["h_p(B1, B2)"]
    print(f"{w0:g}")
    print(f"{hb:g}")
    print(f"{vals['Lip_p(f)']:g}")
    print(f"{vals['Lip_p(f o g)']:g}")
    bad = []
    for name, want in GOLDEN_EXPECTED.items():
        got = vals[name]
        tol = 1e-9 if name.startswith("Lip") else 0.0
        ok = got == want if isinstance(want, bool) else abs(got - want) <= tol
        if args.verbose:
            print(f"  {name} = {got}  (expected {want})")
        if not ok:
            bad.append(f"{name} = {got}, expected {want}")
    if bad:
        print("FAILED: " + "; ".join(bad))
        return FAILED
    print(f"condensation B -> [3,4]: h_p(w0(B1), w0(B2)) = {w0:g} > h_p(B1, B2) = {hb:g}, not a contraction")
    return OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="pifs", description="Partial iterated function systems")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(p, config=True):
        if config:
            p.add_argument("--config", metavar="PATH")
        p.add_argument("--out", metavar="DIR", default="out")
        p.add_argument("--tol", type=float)
        p.add_argument("--snap", type=float)
        p.add_argument("--max-iter", type=int, dest="max_iter")
        p.add_argument("--seed-set", metavar="PATH", dest="seed_set")
        return p

    p = common(sub.add_parser("axioms", help="check P1-P4 on random samples"))
    p.add_argument("--metric", metavar="KEY")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--triples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-broken", action="store_true", help="admit the test-only min rule")
    p.set_defaults(func=cmd_axioms)

    common(sub.add_parser("attractor", help="compute an attractor, write CSV and PGM")).set_defaults(
        func=cmd_attractor
    )

    p = common(sub.add_parser("render", help="rasterize a point set or the attractor"))
    p.add_argument("--points", metavar="PATH")
    p.set_defaults(func=cmd_render)

    p = common(sub.add_parser("collage", help="check the collage bound"))
    p.add_argument("--cases", type=int, help="random sweep size (overrides [collage] cases)")
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_collage)

    p = common(sub.add_parser("address", help="address an attractor point by a word"))
    p.add_argument("--word", metavar="DIGITS")
    p.set_defaults(func=cmd_address)

    p = common(sub.add_parser("semigroup", help="closure of a map family under composition"))
    p.add_argument("--predicate")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_semigroup)

    common(sub.add_parser("conspace", help="probe continuity or completeness in Con_t")).set_defaults(
        func=cmd_conspace
    )

    p = sub.add_parser("golden", help="reproduce the pinned worked examples")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_golden)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, ConfigError, CarrierError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (PreconditionError, ConvergenceError, SizeCapError) as exc:
        print(f"FAILED: {exc}", file=sys.stderr)
        return FAILED


def main():
    sys.exit(run())
