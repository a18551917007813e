"""Command-line surface: validation, transforms, probability engines, the
brute-force oracle, dataset generators, and a benchmark harness.

Every subcommand prints one JSON report document on stdout.  Exit codes:
0 success, 1 usage error, 2 validation failure, 3 guard-rail rejection.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time

from . import kernels
from .esmengine import expected_separation_margin
from .model import (DatasetError, gen_cluster_stress, gen_multipoint,
                    gen_random, jitter_dataset, parse_dataset,
                    serialize_dataset, sgpp_transform)
from .numeric import EXACT, FLOAT, NumericContext, rat, rat_str
from .objects import (ball_expected_margin, ball_separable_probability,
                      gen_balls, reduce_polytopes, validate_ball_positions)
from .oracle import (GuardExceeded, brute_esm, brute_sp, enumerate_margins)
from .position import GP, SGPP, PositionError, matrix_orthonormality_error
from .sch import SCHQuery
from .spengine import separable_probability

MAX_DIMENSION = 6
MAX_CANDIDATE_BUDGET = 10 ** 9

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_GUARD = 3


class GuardRejected(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"usage error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def _load(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_dataset(text), {"path": path, "sha256": _digest(text)}


def _prob_value(value):
    if isinstance(value, float):
        return {"decimal": repr(value)}
    return {"rational": rat_str(value), "decimal": repr(float(value))}


def _context(args) -> NumericContext:
    mode = getattr(args, "mode", "exact")
    eps = getattr(args, "eps", None)
    if eps is None:
        return EXACT if mode == "exact" else FLOAT
    return NumericContext(mode, eps)


def _check_budget(dataset, force):
    if dataset.dimension > MAX_DIMENSION and not force:
        raise GuardRejected(
            f"dimension {dataset.dimension} above the guard of {MAX_DIMENSION}; "
            "pass --force to override")
    m = len(dataset.locations)
    budget = 0
    ell = dataset.dimension
    while ell >= 2:
        budget += math.comb(m, ell)
        ell -= 2
    if budget > MAX_CANDIDATE_BUDGET and not force:
        raise GuardRejected(
            f"candidate budget {budget} above {MAX_CANDIDATE_BUDGET}; "
            "pass --force to override")


# ---------------------------------------------------------------------------
# subcommand handlers: each returns (results, diagnostics, warnings)

def _cmd_validate(args):
    dataset, inputs = _load(args.input)
    level = args.level
    if dataset.max_radius() > 0:
        validate_ball_positions(dataset)
        return inputs, {"ok": True, "level": "ball"}, {}, []
    report = dataset.validate_positions(level)
    results = {"ok": report.ok, "level": level,
               "violations": [{"space_dim": v.space_dim,
                               "dropped_coords": v.drop_prefix,
                               "locations": list(v.indices)}
                              for v in report.violations]}
    if not report.ok:
        raise _ValidationFailure(inputs, results)
    return inputs, results, {}, []


class _ValidationFailure(Exception):
    def __init__(self, inputs, results):
        self.inputs = inputs
        self.results = results


def _cmd_transform(args):
    dataset, inputs = _load(args.input)
    matrix, transformed = sgpp_transform(dataset)
    out = serialize_dataset(transformed)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    results = {"orthonormality_error": matrix_orthonormality_error(matrix),
               "matrix": [[rat_str(x) for x in row] for row in matrix],
               "output": args.output}
    return inputs, results, {}, []


def _sp_common(args, dataset):
    _check_budget(dataset, args.force)
    ctx = _context(args)
    t0 = time.perf_counter()
    res = separable_probability(dataset, strategy=args.strategy, ctx=ctx,
                                threads=args.threads)
    elapsed = time.perf_counter() - t0
    results = {"sp": _prob_value(res.sp)}
    diagnostics = {
        "strategy": res.strategy,
        "mode": ctx.mode,
        "seconds": elapsed,
        "kernel": kernels.kernel_applicable(dataset, ctx, args.strategy,
                                            args.threads),
        "levels": [{"dimension": lv.dimension,
                    "trivial": _prob_value(lv.trivial),
                    "tau_sum": _prob_value(lv.tau_sum),
                    "candidates": lv.candidates} for lv in res.per_level],
    }
    return results, diagnostics


def _cmd_sp(args):
    dataset, inputs = _load(args.input)
    results, diagnostics = _sp_common(args, dataset)
    return inputs, results, diagnostics, []


def _cmd_esm(args):
    dataset, inputs = _load(args.input)
    _check_budget(dataset, args.force)
    t0 = time.perf_counter()
    res = expected_separation_margin(dataset, collect=args.exact_margins)
    elapsed = time.perf_counter() - t0
    results = {"esm": {"decimal": repr(res.emar)},
               "xi_sum": _prob_value(res.xi_sum),
               "config_count": res.config_count}
    if args.exact_margins:
        results["margins_squared"] = sorted(
            {rat_str(c.margin_sq) for c in res.configs})
    return inputs, results, {"seconds": elapsed}, []


def _cmd_sp_objects(args):
    dataset, inputs = _load(args.input)
    dataset = reduce_polytopes(dataset)
    if dataset.max_radius() == 0:
        results, diagnostics = _sp_common(args, dataset)
        return inputs, results, diagnostics, []
    t0 = time.perf_counter()
    value = ball_separable_probability(dataset)
    elapsed = time.perf_counter() - t0
    return inputs, {"sp": _prob_value(value)}, {"seconds": elapsed,
                                                "engine": "ball"}, []


def _cmd_esm_objects(args):
    dataset, inputs = _load(args.input)
    dataset = reduce_polytopes(dataset)
    t0 = time.perf_counter()
    if dataset.max_radius() == 0:
        value = expected_separation_margin(dataset).emar
        engine = "point"
    else:
        value = ball_expected_margin(dataset)
        engine = "ball"
    elapsed = time.perf_counter() - t0
    return inputs, {"esm": {"decimal": repr(value)}}, {"seconds": elapsed,
                                                       "engine": engine}, []


def _cmd_sch(args):
    dataset, inputs = _load(args.input)
    flat = tuple(rat(x) for x in args.query)
    d = dataset.dimension
    if len(flat) % d:
        raise DatasetError(f"query coordinates must come in groups of {d}")
    points = tuple(flat[i:i + d] for i in range(0, len(flat), d))
    if args.kind != "intersection" and len(points) != 1:
        raise DatasetError("this query kind takes a single point")
    query = SCHQuery(kind=args.kind, query_points=points,
                     eps=rat(args.eps_value))
    value = query.evaluate(dataset)
    key = "probability" if args.kind != "expected-distance" else "expected_distance"
    payload = _prob_value(value) if args.kind != "expected-distance" \
        else {"decimal": repr(value)}
    return inputs, {key: payload, "kind": args.kind}, {}, []


def _cmd_oracle(args):
    dataset, inputs = _load(args.input)
    results = {}
    t0 = time.perf_counter()
    if args.quantity in ("sp", "all"):
        results["sp"] = _prob_value(brute_sp(dataset, force=args.force))
    if args.quantity in ("esm", "all"):
        results["esm"] = {"decimal": repr(brute_esm(dataset, force=args.force))}
    if args.quantity in ("margins", "all"):
        census = enumerate_margins(dataset, force=args.force)
        results["margin_census"] = {"count": census.count, "tier": census.tier,
                                    "margins": list(census.margins)}
    return inputs, results, {"seconds": time.perf_counter() - t0}, []


def _cmd_gen(args):
    if args.jitter is not None:
        if not args.input:
            raise DatasetError("--jitter needs --input")
        ds, _ = _load(args.input)
        ds = jitter_dataset(ds, args.jitter, seed=args.seed,
                            level=args.level)
        out = serialize_dataset(ds)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(out + "\n")
            results = {"output": args.output, "sha256": _digest(out)}
        else:
            results = {"dataset": json.loads(out), "sha256": _digest(out)}
        return {}, results, {"jitter": args.jitter}, []
    if args.kind == "random":
        ds = gen_random(args.reds, args.blues, args.dimension,
                        prob_law=args.prob_law, seed=args.seed,
                        level=SGPP if args.level == "sgpp" else GP)
    elif args.kind == "cluster":
        ds = gen_cluster_stress(args.reds, args.blues, args.dimension,
                                rat(args.eps_value), seed=args.seed)
    elif args.kind == "multipoint":
        ds = gen_multipoint(args.reds, args.blues, args.dimension,
                            seed=args.seed)
    else:
        ds = gen_balls(args.reds, args.blues, args.dimension, seed=args.seed)
    out = serialize_dataset(ds)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
        results = {"output": args.output, "sha256": _digest(out)}
    else:
        results = {"dataset": json.loads(out), "sha256": _digest(out)}
    return {}, results, {"locations": len(ds.locations)}, []


def _closed_form_candidates(nr, nb, d):
    total = 0
    ell = d
    while ell >= 2:
        total += (math.comb(nr + nb, ell) - math.comb(nr, ell)
                  - math.comb(nb, ell))
        ell -= 2
    return total


def _cmd_bench(args):
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = []
    for n_blue in sizes:
        ds = gen_random(args.reds, n_blue, args.dimension, seed=args.seed,
                        level=SGPP)
        runs = {}
        res = None
        for label, kwargs in (
                ("scan-kernel", dict(strategy="scan", ctx=FLOAT, use_kernel=True)),
                ("scan-pure", dict(strategy="scan", ctx=FLOAT, use_kernel=False)),
                ("radial", dict(strategy="radial", ctx=FLOAT)),
                ("exact-scan", dict(strategy="scan")),
                ("exact-radial", dict(strategy="radial"))):
            if label == "scan-kernel" and not kernels.compiled_active():
                continue
            t0 = time.perf_counter()
            res = separable_probability(ds, validate=False, **kwargs)
            runs[label] = time.perf_counter() - t0
        expected = _closed_form_candidates(args.reds, n_blue, args.dimension)
        if res.candidate_count != expected:
            raise AssertionError(
                f"candidate count {res.candidate_count} != closed form {expected}")
        rows.append({"reds": args.reds, "blues": n_blue,
                     "candidates": res.candidate_count,
                     "closed_form": expected,
                     "seconds": {k: round(v, 6) for k, v in runs.items()}})
    growth = None
    if len(rows) >= 2 and rows[0]["candidates"]:
        growth = (math.log(rows[-1]["candidates"] / rows[0]["candidates"])
                  / math.log(sizes[-1] / sizes[0]))
    results = {"table": rows, "candidate_growth_exponent": growth,
               "kernel_available": kernels.compiled_active()}
    return {}, results, {"dimension": args.dimension}, []


# ---------------------------------------------------------------------------

def _build_parser():
    parser = _Parser(prog="stochsep",
                     description="separability probabilities for stochastic "
                                 "bichromatic geometric data")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, force=True, threads=False):
        p.add_argument("--format", choices=("json", "text"), default="json")
        if force:
            p.add_argument("--force", action="store_true",
                           help="override guard rails")
        if threads:
            p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("validate", help="check general position")
    p.add_argument("--input", required=True)
    p.add_argument("--level", choices=(GP, SGPP), default=SGPP)
    add_common(p, force=False)

    p = sub.add_parser("transform", help="repair projection-level degeneracy")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    add_common(p, force=False)

    for name in ("sp", "sp-objects"):
        p = sub.add_parser(name, help="separable-probability")
        p.add_argument("--input", required=True)
        p.add_argument("--mode", choices=("exact", "float"), default="exact")
        p.add_argument("--strategy", choices=("scan", "radial"), default="scan")
        p.add_argument("--eps", type=float, default=None)
        add_common(p, threads=True)

    for name in ("esm", "esm-objects"):
        p = sub.add_parser(name, help="expected separation-margin")
        p.add_argument("--input", required=True)
        p.add_argument("--exact-margins", action="store_true",
                       help="report exact squared margins per config")
        add_common(p)

    p = sub.add_parser("sch", help="stochastic convex-hull queries")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True,
                   choices=("membership", "intersection", "eps-distant",
                            "expected-distance"))
    p.add_argument("--query", required=True, nargs="+",
                   help="query coordinates (vertex list for intersection)")
    p.add_argument("--eps-value", default="0")
    add_common(p, force=False)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    p.add_argument("--input", required=True)
    p.add_argument("--quantity", choices=("sp", "esm", "margins", "all"),
                   default="all")
    add_common(p)

    p = sub.add_parser("gen", help="seeded dataset generators")
    p.add_argument("--kind", choices=("random", "cluster", "multipoint", "balls"),
                   default="random")
    p.add_argument("--reds", type=int, required=True)
    p.add_argument("--blues", type=int, required=True)
    p.add_argument("--dimension", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prob-law", default="uniform")
    p.add_argument("--eps-value", default="1/100")
    p.add_argument("--level", choices=(GP, SGPP), default=SGPP)
    p.add_argument("--output")
    p.add_argument("--input", help="with --jitter: dataset to perturb")
    p.add_argument("--jitter", help="perturb an existing dataset by at most "
                                    "this magnitude per coordinate")
    add_common(p, force=False)

    p = sub.add_parser("bench", help="timing and candidate-count scaling")
    p.add_argument("--dimension", type=int, default=2)
    p.add_argument("--reds", type=int, default=4)
    p.add_argument("--sizes", default="16,32,64")
    p.add_argument("--seed", type=int, default=0)
    add_common(p, force=False)
    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "transform": _cmd_transform,
    "sp": _cmd_sp,
    "esm": _cmd_esm,
    "sp-objects": _cmd_sp_objects,
    "esm-objects": _cmd_esm_objects,
    "sch": _cmd_sch,
    "oracle": _cmd_oracle,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def _emit(doc, fmt):
    if fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True, default=str))
    else:
        for key, value in doc.get("results", {}).items():
            print(f"{key}: {value}")
        for warning in doc.get("warnings", []):
            print(f"warning: {warning}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    fmt = getattr(args, "format", "json")
    doc = {"subcommand": args.subcommand}
    try:
        inputs, results, diagnostics, warnings = _HANDLERS[args.subcommand](args)
        doc.update(inputs=inputs, results=results, diagnostics=diagnostics,
                   warnings=warnings)
        _emit(doc, fmt)
        return EXIT_OK
    except _ValidationFailure as exc:
        doc.update(inputs=exc.inputs, results=exc.results, diagnostics={},
                   warnings=["general position validation failed"])
        _emit(doc, fmt)
        return EXIT_VALIDATION
    except (GuardRejected, GuardExceeded) as exc:
        doc.update(inputs={}, results={}, diagnostics={}, warnings=[str(exc)])
        _emit(doc, fmt)
        return EXIT_GUARD
    except (PositionError, DatasetError, ValueError) as exc:
        payload = {"error": str(exc)}
        report = getattr(exc, "report", None)
        if report is not None:
            payload["violations"] = [
                {"space_dim": v.space_dim, "dropped_coords": v.drop_prefix,
                 "locations": list(v.indices)} for v in report.violations]
        doc.update(inputs={}, results=payload, diagnostics={},
                   warnings=[str(exc)])
        _emit(doc, fmt)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
