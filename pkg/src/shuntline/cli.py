"""Command line front end.

Every subcommand reads a spec (``--spec FILE`` or ``--example NAME``),
prints a JSON report on stdout (or ``--out FILE``), and exits

* 0 on success,
* 1 when the spec is invalid or the request cannot be satisfied,
* 2 when a verdict is undetermined and needs an endpoint hint,
* 3 on usage errors.

Values that begin with ``-`` (negative numbers, ``-inf``) must use the
``--flag=value`` form, e.g. ``--window=-2.5,2.5``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import numbers
import sys

from .boundary import boundary_profile
from .classify import lambda_sets
from .dirichlet import check_adapted, check_regular_form
from .errors import GraphBuildError, ShuntlineError, UndeterminedVerdict
from .examples import get_example, list_examples
from .graph import build_graph, communication_classes
from .hunt import check_hunt
from .model import load_spec, serialize_spec, spec_digest, validate
from .sets import RealSet
from .simulate import (ALIVE, MODE_FULL, MODE_KILLED, MODE_PART,
                       STATUS_NAMES, build_chain, estimate_hitting,
                       estimate_symmetry_defect, run, simulate_path)
from .symmetry import canonical_measure, check_symmetrizable, measure_family

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _jsonify(obj):
    """Recursively coerce report values into plain JSON types."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, numbers.Integral):
        return int(obj)
    if isinstance(obj, numbers.Real):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, RealSet):
        return [{"lo": _jsonify(a), "hi": _jsonify(b),
                 "lo_closed": ca, "hi_closed": cb}
                for a, b, ca, cb in obj.intervals]
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _emit(report, out_path) -> None:
    text = json.dumps(_jsonify(report), indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text: str, n: int, what: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise _UsageError(f"{what} needs {n} comma-separated values")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise _UsageError(f"bad {what}: {exc}")


def _load(args):
    if args.example:
        return get_example(args.example)
    return load_spec(args.spec)


def _base_report(spec) -> dict:
    rep = validate(spec)
    return {
        "name": spec.name,
        "digest": spec_digest(spec),
        "validation": {
            "ok": rep.ok,
            "violations": [{"code": v.code, "where": v.where,
                            "message": v.message} for v in rep.violations],
        },
    }


def _checked_base(spec, args):
    """(report, failed) with the validation gate applied."""
    report = _base_report(spec)
    if not report["validation"]["ok"]:
        _emit(report, args.out)
        return report, True
    return report, False


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    spec = _load(args)
    report = _base_report(spec)
    _emit(report, args.out)
    return 0 if report["validation"]["ok"] else 1


def cmd_classify(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    report["classification"] = lambda_sets(spec).as_dict()
    graph = build_graph(spec)
    report["communication_classes"] = communication_classes(graph).as_dict()
    profile = boundary_profile(spec, args.rel_tol)
    report["boundary"] = [profile[k].as_dict() for k in sorted(profile)]
    _emit(report, args.out)
    return 0


def cmd_check_hunt(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    hunt = check_hunt(spec, rel_tol=args.rel_tol)
    report["hunt"] = hunt.as_dict()
    report["communication_classes"] = hunt.classes.as_dict()
    _emit(report, args.out)
    return 0


def cmd_check_symmetry(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    sym = check_symmetrizable(spec, rel_tol=args.rel_tol)
    report["hunt"] = sym.hunt.as_dict()
    report["symmetry"] = sym.as_dict()
    _emit(report, args.out)
    return 0


def cmd_measure(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    if args.coefficients:
        coeffs = [float(p) for p in args.coefficients.split(",")]
        measure = measure_family(spec, coeffs, rel_tol=args.rel_tol)
    else:
        measure = canonical_measure(spec, rel_tol=args.rel_tol)
    sym = check_symmetrizable(spec, rel_tol=args.rel_tol)
    report["symmetry"] = sym.as_dict()
    report["measure"] = measure.as_dict()
    _emit(report, args.out)
    return 0


def cmd_dirichlet(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    sym = check_symmetrizable(spec, rel_tol=args.rel_tol)
    report["symmetry"] = sym.as_dict()
    regular = check_regular_form(spec)
    adapted = check_adapted(spec, rel_tol=args.rel_tol)
    report["dirichlet"] = {"regular_form": regular.as_dict(),
                           "adapted": adapted.as_dict()}
    _emit(report, args.out)
    return 0


def cmd_simulate(args) -> int:
    spec = _load(args)
    report, failed = _checked_base(spec, args)
    if failed:
        return 1
    window = _floats(args.window, 2, "--window")
    chain = build_chain(spec, window, args.h)
    mode = args.mode
    sim = {"window": list(window), "h": args.h, "n_nodes": chain.n_nodes,
           "t_max": args.t_max, "n_rep": args.n_rep, "seed": args.seed}

    if args.target is not None:
        if args.x0 is None:
            raise _UsageError("--target needs --x0")
        sim["hitting"] = estimate_hitting(
            chain, args.x0, args.target, args.t_max, args.n_rep,
            seed=args.seed, n_jobs=args.jobs, mode=mode or MODE_KILLED,
            exponential_holding=args.exponential_holding)
    elif args.defect is not None:
        a, b, c, d = _floats(args.defect, 4, "--defect")

        def f(x, lo=a, hi=b):
            return 1.0 if lo < x < hi else 0.0

        def g(x, lo=c, hi=d):
            return 1.0 if lo < x < hi else 0.0

        weights = "lebesgue" if args.weights == "lebesgue" else None
        sim["defect"] = estimate_symmetry_defect(
            chain, f, g, args.t_max, args.n_rep, seed=args.seed,
            n_jobs=args.jobs, mode=mode or MODE_FULL, weights=weights)
        sim["defect"]["f_window"] = [a, b]
        sim["defect"]["g_window"] = [c, d]
    else:
        if args.x0 is None:
            raise _UsageError("provide --x0 (or --target / --defect)")
        res = run(chain, x0=args.x0, t_max=args.t_max, n_rep=args.n_rep,
                  seed=args.seed, n_jobs=args.jobs, mode=mode or MODE_FULL,
                  exponential_holding=args.exponential_holding)
        counts = {name: int((res["status"] == code).sum())
                  for code, name in STATUS_NAMES.items()}
        xs = chain.x[res["final_node"]]
        alive = res["status"] == ALIVE
        summary = {"status_counts": counts,
                   "mean_final_time": float(res["final_time"].mean())}
        if alive.any():
            summary["alive_mean_position"] = float(xs[alive].mean())
            summary["alive_min_position"] = float(xs[alive].min())
            summary["alive_max_position"] = float(xs[alive].max())
        sim["run"] = summary

    if args.paths_out:
        if args.x0 is None:
            raise _UsageError("--paths-out needs --x0")
        path = simulate_path(chain, args.x0, args.t_max, seed=args.seed,
                             rep=0, mode=mode or MODE_FULL,
                             exponential_holding=args.exponential_holding)
        with open(args.paths_out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x", "status"])
            for t, x in path.as_rows():
                writer.writerow([f"{t:.12g}", f"{x:.12g}", path.status])
        sim["paths_out"] = args.paths_out

    report["simulation"] = sim
    report["warnings"] = list(chain.warnings)
    _emit(report, args.out)
    return 0


def cmd_example(args) -> int:
    if args.list:
        text = "\n".join(list_examples()) + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if not args.name:
        raise _UsageError("give an example name or --list")
    spec = get_example(args.name)
    text = serialize_spec(spec)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# wiring


def _add_source(p) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--spec", metavar="FILE", help="spec document to read")
    group.add_argument("--example", metavar="NAME",
                       help="use a built-in example instead of a file")


def _add_common(p) -> None:
    p.add_argument("--out", metavar="FILE", help="write the report here")
    p.add_argument("--rel-tol", type=float, default=1e-6,
                   help="relative tolerance for boundary quadrature")


def build_parser() -> _Parser:
    parser = _Parser(prog="shuntline",
                     description="analyze generalized one-dimensional "
                                 "diffusions given as symbolic specs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and audit a spec")
    _add_source(p)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("classify",
                       help="point classes, communication classes, "
                            "endpoint roles")
    _add_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check-hunt",
                       help="decide whether every path keeps its "
                            "strong Markov structure (no one-way point is "
                            "hit without being revisited)")
    _add_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_check_hunt)

    p = sub.add_parser("check-symmetry",
                       help="decide killed / full symmetrizability")
    _add_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_check_symmetry)

    p = sub.add_parser("measure", help="construct a symmetrizing measure")
    _add_source(p)
    _add_common(p)
    p.add_argument("--coefficients", metavar="C1,C2,...",
                   help="positive weight per regular component "
                        "(default: all 1)")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("dirichlet",
                       help="regular-form and adaptedness checks for the "
                            "energy form")
    _add_source(p)
    _add_common(p)
    p.set_defaults(func=cmd_dirichlet)

    p = sub.add_parser("simulate", help="Monte Carlo on a discretized chain")
    _add_source(p)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--window", required=True, metavar="LO,HI",
                   help="simulation window, e.g. --window=-2.5,2.5")
    p.add_argument("--h", type=float, required=True,
                   help="grid step in the scale coordinate")
    p.add_argument("--t-max", type=float, required=True, help="time horizon")
    p.add_argument("--x0", type=float, help="start position")
    p.add_argument("--n-rep", type=int, default=10000,
                   help="number of replications")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1,
                   help="worker threads (results identical for any value)")
    p.add_argument("--mode", choices=[MODE_FULL, MODE_KILLED, MODE_PART],
                   help="absorption handling (default depends on the task)")
    p.add_argument("--exponential-holding", action="store_true",
                   help="draw exponential holding times instead of "
                        "deterministic ones")
    p.add_argument("--target", type=float,
                   help="estimate the probability of visiting this position")
    p.add_argument("--defect", metavar="A,B,C,D",
                   help="estimate the symmetry defect for indicator test "
                        "functions on (A,B) and (C,D)")
    p.add_argument("--weights", choices=["speed", "lebesgue"],
                   default="speed", help="start-weighting for --defect")
    p.add_argument("--paths-out", metavar="FILE",
                   help="write one sample path as CSV (t, x, status)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", help="print a built-in example spec")
    p.add_argument("name", nargs="?", help="example name")
    p.add_argument("--list", action="store_true", help="list example names")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"shuntline {args.command}: error: {exc}", file=sys.stderr)
        return 3
    except (UndeterminedVerdict, GraphBuildError) as exc:
        print(f"shuntline {args.command}: undetermined: {exc}", file=sys.stderr)
        return 2
    except ShuntlineError as exc:
        print(f"shuntline {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"shuntline {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
