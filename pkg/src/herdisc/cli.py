"""Command-line interface: ``herdisc {bound,oracle,compare,generate}``.

Exit codes: 0 success, 1 input error, 2 bounds written but the solver did not
reach the requested gap, 3 an exact oracle refused an instance over its cap,
4 ``--verify`` found a failing check.
"""

import argparse
import csv
import io
import math
import sys

import numpy as np

from .approx import AlgorithmOptions, approximate_herdisc, to_json, verify_report
from .bounds import (
    HERDISC_ORACLE_MAX_N,
    det_lb_exact,
    disc_exact,
    herdisc_exact,
    vecdisc_solve,
)
from .errors import HerdiscError, InvalidSpec, OracleTooLarge
from .instances import FAMILIES, InstanceSpec, generate, load_matrix_csv, matrix_to_csv

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_CAP, EXIT_VERIFY = 0, 1, 2, 3, 4

COMPARE_COLUMNS = (
    "family", "m", "n", "seed", "alpha", "mu", "det_lb", "vecdisc", "disc", "herdisc",
    "guarantee_ratio_vec", "guarantee_ratio_disc", "note",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    val = int(text)
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return val


def _positive_float(text):
    val = float(text)
    if not val > 0 or not math.isfinite(val):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return val


def _add_common(p, sweep=False):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--m", type=_positive_int, help="rows (random families; defaults to n)")
    if sweep:
        p.add_argument("--n", help="columns; a comma list runs a sweep")
        p.add_argument("--spec", action="append", default=[],
                       help="instance as family:n=..,m=..,seed=.. (repeatable)")
    else:
        p.add_argument("--n", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="matrix CSV (no header)")
    p.add_argument("--output", help="write here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json" if not sweep else "csv")


def _add_numeric(p):
    p.add_argument("--tol", type=_positive_float, default=1e-4)
    p.add_argument("--max-iters", type=_positive_int, default=50_000)
    p.add_argument("--delta", type=_positive_float)
    p.add_argument("--oracle-max-n", type=_positive_int,
                   help="disc oracle cap (overrides HERDISC_ORACLE_MAX_N)")
    p.add_argument("--herdisc-oracle-max-n", type=_positive_int, default=HERDISC_ORACLE_MAX_N)
    p.add_argument("--ncap", type=_positive_int, default=2**16)


def build_parser():
    parser = _Parser(prog="herdisc", description="Certified bounds on hereditary discrepancy.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("bound", help="ellipsoid upper bound and spectral lower bound")
    _add_common(p)
    _add_numeric(p)
    p.add_argument("--verify", action="store_true", help="re-derive every certificate")
    p = sub.add_parser("oracle", help="exact disc, herdisc, vecdisc and determinant bound")
    _add_common(p)
    _add_numeric(p)
    p = sub.add_parser("compare", help="bound families across instances, one CSV row each")
    _add_common(p, sweep=True)
    _add_numeric(p)
    p = sub.add_parser("generate", help="write a generated matrix as CSV")
    _add_common(p)
    return parser


def _options(args):
    return AlgorithmOptions(
        tol=args.tol,
        max_iters=args.max_iters,
        delta=args.delta,
        oracle_max_n=args.oracle_max_n,
        herdisc_oracle_max_n=args.herdisc_oracle_max_n,
        N_cap=args.ncap,
        seed=args.seed,
    )


def _load(args):
    if args.input and args.family not in (None, "csv"):
        raise InvalidSpec("give either --input or --family, not both")
    if args.input:
        return load_matrix_csv(args.input), InstanceSpec("csv", path=args.input)
    if args.family is None or args.family == "csv":
        raise InvalidSpec("one of --input or --family is required")
    spec = InstanceSpec(args.family, n=args.n, m=args.m, seed=args.seed)
    return generate(spec), spec


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _num(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return format(x, ".17g") if math.isfinite(x) else ""


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_COLUMNS)
    for row in rows:
        writer.writerow([row.get(c, "") for c in COMPARE_COLUMNS])
    return buf.getvalue()


def _row(spec, A, report):
    ov = report.oracle_values
    return {
        "family": spec.family,
        "m": A.shape[0],
        "n": A.shape[1],
        "seed": spec.seed,
        "alpha": _num(report.alpha),
        "mu": _num(report.mu),
        "det_lb": _num(ov.get("det_lb")),
        "vecdisc": _num(ov.get("vecdisc")),
        "disc": _num(ov.get("disc")),
        "herdisc": _num(ov.get("herdisc")),
        "guarantee_ratio_vec": _num(report.guarantee_ratio_vec),
        "guarantee_ratio_disc": _num(report.guarantee_ratio_disc),
        "note": "" if report.converged else f"not converged (gap {report.relative_gap:.3g})",
    }


def cmd_bound(args):
    A, spec = _load(args)
    report = approximate_herdisc(A, _options(args))
    if args.format == "csv":
        _emit(_csv_text([_row(spec, A, report)]), args.output)
    else:
        _emit(to_json(report) + "\n", args.output)
    if args.verify:
        verdict = verify_report(A, report)
        for c in verdict.failures():
            print(f"verify: {c.name} failed (value {c.value:.17g}, bound {c.bound:.17g})", file=sys.stderr)
        if not verdict.passed:
            return EXIT_VERIFY
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_oracle(args):
    A, spec = _load(args)
    opts = _options(args)
    cap = opts.disc_cap
    disc, coloring = disc_exact(A, cap)
    herdisc, subset = herdisc_exact(A, opts.herdisc_oracle_max_n)
    n = A.shape[1]
    vec = vecdisc_solve(A).value if n <= opts.vecdisc_oracle_max_n else None
    try:
        det = det_lb_exact(A, opts.det_max_submatrices)
    except OracleTooLarge:
        det = None
    out = {
        "family": spec.family,
        "m": A.shape[0],
        "n": n,
        "seed": spec.seed,
        "disc": disc,
        "disc_coloring": [int(s) for s in coloring.signs],
        "herdisc": herdisc,
        "herdisc_subset": subset,
        "vecdisc": vec,
        "det_lb": det,
    }
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = ("family", "m", "n", "seed", "disc", "herdisc", "vecdisc", "det_lb")
        writer.writerow(keys)
        writer.writerow([out[k] if k == "family" else _num(out[k]) for k in keys])
        _emit(buf.getvalue(), args.output)
    else:
        _emit(to_json(out) + "\n", args.output)
    return EXIT_OK


def parse_spec(text):
    """``family:n=4,m=3,seed=1`` -> ``InstanceSpec``."""
    family, _, rest = text.partition(":")
    fields = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq or key not in ("n", "m", "seed", "path"):
            raise InvalidSpec(f"bad spec field {part!r} in {text!r}")
        fields[key] = val if key == "path" else int(val)
    return InstanceSpec(family.strip(), **fields).validate()


def _compare_specs(args):
    specs = [parse_spec(s) for s in args.spec]
    if args.family:
        if args.family == "csv":
            raise InvalidSpec("use --input for csv matrices")
        if not args.n:
            raise InvalidSpec("--family needs --n")
        for tok in str(args.n).split(","):
            specs.append(InstanceSpec(args.family, n=int(tok), m=args.m, seed=args.seed).validate())
    if args.input:
        specs.append(InstanceSpec("csv", path=args.input))
    if not specs:
        raise InvalidSpec("compare needs --spec, --family with --n, or --input")
    return specs


def cmd_compare(args):
    specs = _compare_specs(args)
    opts = _options(args)
    rows = []
    ok = 0
    for spec in specs:
        try:
            A = generate(spec)
            rows.append(_row(spec, A, approximate_herdisc(A, opts)))
            ok += 1
        except HerdiscError as exc:
            rows.append({"family": spec.family, "m": spec.m or "", "n": spec.n or "",
                         "seed": spec.seed, "note": f"error: {exc}"})
    if args.format == "json":
        _emit(to_json(rows) + "\n", args.output)
    else:
        _emit(_csv_text(rows), args.output)
    return EXIT_OK if ok else EXIT_INPUT


def cmd_generate(args):
    A, _ = _load(args)
    _emit(matrix_to_csv(A), args.output)
    return EXIT_OK


COMMANDS = {"bound": cmd_bound, "oracle": cmd_oracle, "compare": cmd_compare, "generate": cmd_generate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except OracleTooLarge as exc:
        print(f"herdisc: oracle cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (HerdiscError, OSError, ValueError) as exc:
        print(f"herdisc: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
