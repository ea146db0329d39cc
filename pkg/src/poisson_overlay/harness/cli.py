"""Command-line entry point: ``poisson-overlay {simulate,analytic,constants,verify}``.

Exit status is 0 on success, 1 when a verification target fails and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from .. import analytic as an
from ..classify import DEFAULT_INNER_MARGIN
from . import verify
from .experiments import run_filled_experiment, run_pierced_experiment, run_t00_experiment

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

DEFAULTS = {
    "pierced": {"lam": 6.0, "trials": 1000},
    "filled": {"lambdas": (2.0, 3.0, 4.0, 5.0), "trials": 200},
    "t00": {"lam": 10.0, "trials": 500},
}


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer: {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty lambda list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poisson-overlay", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    sim.add_argument("--kind", choices=("pierced", "filled", "t00"), required=True)
    lam = sim.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float)
    lam.add_argument("--lambdas", type=_float_list)
    sim.add_argument("--trials", type=_positive_int)
    sim.add_argument("--seed", type=_u64, default=0)
    sim.add_argument("--bins", type=_positive_int, default=30)
    sim.add_argument("--inner-margin", type=float, default=DEFAULT_INNER_MARGIN)
    sim.add_argument("--out", type=Path, help="histogram CSV stem; one file per histogram")
    sim.add_argument("--report", type=Path, help="JSON report path")
    sim.add_argument("--workers", type=_positive_int, default=1)

    ana = sub.add_parser("analytic", help="tabulate an analytic density")
    ana.add_argument("--what", choices=("density", "max", "min", "phi", "filled-max", "filled-min"),
                     required=True)
    ana.add_argument("--j", type=int, choices=an.FAMILY, default=4)
    ana.add_argument("--from", dest="x0", type=float, required=True)
    ana.add_argument("--to", dest="x1", type=float, required=True)
    ana.add_argument("--step", type=float, required=True)
    ana.add_argument("--out", type=Path)

    con = sub.add_parser("constants", help="print the closed-form constants next to the printed values")
    con.add_argument("--out", type=Path)

    ver = sub.add_parser("verify", help="run the verification suite")
    ver.add_argument("--level", choices=("quick", "full"), default="quick")
    ver.add_argument("--seed", type=_u64, default=0)
    ver.add_argument("--workers", type=_positive_int, default=1)
    ver.add_argument("--report", type=Path)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="\n")


def _summary(report) -> str:
    lines = []
    for t in report.targets:
        ref = "" if t.paper_value is None else f" ref={t.paper_value!r}"
        lines.append(f"{'PASS' if t.passed else 'FAIL'} {t.name}: {t.estimate!r}{ref} tol={t.tolerance!r}")
    if report.empty_data:
        lines.append("FAIL no triangles found")
    return "\n".join(lines) + "\n"


def _simulate(args, parser) -> int:
    d = DEFAULTS[args.kind]
    trials = args.trials or d["trials"]
    if args.kind == "filled":
        lambdas = args.lambdas or ((args.lam,) if args.lam is not None else d["lambdas"])
        result = run_filled_experiment(lambdas, trials, args.bins, args.seed, args.workers)
    else:
        if args.lambdas is not None:
            parser.error(f"--lambdas applies to --kind filled; use --lambda for {args.kind}")
        lam = args.lam if args.lam is not None else d["lam"]
        if args.kind == "pierced":
            result = run_pierced_experiment(lam, trials, args.bins, args.seed, args.workers)
        else:
            result = run_t00_experiment(lam, trials, args.bins, args.seed, args.inner_margin, args.workers)
    for path in result.write(args.out, args.report):
        print(f"wrote {path}", file=sys.stderr)
    sys.stdout.write(_summary(result.report))
    return EXIT_OK if result.report.passed else EXIT_FAILED


def _tabulate(what: str, j: int):
    if what == "density":
        dens, vec = verify.family_marginal(j)
        return dens if vec else np.vectorize(dens)
    if what in ("max", "min"):
        if j not in an.CLOSED_FAMILY:
            raise ValueError(f"extremal densities are available for j in {an.CLOSED_FAMILY}")
        return lambda x: an.extremal_density(j, what, x)
    if what == "phi":
        return np.vectorize(an.phi)
    which = what.split("-")[1]
    return np.vectorize(lambda x: an.filled_measure_density(which, x))


def _analytic(args, parser) -> int:
    if not args.step > 0 or not args.x1 >= args.x0:
        parser.error("need --step > 0 and --to >= --from")
    n = int(math.floor((args.x1 - args.x0) / args.step + 1e-9)) + 1
    xs = args.x0 + args.step * np.arange(n)
    try:
        ys = np.asarray(_tabulate(args.what, args.j)(xs), dtype=float)
    except ValueError as exc:
        parser.error(str(exc))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "value"))
    for x, y in zip(xs, ys):
        w.writerow((repr(float(x)), repr(float(y))))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _constants(args, parser) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("name", "printed", "computed", "abs_diff"))
    rows = [(name, verify.PAPER_CONSTANTS[name], v) for name, v in verify.computed_constants().items()]
    rows.append(("p_well_conditioned_j2", verify.PAPER_P_WC_J2, an.prob_min_above(2, math.pi / 6)))
    rows.append(("intensity_t00", verify.PAPER_INTENSITY_T00, an.intensity_t00()))
    for name, printed, computed in rows:
        w.writerow((name, repr(printed), repr(computed), repr(abs(computed - printed))))
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _verify(args, parser) -> int:
    if args.level == "quick":
        report = verify.quick_report()
    else:
        report = verify.full_report(args.seed, args.workers)
    if args.report is not None:
        args.report.write_text(report.to_json(), encoding="utf-8", newline="\n")
    sys.stdout.write(_summary(report))
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    handler = {"simulate": _simulate, "analytic": _analytic, "constants": _constants, "verify": _verify}
    try:
        return handler[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    except ValueError as exc:
        print(f"poisson-overlay: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
