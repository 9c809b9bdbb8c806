"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .detector import DetectionConfig, detect, spectrum_ratios
from .errors import DataError, NumericalError
from .geometry import project_H, project_K
from .graph import Partition
from .modularity import MeasurePolicy, ModularityOperator, measure_frame
from .sbm import SbmSpec, reduced_modularity, sample
from .spectral import dominant_eigenpairs
from .validation import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _k_arg(text):
    if text == "auto":
        return text
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("k must be 'auto' or a positive integer") from None
    if k < 1:
        raise argparse.ArgumentTypeError("k must be positive")
    return k


def _measure_arg(text):
    try:
        return MeasurePolicy.parse(text)
    except (DataError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_graph_args(p):
    p.add_argument("--input", required=True, help="edge list or MatrixMarket file")
    p.add_argument("--format", choices=("auto", "edges", "mtx"), default="auto")
    p.add_argument("--base", type=int, choices=(0, 1), default=1, help="index base of edge lists")
    p.add_argument("--binarize", action="store_true", help="set every edge weight to 1")
    p.add_argument("--measure", type=_measure_arg, default=MeasurePolicy.unit(),
                   help="unit, degree, offset or offset:<tau>")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="antimod", description="Spectral detection of communities and anti-communities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="find modules and classify them")
    _add_graph_args(p)
    p.add_argument("--k", type=_k_arg, default="auto")
    p.add_argument("--max-k", type=int, default=20)
    p.add_argument("--ratio-threshold", type=float, default=1.25)
    p.add_argument("--clusters", choices=("k_plus_one", "k"), default="k_plus_one")
    p.add_argument("--no-scale-rows", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--output", help="JSON report path (stdout if omitted)")
    p.add_argument("--spectrum", help="also write the spectrum as CSV")
    p.add_argument("--labels", help="also write one cluster label per node")

    p = sub.add_parser("spectrum", help="dominant eigenvalues and their ratios")
    _add_graph_args(p)
    p.add_argument("--m", type=int, default=21, help="number of eigenpairs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", help="CSV path (stdout if omitted)")

    p = sub.add_parser("angles", help="angle between the modularity matrix and a partition")
    _add_graph_args(p)
    p.add_argument("--partition", required=True, help="one integer label per line, -1 unassigned")

    p = sub.add_parser("sbm", help="stochastic block model tools")
    sbm_sub = p.add_subparsers(dest="sbm_command", required=True, parser_class=_Parser)
    s = sbm_sub.add_parser("sample", help="draw a graph")
    s.add_argument("--spec", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True, help="edge list path")
    s.add_argument("--labels", help="also write planted block labels")
    s = sbm_sub.add_parser("reduce", help="reduced k-by-k modularity matrix and its spectrum")
    s.add_argument("--spec", required=True)
    s.add_argument("--normalized", action="store_true")

    p = sub.add_parser("validate", help="run randomized property suites")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _read(args):
    return io.read_graph(args.input, args.format, args.base, args.binarize)


def _fmt(x) -> str:
    return repr(float(x))


def cmd_detect(args):
    g = _read(args)
    cfg = DetectionConfig(
        measure=args.measure, k=args.k, max_k=args.max_k, ratio_threshold=args.ratio_threshold,
        clusters=args.clusters, scale_rows=not args.no_scale_rows, seed=args.seed,
        restarts=args.restarts,
    )
    report = detect(g, cfg)
    if args.output:
        io.write_report(report, args.output)
    else:
        sys.stdout.write(io.dumps_json(report.to_dict()))
    if args.spectrum:
        io.write_spectrum_csv(args.spectrum, report.eigenvalues, report.ratios)
    if args.labels:
        io.write_partition(report.labels, args.labels)
    return EXIT_OK


def cmd_spectrum(args):
    g = _read(args)
    op = ModularityOperator(g, args.measure)
    m = min(args.m, g.n)
    s = dominant_eigenpairs(op, m, seed=args.seed)
    ratios = spectrum_ratios(s.lambdas) if s.m >= 2 else np.empty(0)
    if args.output:
        io.write_spectrum_csv(args.output, s.lambdas, ratios)
    else:
        print("index,eigenvalue,abs_lambda,ratio")
        for i, lam in enumerate(s.lambdas):
            r = _fmt(ratios[i]) if i < len(ratios) else ""
            print(f"{i + 1},{_fmt(lam)},{_fmt(abs(lam))},{r}")
    return EXIT_OK


def cmd_angles(args):
    g = _read(args)
    labels = io.read_partition(args.partition, g.n)
    part = Partition(labels)
    op = ModularityOperator(g, args.measure)
    x = measure_frame(g, part.sets(), args.measure)
    h = project_H(op, x, fro_norm=op.frobenius_norm())
    kp = project_K(op, x, fro_norm=h.frobenius_norm)
    print(f"sets {x.shape[1]}")
    print(f"cos_H {_fmt(h.cosine)}")
    print(f"sin_H {_fmt(h.sine)}")
    print(f"cos_K {_fmt(kp.cosine)}")
    print(f"sin_K {_fmt(kp.sine)}")
    print(f"sigma {_fmt(np.sum(h.taus ** 2))}")
    return EXIT_OK


def cmd_sbm(args):
    spec = SbmSpec.load(args.spec)
    if args.sbm_command == "sample":
        g = sample(spec, args.seed)
        io.write_edge_list(g, args.output)
        if args.labels:
            io.write_partition(spec.labels, args.labels)
        return EXIT_OK
    red = reduced_modularity(spec, args.normalized)
    lam, _ = red.eigenpairs()
    print("delta " + " ".join(_fmt(v) for v in red.delta))
    print(f"nu {_fmt(red.nu)}")
    print("reduced")
    for row in red.matrix:
        print(" ".join(_fmt(v) for v in row))
    print("eigenvalues " + " ".join(_fmt(v) for v in lam))
    return EXIT_OK


def cmd_validate(args):
    results = run_suite(args.suite, args.trials, args.seed)
    for r in results:
        print(r.line())
    gating = [r for r in results if r.gating]
    failed = [r for r in gating if not r.passed]
    print(f"{len(gating) - len(failed)}/{len(gating)} gating checks passed")
    return EXIT_OK if not failed else EXIT_NUMERICAL


COMMANDS = {
    "detect": cmd_detect,
    "spectrum": cmd_spectrum,
    "angles": cmd_angles,
    "sbm": cmd_sbm,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (DataError, OSError) as exc:
        print(f"antimod: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"antimod: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
