"""Command-line interface.

Exit codes: 0 success, 1 internal error, 2 empty spectral support,
64 usage error.
"""
import argparse
import json
import os
import sys

from . import hsvr, runner, signals
from .errors import HsvrError, NoOscillatoryContent, UnknownFunction
from .spectral_fft import ScaleEstimate

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_NO_SUPPORT = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _add_spectral_options(p):
    p.add_argument("--method", type=str.lower, choices=("fft", "dmd"), default="fft")
    p.add_argument("--decay", type=float, default=runner.ScaleOptions.decay)
    p.add_argument("--threshold", type=float, default=runner.ScaleOptions.threshold,
                   help="relative FFT modulus threshold")
    p.add_argument("--tol", type=float, default=runner.ScaleOptions.tol, help="DMD residual tolerance")
    p.add_argument("--eta", type=float, default=runner.ScaleOptions.eta, help="DMD energy fraction")
    p.add_argument("--rows", type=_positive_int, default=None, help="Hankel rows M (default N//2+1)")
    p.add_argument("--rank-tol", type=float, default=runner.ScaleOptions.rank_tol,
                   help="relative singular-value cutoff for DMD")


def _add_input_options(p):
    p.add_argument("input", help="CSV file with header x,y, a function slug, or lorenz-x|y|z")
    p.add_argument("--domain", type=float, nargs=2, default=list(signals.DEFAULT_DOMAIN),
                   metavar=("A", "B"), help="domain for function slugs")
    p.add_argument("--points", type=_positive_int, default=signals.DEFAULT_POINTS,
                   help="grid size for function slugs before the alternating split")


def build_parser():
    slugs = ", ".join(signals.function_names() + list(signals.LORENZ_SLUGS))
    parser = _Parser(
        prog="hsvrkit",
        description="Hierarchical SVR with kernel scales estimated from the data spectrum.",
        epilog=f"Signal slugs: {slugs}",
    )
    parser.add_argument("--config", help="flat key=value file whose keys mirror the long flags")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("scales", help="estimate the kernel scale schedule")
    _add_input_options(p)
    _add_spectral_options(p)
    p.add_argument("--out", help="ScaleEstimate JSON path (default stdout)")

    p = sub.add_parser("train", help="estimate scales and train a cascade")
    _add_input_options(p)
    _add_spectral_options(p)
    p.add_argument("--scales", default="auto", help="'auto' or a JSON file with a scale list")
    p.add_argument("--kkt-tol", type=float, default=1e-3)
    p.add_argument("--out", help="model JSON path")
    p.add_argument("--report", help="per-layer report CSV path")
    p.add_argument("--run-report", help="run report JSON path")

    p = sub.add_parser("sweep", help="phase-transition sweep over a geometric scale schedule")
    _add_input_options(p)
    p.add_argument("--sigma0", type=float, default=1.0)
    p.add_argument("--decay", type=float, default=2.0)
    p.add_argument("--layers", type=_positive_int, default=14)
    p.add_argument("--kkt-tol", type=float, default=1e-3)
    p.add_argument("--out", help="CSV path with columns sigma,error (default stdout)")

    p = sub.add_parser("bench", help="reproduce a reference suite")
    p.add_argument("--suite", choices=tuple(runner.SUITES), required=True)
    p.add_argument("--method", type=str.lower, choices=("fft", "dmd", "both"), default="both")
    p.add_argument("--kkt-tol", type=float, default=1e-3)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("batch", help="train one cascade per CSV series, in parallel")
    p.add_argument("inputs", nargs="+", help="CSV files or directories of CSV files")
    _add_spectral_options(p)
    p.add_argument("--kkt-tol", type=float, default=1e-3)
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--out", help="summary CSV path (default stdout)")
    return parser, sub


def read_config(path):
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.lstrip("-").replace("-", "_")] = value
    return values


def _apply_config(parser, sub, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)
    for name, subparser in sub.choices.items():
        dests = {a.dest: a for a in subparser._actions}
        applicable = {}
        for k, v in values.items():
            if k not in dests:
                continue
            action = dests[k]
            applicable[k] = v.split() if action.nargs not in (None, "?") else v
        subparser.set_defaults(**applicable)
    every = {a.dest for sp in sub.choices.values() for a in sp._actions}
    unknown = sorted(set(values) - every)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")


def _options(args):
    return runner.ScaleOptions(decay=args.decay, threshold=args.threshold, tol=args.tol,
                               eta=args.eta, rows=args.rows, rank_tol=args.rank_tol)


def _write(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coerce(args):
    # string defaults injected from a config file are not converted by argparse
    for name in ("decay", "threshold", "tol", "eta", "rank_tol", "kkt_tol", "sigma0"):
        if isinstance(getattr(args, name, None), str):
            setattr(args, name, float(getattr(args, name)))
    for name in ("rows", "layers", "points", "jobs"):
        if isinstance(getattr(args, name, None), str):
            setattr(args, name, int(getattr(args, name)))
    if isinstance(getattr(args, "domain", None), list):
        args.domain = [float(v) for v in args.domain]


def cmd_scales(args):
    train, _ = runner.resolve_input(args.input, tuple(args.domain), args.points)
    est = runner.estimate_scales(train, args.method, _options(args))
    _write(est.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def _load_scales(path):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        return list(ScaleEstimate.from_dict(data).scales) if "method" in data else list(data["scales"])
    return [float(v) for v in data]


def cmd_train(args):
    train, test = runner.resolve_input(args.input, tuple(args.domain), args.points)
    scales = None if args.scales == "auto" else _load_scales(args.scales)
    model, _, report = runner.run_pipeline(args.input, train, test, args.method, _options(args),
                                           kkt_tol=args.kkt_tol, scales=scales)
    if args.out:
        _write(model.to_json() + "\n", args.out)
    if args.report:
        hsvr.reports_to_csv([hsvr.LayerReport(**r) for r in report.layers], args.report)
    text = report.to_json() + "\n"
    if args.run_report:
        _write(text, args.run_report)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args):
    train, test = runner.resolve_input(args.input, tuple(args.domain), args.points)
    curve = hsvr.phase_sweep(train.x, train.y, test.x, test.y, args.sigma0, args.decay,
                             args.layers, kkt_tol=args.kkt_tol)
    lines = ["sigma,error"] + [f"{s:.17g},{e:.17g}" for s, e in curve]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args):
    methods = runner.METHODS if args.method == "both" else (args.method.upper(),)
    results = runner.run_suite(args.suite, methods, kkt_tol=args.kkt_tol)
    os.makedirs(args.out, exist_ok=True)
    for (slug, method), (_, _, report) in results.items():
        with open(os.path.join(args.out, f"{slug}_{method.lower()}.json"), "w") as fh:
            fh.write(report.to_json() + "\n")
    text = runner.summary_csv(runner.suite_summary_rows(args.suite, results))
    with open(os.path.join(args.out, "summary.csv"), "w", newline="") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _expand_inputs(inputs):
    paths = []
    for item in inputs:
        if os.path.isdir(item):
            paths.extend(sorted(os.path.join(item, f) for f in os.listdir(item) if f.endswith(".csv")))
        else:
            paths.append(item)
    return paths


def cmd_batch(args):
    reports = runner.run_batch(_expand_inputs(args.inputs), args.method, _options(args),
                               kkt_tol=args.kkt_tol, jobs=args.jobs)
    _write(runner.summary_csv(runner.batch_rows(reports), runner.BATCH_FIELDS), args.out)
    return EXIT_OK


COMMANDS = {
    "scales": cmd_scales,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "bench": cmd_bench,
    "batch": cmd_batch,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, sub = build_parser()
    try:
        _apply_config(parser, sub, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        _coerce(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"hsvrkit: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE

    stage = args.command
    try:
        return COMMANDS[args.command](args)
    except NoOscillatoryContent as exc:
        print(f"hsvrkit {stage}: scale estimation failed: {exc}", file=sys.stderr)
        return EXIT_NO_SUPPORT
    except UnknownFunction as exc:
        print(f"hsvrkit {stage}: input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HsvrError as exc:
        print(f"hsvrkit {stage}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort exit code
        print(f"hsvrkit {stage}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
