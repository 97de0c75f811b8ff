"""``bqcs`` command line entry point.

Exit codes: 0 success, 1 unexpected failure, 2 usage error (bad flag or
value), 3 unknown subcommand, 4 unreadable/unwritable file, 5 invalid
config, 6 malformed tensor/code/report file, 7 report self-check failed.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bitcode import CodeFormatError
from .harness import (
    ConfigError,
    ExperimentConfig,
    ReportError,
    read_rows_csv,
    run_experiment,
    run_quantize,
    summarize,
    summary_csv,
    verify_report,
    write_report,
    ExperimentReport,
)
from .tensor import Seed, TensorFormatError, random_gaussian, random_uniform01, save_tensor

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_UNKNOWN_COMMAND, EXIT_IO, EXIT_CONFIG, EXIT_FORMAT, EXIT_VERIFY = range(8)

EXPERIMENTS = ("conv-bench", "recon-bench", "rip-check", "throughput", "quantize")
COMMANDS = ("gen", *EXPERIMENTS, "report")

S = argparse.SUPPRESS


def _common(p: argparse.ArgumentParser, experiment: bool = True):
    p.add_argument("--seed", type=int, default=S, help="base seed (unsigned 64-bit)")
    p.add_argument("--out", default=S, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=["csv", "json"], default=S)
    p.add_argument("--verify-report", action="store_true", default=False,
                   help="re-read the written report and check its summary against its rows")
    if experiment:
        p.add_argument("--config", help="JSON file mirroring ExperimentConfig; flags override it")
        p.add_argument("--seeds", type=int, default=S, help="number of seeded trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bqcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bqcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("gen", help="write a random tensor file")
    _common(p, experiment=False)
    p.add_argument("--shape", type=int, nargs="+", required=True)
    p.add_argument("--dist", choices=["gaussian", "uniform01"], default="gaussian")
    p.add_argument("--stream", type=int, default=0)

    p = sub.add_parser("quantize", help="quantize a tensor file to a code file plus JSON sidecar")
    _common(p)
    p.add_argument("--scheme", choices=["standard", "qcs"], default=S)
    p.add_argument("--in", dest="input", default=S)
    p.add_argument("--m-ratio", dest="m_ratio", type=float, default=S)
    p.add_argument("--dither", default=S, help="none | uniform01 | scaled:<delta>")
    p.add_argument("--normalize", action="store_const", const=True, default=S)

    p = sub.add_parser("conv-bench", help="compare convolution errors of both binary schemes")
    _common(p)
    p.add_argument("--input-shape", dest="input_shape", type=int, nargs=3, default=S)
    p.add_argument("--kernel-shape", dest="kernel_shape", type=int, nargs=3, default=S)
    p.add_argument("--stride", type=int, default=S)
    p.add_argument("--padding", type=int, default=S)
    p.add_argument("--input-family", dest="input_family", choices=["gaussian", "constant"], default=S)
    p.add_argument("--scale-modes", dest="scale_modes", nargs="+", default=S)
    p.add_argument("--modes", nargs="+", default=S)
    p.add_argument("--m-ratios", dest="m_ratios", type=float, nargs="+", default=S)
    p.add_argument("--dither", dest="dither_modes", nargs="+", default=S)
    p.add_argument("--normalize", action="store_const", const=True, default=S)

    p = sub.add_parser("recon-bench", help="one-bit reconstruction fidelity sweep")
    _common(p)
    p.add_argument("--p", type=int, default=S)
    p.add_argument("--k", type=int, default=S)
    p.add_argument("--m-ratios", dest="m_ratios", type=float, nargs="+", default=S)
    p.add_argument("--families", nargs="+", default=S)
    p.add_argument("--amplitudes", choices=["gaussian", "rademacher"], default=S)

    p = sub.add_parser("rip-check", help="empirical RIP constants, Gaussian vs identity")
    _common(p)
    p.add_argument("--m", dest="m_list", type=int, nargs="+", default=S)
    p.add_argument("--p", dest="p_rip", type=int, default=S)
    p.add_argument("--k", dest="k_list", type=int, nargs="+", default=S)
    p.add_argument("--trials", dest="probe_trials", type=int, default=S)

    p = sub.add_parser("throughput", help="time packed binary dot against float dot")
    _common(p)
    p.add_argument("--p", dest="p_list", type=int, nargs="+", default=S)
    p.add_argument("--m-ratios", dest="m_ratios", type=float, nargs="+", default=S)
    p.add_argument("--reps", type=int, default=S)
    p.add_argument("--warmup", type=int, default=S)
    p.add_argument("--inner", type=int, default=S)

    p = sub.add_parser("report", help="re-summarize an existing rows CSV or JSON report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--verify-report", action="store_true", default=False)
    return parser


class _Fail(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise _Fail(EXIT_IO, "io", f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise _Fail(EXIT_CONFIG, "config", f"{args.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise _Fail(EXIT_CONFIG, "config", "<root>: config must be a JSON object")
    skip = {"command", "config", "verify_report"}
    data.update({k: v for k, v in vars(args).items() if k not in skip})
    data["kind"] = args.command
    try:
        return ExperimentConfig.from_dict(data)
    except TypeError as exc:
        raise _Fail(EXIT_CONFIG, "config", str(exc)) from None


def _cmd_gen(args) -> int:
    seed = Seed(getattr(args, "seed", 0), args.stream)
    make = random_gaussian if args.dist == "gaussian" else random_uniform01
    t = make(args.shape, seed)
    out = getattr(args, "out", None)
    if out is None:
        raise _Fail(EXIT_USAGE, "usage", "gen needs --out")
    save_tensor(t, out)
    return EXIT_OK


def _cmd_quantize(args) -> int:
    cfg = _load_config(args)
    layer, side = run_quantize(cfg)
    print(json.dumps({"code": cfg.out, "sidecar": str(side), "length": layer.code.length}))
    return EXIT_OK


def _verify(out, fmt) -> int:
    problems = verify_report(out, fmt)
    if problems:
        for msg in problems:
            print(f"bqcs: verify-report: {msg}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"bqcs: verify-report: {out} consistent", file=sys.stderr)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _load_config(args)
    report = run_experiment(cfg)
    write_report(report, cfg.out, cfg.format)
    if args.verify_report:
        if cfg.out is None:
            raise _Fail(EXIT_USAGE, "usage", "--verify-report needs --out")
        return _verify(cfg.out, cfg.format)
    return EXIT_OK


def _cmd_report(args) -> int:
    if args.input.endswith(".json"):
        with open(args.input, encoding="utf-8") as fh:
            doc = json.load(fh)
        config, rows, meta = doc["config"], doc["rows"], doc["meta"]
    else:
        header, rows = read_rows_csv(args.input)
        config = header.get("config", {})
        meta = {"version": __version__, "generated": header.get("generated", "")}
    report = ExperimentReport(config, rows, summarize(rows), meta)
    text = json.dumps({"summary": report.summary}, indent=2) + "\n" if args.format == "json" else summary_csv(report)
    if args.out is None:
        print(text, end="")
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if args.verify_report:
        return _verify(args.input, "json" if args.input.endswith(".json") else "csv")
    return EXIT_OK


HANDLERS = {"gen": _cmd_gen, "quantize": _cmd_quantize, "report": _cmd_report}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        print(parser.format_usage(), end="", file=sys.stderr)
        print(f"bqcs: error: unknown subcommand {argv[0]!r} (choose from {', '.join(COMMANDS)})", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return HANDLERS.get(args.command, _cmd_experiment)(args)
    except _Fail as exc:
        code, kind, msg = exc.code, exc.kind, str(exc)
    except ConfigError as exc:
        code, kind, msg = EXIT_CONFIG, "config", str(exc)
    except (TensorFormatError, CodeFormatError, ReportError, json.JSONDecodeError, KeyError) as exc:
        code, kind, msg = EXIT_FORMAT, "format", str(exc)
    except OSError as exc:
        code, kind, msg = EXIT_IO, "io", f"{exc.filename or ''}: {exc.strerror or exc}"
    except (ValueError, OverflowError) as exc:
        code, kind, msg = EXIT_USAGE, "value", str(exc)
    except Exception as exc:  # never crash with a traceback on user input
        code, kind, msg = EXIT_ERROR, "internal", f"{type(exc).__name__}: {exc}"
    print(f"bqcs: error: {kind}: {msg}", file=sys.stderr)
    return code
