"""Experiment configs, trial runners and report serialization.

Each experiment is a pure function of ``(config, trial_index)`` returning a
list of row dicts.  Trial ``i`` uses ``Seed(config.seed, i)`` and derives
every random quantity from it, so any row can be recomputed in isolation and
rows never depend on scheduling.  Only the columns in
:data:`WALL_TIME_COLUMNS` (and the ``generated`` timestamp) vary between
identical runs.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import statistics
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Callable

import numpy as np

from . import __version__
from .bitcode import binary_dot, memory_bits, pack
from .conv import ConvSpec, approx_conv_qcs, approx_conv_standard, conv_reference, relative_error
from .quantize import qcs_quantize, quantize_layer
from .recon import recon_error_sweep, sparse_signal
from .sensing import DitherMode, gen_ensemble, identity_ensemble, rip_probe
from .tensor import Seed, load_tensor, random_gaussian

SCHEMA_VERSION = 1
KINDS = ("conv-bench", "recon-bench", "rip-check", "throughput", "quantize")

COLUMNS = [
    "experiment", "scheme", "mode", "dither", "normalize", "family", "m", "p", "k", "ratio", "seed",
    "relative_error", "cosine_similarity", "l2_error", "delta_hat", "payload_bits", "memory_ratio",
    "biased", "wall_ns", "speedup",
]
GROUP_COLUMNS = ["experiment", "scheme", "mode", "dither", "normalize", "family", "m", "p", "k", "ratio"]
METRIC_COLUMNS = [
    "relative_error", "cosine_similarity", "l2_error", "delta_hat",
    "payload_bits", "memory_ratio", "wall_ns", "speedup",
]
WALL_TIME_COLUMNS = ("wall_ns", "speedup")
SUMMARY_COLUMNS = GROUP_COLUMNS + ["metric", "n", "mean", "median", "p10", "p90"]
_INT_COLUMNS = {"m", "p", "k", "seed", "payload_bits", "wall_ns"}
_BOOL_COLUMNS = {"biased", "normalize"}
_FLOAT_COLUMNS = {"ratio", "relative_error", "cosine_similarity", "l2_error", "delta_hat", "memory_ratio", "speedup"}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ReportError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    seeds: int = 1
    out: str | None = None
    format: str = "csv"
    # conv-bench
    input_shape: list[int] = field(default_factory=lambda: [7, 7, 1])
    kernel_shape: list[int] = field(default_factory=lambda: [3, 3, 1])
    stride: int = 1
    padding: int = 0
    input_family: str = "gaussian"
    scale_modes: list[str] = field(default_factory=lambda: ["weight_only", "dual"])
    modes: list[str] = field(default_factory=lambda: ["raw", "debiased"])
    m_ratios: list[float] = field(default_factory=lambda: [1, 2, 4, 8, 16])
    dither_modes: list[str] = field(default_factory=lambda: ["none", "uniform01"])
    normalize: bool = False
    # recon-bench
    p: int = 32
    k: int = 4
    families: list[str] = field(default_factory=lambda: ["dense", "sparse"])
    amplitudes: str = "rademacher"
    # rip-check
    m_list: list[int] = field(default_factory=lambda: [256])
    p_rip: int = 512
    k_list: list[int] = field(default_factory=lambda: [8])
    probe_trials: int = 200
    # throughput
    p_list: list[int] = field(default_factory=lambda: [1024, 65536])
    reps: int = 15
    warmup: int = 3
    inner: int = 20
    # quantize
    input: str | None = None
    scheme: str = "qcs"
    m_ratio: float = 1.0
    dither: str = "uniform01"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in names:
                raise ConfigError(key, "unknown config field")
        if "kind" not in data:
            raise ConfigError("kind", "missing experiment kind")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        def need(cond, path, msg):
            if not cond:
                raise ConfigError(path, msg)

        need(self.kind in KINDS, "kind", f"must be one of {', '.join(KINDS)}")
        need(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        need(isinstance(self.seeds, int) and self.seeds >= 1, "seeds", "trial count must be >= 1")
        need(self.format in ("csv", "json"), "format", "must be csv or json")
        need(len(self.m_ratios) > 0 and all(r > 0 for r in self.m_ratios), "m_ratios", "ratios must be > 0")
        for i, d in enumerate(self.dither_modes):
            try:
                DitherMode.parse(d)
            except ValueError as exc:
                raise ConfigError(f"dither_modes[{i}]", str(exc)) from None
        if self.kind == "conv-bench":
            need(len(self.input_shape) == 3 and min(self.input_shape) >= 1, "input_shape", "must be [h, w, c], entries >= 1")
            try:
                ConvSpec(tuple(self.kernel_shape), self.stride, self.padding).output_shape(tuple(self.input_shape))
            except ValueError as exc:
                raise ConfigError("kernel_shape", str(exc)) from None
            need(self.input_family in ("gaussian", "constant"), "input_family", "must be gaussian or constant")
            for i, s in enumerate(self.scale_modes):
                need(s in ("weight_only", "dual"), f"scale_modes[{i}]", "must be weight_only or dual")
            for i, s in enumerate(self.modes):
                need(s in ("raw", "debiased"), f"modes[{i}]", "must be raw or debiased")
        if self.kind == "recon-bench":
            need(self.p >= 1, "p", "must be >= 1")
            need(1 <= self.k <= self.p, "k", "must satisfy 1 <= k <= p")
            for i, fam in enumerate(self.families):
                need(fam in ("dense", "sparse"), f"families[{i}]", "must be dense or sparse")
            need(self.amplitudes in ("gaussian", "rademacher"), "amplitudes", "must be gaussian or rademacher")
        if self.kind == "rip-check":
            need(self.p_rip >= 1, "p_rip", "must be >= 1")
            need(len(self.m_list) > 0 and all(m >= 1 for m in self.m_list), "m_list", "entries must be >= 1")
            need(len(self.k_list) > 0 and all(1 <= k <= self.p_rip for k in self.k_list), "k_list", "entries must satisfy 1 <= k <= p")
            need(self.probe_trials >= 1, "probe_trials", "must be >= 1")
        if self.kind == "throughput":
            need(len(self.p_list) > 0 and all(p >= 1 for p in self.p_list), "p_list", "entries must be >= 1")
            need(self.reps >= 10, "reps", "timing needs >= 10 repetitions")
            need(self.warmup >= 3, "warmup", "timing needs >= 3 warmup runs")
            need(self.inner >= 1, "inner", "must be >= 1")
        if self.kind == "quantize":
            need(self.input is not None, "input", "quantize needs an input tensor file")
            need(self.out is not None, "out", "quantize needs an output path")
            need(self.scheme in ("standard", "qcs"), "scheme", "must be standard or qcs")
            need(self.m_ratio > 0, "m_ratio", "must be > 0")
            try:
                DitherMode.parse(self.dither)
            except ValueError as exc:
                raise ConfigError("dither", str(exc)) from None


def m_for(ratio: float, p: int) -> int:
    return max(1, int(round(ratio * p)))


def _label(text: str) -> int:
    return zlib.crc32(text.encode())


def _row(**values) -> dict:
    row = dict.fromkeys(COLUMNS)
    unknown = set(values) - set(COLUMNS)
    if unknown:
        raise KeyError(f"unknown report columns {sorted(unknown)}")
    row.update(values)
    return row


def _timed(fn: Callable, *args):
    t0 = time.perf_counter_ns()
    out = fn(*args)
    return out, time.perf_counter_ns() - t0


# ---------------------------------------------------------------------------
# conv-bench

def conv_inputs(cfg: ExperimentConfig, sd: Seed):
    if cfg.input_family == "gaussian":
        return random_gaussian(cfg.input_shape, sd.derive(1)), random_gaussian(cfg.kernel_shape, sd.derive(2))
    # dyadic constants keep every sum and product exact
    a, b = (0.25 * (1 + sd.derive(j).generator().integers(0, 8)) for j in (1, 2))
    return np.full(cfg.input_shape, a), np.full(cfg.kernel_shape, b)


def conv_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    sd = Seed(cfg.seed, trial)
    spec = ConvSpec(tuple(cfg.kernel_shape), cfg.stride, cfg.padding)
    p = spec.p
    I, W = conv_inputs(cfg, sd)
    ref = conv_reference(I, W, spec)
    base = dict(experiment="conv-bench", p=p, seed=trial, family=cfg.input_family)
    rows = []
    for scale_mode in ["none", *cfg.scale_modes]:
        approx, ns = _timed(approx_conv_standard, I, W, spec, scale_mode)
        rows.append(_row(**base, scheme="standard", mode=scale_mode, dither="none", m=p, ratio=1.0,
                         relative_error=relative_error(approx, ref), payload_bits=p, wall_ns=ns))
    # Φ = I_p, ξ = 0 control; must reproduce the unscaled standard row
    approx, ns = _timed(approx_conv_qcs, I, W, spec, identity_ensemble(p, 1.0), "raw")
    rows.append(_row(**base, scheme="qcs-identity", mode="raw", dither="none", m=p, ratio=1.0,
                     relative_error=relative_error(approx, ref), payload_bits=p, wall_ns=ns))
    for dither in cfg.dither_modes:
        dmode = DitherMode.parse(dither)
        for ratio in cfg.m_ratios:
            m = m_for(ratio, p)
            ens = gen_ensemble(m, p, dmode, cfg.normalize, sd.derive(3).derive(m).derive(_label(str(dmode))))
            for mode in cfg.modes:
                approx, ns = _timed(approx_conv_qcs, I, W, spec, ens, mode)
                rows.append(_row(**base, scheme="qcs", mode=mode, dither=str(dmode), normalize=cfg.normalize,
                                 m=m, ratio=float(ratio), relative_error=relative_error(approx, ref),
                                 payload_bits=m, biased=(mode == "debiased" and dmode.kind != "none"),
                                 wall_ns=ns))
    return rows


# ---------------------------------------------------------------------------
# recon-bench

def recon_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    sd = Seed(cfg.seed, trial)
    p = cfg.p
    m_list = sorted({m_for(r, p) for r in cfg.m_ratios})
    rows = []
    for family in cfg.families:
        if family == "dense":
            k, w = p, random_gaussian([p], sd.derive(1))
        else:
            k, w = cfg.k, sparse_signal(p, cfg.k, sd.derive(2), cfg.amplitudes)
        for res in recon_error_sweep(w, k, m_list, [sd.derive(3).derive(_label(family))]):
            rows.append(_row(experiment="recon-bench", scheme="qcs", mode="pbp", dither="none", normalize=False,
                             family=family, m=res.m, p=p, k=k, ratio=res.m_over_p, seed=trial,
                             cosine_similarity=res.cosine_similarity, l2_error=res.l2_error,
                             payload_bits=res.m))
    return rows


# ---------------------------------------------------------------------------
# rip-check

def rip_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    sd = Seed(cfg.seed, trial)
    p = cfg.p_rip
    ident = identity_ensemble(p, math.sqrt(p))
    rows = []
    for m in cfg.m_list:
        ens = gen_ensemble(m, p, "none", False, sd.derive(1).derive(m))
        for k in cfg.k_list:
            probe_seed = sd.derive(2).derive(m).derive(k)
            est = rip_probe(ens, k, cfg.probe_trials, probe_seed)
            rows.append(_row(experiment="rip-check", scheme="grm", mode="probe", dither="none", normalize=False,
                             m=m, p=p, k=k, ratio=m / p, seed=trial, delta_hat=est.delta_hat))
            est = rip_probe(ident, k, cfg.probe_trials, probe_seed)
            rows.append(_row(experiment="rip-check", scheme="identity", mode="probe", dither="none", normalize=False,
                             m=p, p=p, k=k, ratio=m / p, seed=trial, delta_hat=est.delta_hat))
    return rows


# ---------------------------------------------------------------------------
# throughput

def time_call(fn: Callable, args: tuple, reps: int, warmup: int, inner: int) -> int:
    """Median over ``reps`` runs of the per-call time in ns (monotonic clock)."""
    for _ in range(warmup):
        for _ in range(inner):
            fn(*args)
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        for _ in range(inner):
            fn(*args)
        samples.append((time.perf_counter_ns() - t0) / inner)
    return int(round(statistics.median(samples)))


def throughput_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    sd = Seed(cfg.seed, trial)
    rows = []
    for p in cfg.p_list:
        x = random_gaussian([p], sd.derive(p).derive(1))
        y = random_gaussian([p], sd.derive(p).derive(2))
        float_ns = time_call(np.dot, (x, y), cfg.reps, cfg.warmup, cfg.inner)
        rows.append(_row(experiment="throughput", scheme="float64", mode="dot", m=p, p=p, ratio=1.0, seed=trial,
                         payload_bits=64 * p, wall_ns=float_ns))
        for ratio in sorted({1.0, *map(float, cfg.m_ratios)}):
            m = m_for(ratio, p)
            if m == p:
                a, b = pack(np.where(x >= 0, 1, -1)), pack(np.where(y >= 0, 1, -1))
                scheme = "standard"
            else:
                a = pack(np.where(random_gaussian([m], sd.derive(p).derive(m).derive(1)) >= 0, 1, -1))
                b = pack(np.where(random_gaussian([m], sd.derive(p).derive(m).derive(2)) >= 0, 1, -1))
                scheme = "qcs"
            ns = time_call(binary_dot, (a, b), cfg.reps, cfg.warmup, cfg.inner)
            rows.append(_row(experiment="throughput", scheme=scheme, mode="xor_popcount", m=m, p=p, ratio=m / p,
                             seed=trial, payload_bits=memory_bits(a), memory_ratio=32 * p / memory_bits(a),
                             wall_ns=ns, speedup=float_ns / max(ns, 1)))
    return rows


TRIALS: dict[str, Callable[[ExperimentConfig, int], list[dict]]] = {
    "conv-bench": conv_trial,
    "recon-bench": recon_trial,
    "rip-check": rip_trial,
    "throughput": throughput_trial,
}


# ---------------------------------------------------------------------------
# reports

def worker_count() -> int:
    raw = os.environ.get("BQCS_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("BQCS_THREADS", f"expected an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("BQCS_THREADS", "must be >= 0")
    return n or (os.cpu_count() or 1)


def _sort_key(row: dict):
    key = []
    for col in ("experiment", "scheme", "mode", "dither", "family", "ratio", "m", "k", "seed"):
        v = row[col]
        key.append((0, "") if v is None else (1, v))
    return key


def run_trials(cfg: ExperimentConfig) -> list[dict]:
    fn = TRIALS[cfg.kind]
    # timing runs stay serial so concurrent trials do not skew the clocks
    workers = 1 if cfg.kind == "throughput" else min(worker_count(), cfg.seeds)
    if workers <= 1:
        chunks = [fn(cfg, i) for i in range(cfg.seeds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda i: fn(cfg, i), range(cfg.seeds)))
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=_sort_key)
    return rows


@dataclass
class ExperimentReport:
    config: dict
    rows: list[dict]
    summary: list[dict]
    meta: dict

    def to_json(self) -> str:
        return json.dumps(
            {"config": self.config, "rows": self.rows, "summary": self.summary, "meta": self.meta},
            indent=2,
        ) + "\n"


def summarize(rows: list[dict]) -> list[dict]:
    """Per-group n / mean / median / 10th and 90th percentile of each metric."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in GROUP_COLUMNS), []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: [(0, "") if v is None else (1, v) for v in k]):
        members = groups[key]
        for metric in METRIC_COLUMNS:
            vals = [r[metric] for r in members if r[metric] is not None]
            if not vals:
                continue
            arr = np.asarray(vals, dtype=np.float64)
            p10, p90 = np.percentile(arr, [10, 90])
            out.append({
                **dict(zip(GROUP_COLUMNS, key)),
                "metric": metric,
                "n": len(vals),
                "mean": float(np.mean(arr)),
                "median": float(np.median(arr)),
                "p10": float(p10),
                "p90": float(p90),
            })
    return out


def generated_timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    cfg.validate()
    if cfg.kind not in TRIALS:
        raise ConfigError("kind", f"{cfg.kind} does not produce a report")
    rows = run_trials(cfg)
    meta = {
        "artifact": "bqcs",
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "generated": generated_timestamp(),
        "timing": "time.perf_counter_ns; median of reps after warmup runs",
        "wall_time_columns": list(WALL_TIME_COLUMNS),
        "measure_cost": "dense matvec O(m*p)",
    }
    return ExperimentReport(cfg.to_dict(), rows, summarize(rows), meta)


def run_conv_bench(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(dataclasses.replace(cfg, kind="conv-bench"))


def run_recon_bench(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(dataclasses.replace(cfg, kind="recon-bench"))


def run_rip_check(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(dataclasses.replace(cfg, kind="rip-check"))


def run_throughput(cfg: ExperimentConfig) -> ExperimentReport:
    return run_experiment(dataclasses.replace(cfg, kind="throughput"))


def run_quantize(cfg: ExperimentConfig):
    """Quantize a BQT1 tensor file into a BQC1 code file plus JSON sidecar."""
    cfg.validate()
    w = load_tensor(cfg.input).reshape(-1)
    ens = None
    if cfg.scheme == "qcs":
        ens = gen_ensemble(m_for(cfg.m_ratio, w.size), w.size, cfg.dither, cfg.normalize, Seed(cfg.seed))
    layer = quantize_layer(w, cfg.scheme, ens)
    side = layer.save(cfg.out)
    return layer, side


# ---------------------------------------------------------------------------
# serialization

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(int(value)) if isinstance(value, (int, np.integer)) else str(value)


def _parse(col: str, text: str):
    if text == "":
        return None
    if col in _BOOL_COLUMNS:
        if text not in ("true", "false"):
            raise ReportError(f"column {col}: expected true/false, got {text!r}")
        return text == "true"
    try:
        if col in _INT_COLUMNS or col == "n":
            return int(text)
        if col in _FLOAT_COLUMNS or col in ("mean", "median", "p10", "p90"):
            return float(text)
    except ValueError:
        raise ReportError(f"column {col}: cannot parse {text!r}") from None
    return text


def _csv_text(header_lines: list[str], columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    return buf.getvalue()


def _header(report: ExperimentReport, table: str) -> list[str]:
    return [
        f"bqcs-report schema={SCHEMA_VERSION} table={table} version={report.meta['version']}",
        f"config={json.dumps(report.config, sort_keys=True)}",
        f"generated={report.meta['generated']}",
    ]


def rows_csv(report: ExperimentReport) -> str:
    return _csv_text(_header(report, "rows"), COLUMNS, report.rows)


def summary_csv(report: ExperimentReport) -> str:
    return _csv_text(_header(report, "summary"), SUMMARY_COLUMNS, report.summary)


def summary_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return f"{root}.summary{ext or '.csv'}"


def write_report(report: ExperimentReport, out: str | None, fmt: str) -> list[str]:
    """Write the report; CSV goes to ``out`` plus a sibling summary file."""
    if fmt == "json":
        text = report.to_json()
        if out is None:
            print(text, end="")
            return []
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return [out]
    if out is None:
        print(rows_csv(report), end="")
        return []
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_csv(report))
    with open(summary_path(out), "w", encoding="utf-8", newline="") as fh:
        fh.write(summary_csv(report))
    return [out, summary_path(out)]


def _read_csv_table(text: str, expected: list[str]) -> tuple[dict, list[dict]]:
    header: dict[str, Any] = {}
    lines = text.splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, sep, val = line[1:].strip().partition("=")
        if sep and key == "config":
            header["config"] = json.loads(val)
        elif sep and key == "generated":
            header["generated"] = val
    else:
        body_start = len(lines)
    reader = csv.reader(lines[body_start:])
    try:
        cols = next(reader)
    except StopIteration:
        raise ReportError("CSV has no header row") from None
    if cols != expected:
        raise ReportError(f"unexpected CSV columns {cols}; schema {SCHEMA_VERSION} expects {expected}")
    rows = []
    for lineno, rec in enumerate(reader, start=body_start + 2):
        if len(rec) != len(cols):
            raise ReportError(f"line {lineno}: expected {len(cols)} fields, got {len(rec)}")
        rows.append({c: _parse(c, v) for c, v in zip(cols, rec)})
    return header, rows


def read_rows_csv(path: str) -> tuple[dict, list[dict]]:
    with open(path, encoding="utf-8") as fh:
        return _read_csv_table(fh.read(), COLUMNS)


def read_summary_csv(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return _read_csv_table(fh.read(), SUMMARY_COLUMNS)[1]


def verify_report(out: str, fmt: str) -> list[str]:
    """Recompute summaries from the serialized rows; return mismatch messages."""
    if fmt == "json":
        with open(out, encoding="utf-8") as fh:
            doc = json.load(fh)
        rows, summary = doc["rows"], doc["summary"]
    else:
        _, rows = read_rows_csv(out)
        summary = read_summary_csv(summary_path(out))
    expected = summarize(rows)
    problems = []
    if len(expected) != len(summary):
        problems.append(f"summary has {len(summary)} rows, rows imply {len(expected)}")
    for i, (got, want) in enumerate(zip(summary, expected)):
        for col in SUMMARY_COLUMNS:
            if got.get(col) != want[col]:
                problems.append(f"summary row {i} column {col}: {got.get(col)!r} != recomputed {want[col]!r}")
    return problems


def strip_wall_time(text: str) -> str:
    """Drop timestamp lines and blank out wall-time columns of a CSV or JSON report."""
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        doc["meta"].pop("generated", None)
        for row in doc["rows"]:
            for col in WALL_TIME_COLUMNS:
                row[col] = None
        doc["summary"] = [s for s in doc["summary"] if s["metric"] not in WALL_TIME_COLUMNS]
        return json.dumps(doc, sort_keys=True)
    lines = [ln for ln in text.splitlines() if not ln.startswith("# generated=")]
    body = [ln for ln in lines if not ln.startswith("#")]
    comments = [ln for ln in lines if ln.startswith("#")]
    if not body:
        return "\n".join(comments)
    rows = list(csv.reader(body))
    cols = rows[0]
    if "metric" in cols:
        mi = cols.index("metric")
        kept = [cols] + [r for r in rows[1:] if r[mi] not in WALL_TIME_COLUMNS]
    else:
        idx = [cols.index(c) for c in WALL_TIME_COLUMNS if c in cols]
        kept = [cols] + [[("" if j in idx else v) for j, v in enumerate(r)] for r in rows[1:]]
    return "\n".join(comments + [",".join(r) for r in kept])
