"""Median convolution error of both binary schemes across oversampling ratios.

    python scripts/conjecture_sweep.py --seeds 50 --out sweep.csv
"""
import argparse

import numpy as np

from bqcs.harness import ExperimentConfig, run_conv_bench, write_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--ratios", type=float, nargs="+", default=[0.25, 0.5, 1, 2, 4, 8, 16])
    ap.add_argument("--dither", nargs="+", default=["none", "uniform01", "scaled:0.1"])
    ap.add_argument("--normalize", action="store_true")
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = ExperimentConfig("conv-bench", seeds=args.seeds, m_ratios=args.ratios,
                           dither_modes=args.dither, normalize=args.normalize)
    rep = run_conv_bench(cfg)
    if args.out:
        write_report(rep, args.out, "csv")

    std = {r["seed"]: r["relative_error"] for r in rep.rows if r["scheme"] == "standard" and r["mode"] == "dual"}
    print(f"standard dual: median rel. error {np.median(list(std.values())):.4f}")
    print(f"{'dither':>12} {'m/p':>6} {'mode':>9} {'median':>8} {'beats std':>10}")
    for s in rep.summary:
        if s["scheme"] != "qcs" or s["metric"] != "relative_error":
            continue
        rows = [r for r in rep.rows if r["scheme"] == "qcs" and r["mode"] == s["mode"]
                and r["dither"] == s["dither"] and r["m"] == s["m"]]
        wins = sum(r["relative_error"] < std[r["seed"]] for r in rows)
        print(f"{s['dither']:>12} {s['ratio']:>6g} {s['mode']:>9} {s['median']:>8.4f} {wins:>5}/{len(rows)}")


if __name__ == "__main__":
    main()
