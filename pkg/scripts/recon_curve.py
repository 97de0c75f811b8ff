"""Cosine similarity of projected back-projection versus m/p.

    python scripts/recon_curve.py --p 64 --k 4 --seeds 20
"""
import argparse

from bqcs.harness import ExperimentConfig, run_recon_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=32)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--ratios", type=float, nargs="+", default=[1, 2, 4, 8, 16, 32, 64])
    ap.add_argument("--amplitudes", choices=["gaussian", "rademacher"], default="rademacher")
    args = ap.parse_args()

    rep = run_recon_bench(ExperimentConfig("recon-bench", seeds=args.seeds, p=args.p, k=args.k,
                                           m_ratios=args.ratios, amplitudes=args.amplitudes))
    print(f"{'family':>7} {'m':>6} {'median cos':>11} {'p10':>7} {'p90':>7}")
    for s in rep.summary:
        if s["metric"] == "cosine_similarity":
            print(f"{s['family']:>7} {s['m']:>6} {s['median']:>11.4f} {s['p10']:>7.4f} {s['p90']:>7.4f}")


if __name__ == "__main__":
    main()
