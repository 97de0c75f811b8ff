"""Empirical RIP constants of Gaussian ensembles against the identity, over m and k."""
import argparse

from bqcs.harness import ExperimentConfig, run_rip_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=512)
    ap.add_argument("--m", type=int, nargs="+", default=[128, 256, 512, 1024])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 8, 32])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    rep = run_rip_check(ExperimentConfig("rip-check", seeds=args.seeds, p_rip=args.p, m_list=args.m,
                                         k_list=args.k, probe_trials=args.trials))
    for s in rep.summary:
        if s["metric"] == "delta_hat":
            print(f"{s['scheme']:>8} m/p={s['ratio']:<6g} k={s['k']:<3} median delta_hat {s['median']:.4f}")


if __name__ == "__main__":
    main()
