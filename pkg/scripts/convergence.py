"""Sup-difference of the transform of one noise realised at dyadic resolutions.

    python3 scripts/convergence.py --levels 5 --seeds 20
"""
from __future__ import annotations

import argparse

from wavezero.experiments import convergence_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=300.0)
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="convergence.csv")
    args = ap.parse_args()

    res = convergence_check(args.alpha, args.levels, args.seeds, args.seed)
    res.to_csv(args.out)
    for (a, b), m in zip(zip(res.sample_rates, res.sample_rates[1:]), res.mean):
        print(f"{a:>8.0f} Hz -> {b:>8.0f} Hz: mean sup |W_fine - W_coarse| = {m:.4g}")
    ratios = res.mean[1:] / res.mean[:-1]
    print("successive ratios:", " ".join(f"{r:.3f}" for r in ratios))
    print("decreasing" if res.decreasing() else "NOT decreasing", f"-> {args.out}")


if __name__ == "__main__":
    main()
