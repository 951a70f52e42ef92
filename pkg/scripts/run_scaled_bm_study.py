"""Type 2 error of the two-sample test between scaled Brownian motions
(sigma=0.2 vs 0.3) at batch 128, with and without path scaling.

Full setting (B=500, reps=3) takes a few minutes on one core; --quick
drops to B=100, reps=1 for a fast smoke run.
"""

import argparse
import csv
import sys

from sigmmd import power_study
from sigmmd.studies import scaled_bm_type2_study


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--reps", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="B=100, reps=1")
    ap.add_argument("--out", default=None, help="write rows as CSV")
    args = ap.parse_args(argv)

    B, reps = (100, 1) if args.quick else (500, args.reps)
    cfg = scaled_bm_type2_study(B=B, reps=reps, seed=args.seed)
    rows = power_study(cfg)
    for r in rows:
        print(f"scaling={r.scaling:<4} estimator={r.estimator:<8} "
              f"type2={r.type2:.3f} std={r.std:.3f}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scaling", "batch_size", "estimator", "type1",
                        "type2", "std", "reps", "seed"])
            w.writerows([[r.scaling, r.batch_size, r.estimator, r.type1,
                          r.type2, r.std, r.reps, r.seed] for r in rows])
        print(f"wrote {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
