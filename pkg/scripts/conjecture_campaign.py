"""Hill-climb for violations with normal off-diagonal blocks across sizes and seeds.

Writes one JSON line per run (score, worst k, reverification) and persists any
positive-score instance for replay with ``psdblk decompose`` or
``load_record_instance``.

    python scripts/conjecture_campaign.py --sizes 2,3,4,5,6 --seeds 0,1,2 --iters 100000
"""

import argparse
import json
import sys
import time

from psdblk.search import HuntConfig, hunt


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="2,3,4,5,6")
    parser.add_argument("--seeds", default="0")
    parser.add_argument("--iters", type=int, default=100_000)
    parser.add_argument("--constraint", default="normal", choices=["normal", "hermitian", "any"])
    parser.add_argument("--method", default="hc", choices=["hc", "rr"])
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--persist-dir", default="campaign_violations")
    parser.add_argument("--output", "-o", help="JSON-lines summary (default: stdout)")
    args = parser.parse_args()

    out = open(args.output, "w") if args.output else sys.stdout
    for n in (int(x) for x in args.sizes.split(",")):
        for seed in (int(x) for x in args.seeds.split(",")):
            start = time.perf_counter()
            rec = hunt(HuntConfig(n=n, iterations=args.iters, seed=seed, constraint=args.constraint,
                                  method=args.method),
                       jobs=args.jobs, persist_dir=args.persist_dir)
            row = {"n": n, "seed": seed, "constraint": args.constraint, "iterations": args.iters,
                   "best_score": rec.best_score, "worst_k": rec.worst_k,
                   "violation_found": rec.violation_found, "reverified": rec.reverified,
                   "persisted_path": rec.persisted_path,
                   "seconds": round(time.perf_counter() - start, 2)}
            out.write(json.dumps(row) + "\n")
            out.flush()
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
