"""Residual sweep of the corner decomposition and the Loewner envelope.

    python scripts/decomposition_sweep.py --seeds 1000 --max-dim 8 --jobs 4 -o sweep.json
"""

import argparse
import json

from psdblk.campaigns import SweepConfig, envelope_sweep, lemma_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seeds", type=int, default=1000)
    parser.add_argument("--max-dim", type=int, default=8)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--output", "-o")
    args = parser.parse_args()

    lemma = lemma_sweep(SweepConfig(seeds=range(args.seeds), max_dim=args.max_dim), jobs=args.jobs)
    env = envelope_sweep(SweepConfig(seeds=range(args.seeds), max_dim=min(args.max_dim, 6),
                                     min_dim=2, square=True), jobs=args.jobs)
    print(f"decomposition: max relative residual {lemma['max_relative_residual']:.3e}, "
          f"max unitarity residual {lemma['max_unitarity_residual']:.3e}")
    print(f"envelope: min relative gap {env['min_relative_gap']:.3e}")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump({"decomposition": lemma, "envelope": env}, fh)


if __name__ == "__main__":
    main()
