#!/usr/bin/env python3
"""Generate a synthetic corpus and run the empirical independence audits."""

import argparse
from fractions import Fraction
from pathlib import Path

from causalpcfg import empirical_audit, generate_dataset, sentiment_model
from causalpcfg.audit import DEFAULT_SEED, write_jsonl
from causalpcfg.reports import empirical_text


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", default="1/2")
    parser.add_argument("--beta-plus", default="1/2")
    parser.add_argument("--beta-minus", default="1/2")
    parser.add_argument("-n", "--count", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--out", default="corpus.jsonl")
    args = parser.parse_args()

    model = sentiment_model(
        Fraction(args.alpha), Fraction(args.beta_plus), Fraction(args.beta_minus)
    )
    records = generate_dataset(model, args.count, args.seed)
    Path(args.out).write_text(write_jsonl(records), encoding="utf-8")
    print(f"{args.count} records written to {args.out} (seed {args.seed})\n")
    for feature in ("x1", "x2", "x3"):
        print(empirical_text(empirical_audit(records, feature, "y")))


if __name__ == "__main__":
    main()
