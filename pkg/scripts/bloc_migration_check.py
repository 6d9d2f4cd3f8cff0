#!/usr/bin/env python3
"""Force the sender off the dominant platform with a zero cap and measure,
per community tightness, how raggedly communities split."""

import argparse
from pathlib import Path

from platmod import validate_assumption1
from platmod.experiments import a1_csv_text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/bloc_migration.csv")
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument(
        "--theta-jj", nargs="*", type=float, default=[0.75, 0.25, 0.125, 0.0625]
    )
    args = ap.parse_args()

    report = validate_assumption1(args.theta_jj, seeds=range(args.seeds))
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(a1_csv_text(report))
    for theta in args.theta_jj:
        rows = [r for r in report.rows if r.theta_jj == theta]
        regular = sum(1 for r in rows if r.irregular == 0)
        print(f"theta_JJ={theta}: {regular}/{len(rows)} seeds fully regular")
    if report.skipped:
        print(f"skipped {len(report.skipped)} cells where a zero cap already holds")


if __name__ == "__main__":
    main()
