#!/usr/bin/env python3
"""Regulation heatmaps for the line, star-chain, and regular-tree families,
with the matching closed-form collapse curves.

Writes, per family, a sweep CSV, a PGM rendering, and a curve CSV with the
analytic zero-cap boundary per p column.
"""

import argparse
from pathlib import Path

import numpy as np

from platmod import (
    FamilySpec,
    ModelParams,
    NetworkRecipe,
    SweepSpec,
    boundary_b_a,
    emit_csv,
    emit_pgm,
    sweep,
)

FAMILIES = {
    "line": (NetworkRecipe("linear", {"n": 20}), dict(kind="linear-finite", n=20, r=None)),
    "star_chain": (
        NetworkRecipe("star_chain", {"n_hubs": 5, "r": 2}),
        dict(kind="star-chain-finite", n=5, r=2),
    ),
    "tree": (NetworkRecipe("tree", {"r": 2, "depth": 5}), dict(kind="tree-finite", n=5, r=2)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--fast", action="store_true", help="20x20 grid instead of 50x50")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    steps = 20 if args.fast else 50

    for name, (recipe, fam) in FAMILIES.items():
        spec = SweepSpec(
            p_range=(0.1, 0.9, steps),
            ba_range=(0.0, 0.2, steps),
            recipe=recipe,
            samples=1,
        )
        grid = sweep(spec, workers=args.workers)
        emit_csv(grid, out / f"{name}_map.csv")
        emit_pgm(grid, out / f"{name}_map.pgm")

        lines = ["p,collapse_b_a"]
        for p in spec.p_values():
            params = ModelParams(mu=0.2, p=float(p), b_a=0.01, b_b=0.0)
            b = boundary_b_a(FamilySpec(params=params, **fam))
            lines.append(f"{float(p)!r},{float(b)!r}")
        (out / f"{name}_curve.csv").write_text("\n".join(lines) + "\n")
        print(f"{name}: wrote map + curve under {out}/")


if __name__ == "__main__":
    main()
