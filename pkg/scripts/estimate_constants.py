"""Empirical constants on the seeded ensemble, on a grid and its refinement.

    python3 scripts/estimate_constants.py --count 16
"""

import argparse
import math
import time

from oseenlab.besov import ThmParams
from oseenlab.estimates import (DEFAULT_GRID, EnsembleSpec, estimate_C0, verify_lemma41,
                                verify_lemma42, verify_lemma42_remark, verify_lemma43)

ALPHAS = (0.5, 1.0, 2.0, 4.0)


def sup_table(ens, tp):
    reps = list(verify_lemma41(ens, ALPHAS, (0.0, 0.5, 2.0)))
    reps += [verify_lemma42(ens, ALPHAS, tp), verify_lemma42_remark(ens, ALPHAS, tp),
             verify_lemma43(ens, ALPHAS, tp)]
    c0 = estimate_C0(ens, ALPHAS, tp)
    reps += [c0.linear, c0.bilinear]
    return {r.identifier: r.sup_ratio for r in reps}, c0.value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=16)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--p2", type=float, default=2.0)
    args = ap.parse_args()
    tp = ThmParams(2.0, args.p2, 1.0)
    ens = EnsembleSpec(seed=args.seed, count=args.count)
    t0 = time.perf_counter()
    coarse, c0 = sup_table(ens, tp)
    fine, c0f = sup_table(ens.with_grid(DEFAULT_GRID.refined(2)), tp)
    print(f"{'estimate':<28}{'sup (N)':>12}{'sup (2N)':>12}{'move':>8}")
    for k in coarse:
        move = max(coarse[k], fine[k]) / min(coarse[k], fine[k])
        print(f"{k:<28}{coarse[k]:>12.5f}{fine[k]:>12.5f}{move:>8.4f}")
    print(f"C0 = {c0:.5f} (refined {c0f:.5f}), {time.perf_counter() - t0:.1f} s")
    print(f"smallness threshold 1/(8 C0^2) = {1 / (8 * c0 * c0):.5e}, "
          f"uniqueness radius 1/(4 C0) = {1 / (4 * c0):.5f}")
    if not all(math.isfinite(v) for v in coarse.values()):
        raise SystemExit("non-finite sup ratio")


if __name__ == "__main__":
    main()
