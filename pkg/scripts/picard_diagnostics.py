"""Gated Picard solves across the admissible range, plus uniqueness and Lipschitz probes.

    python3 scripts/picard_diagnostics.py --C0 1.766
"""

import argparse

import numpy as np

from oseenlab.estimates import EnsembleSpec
from oseenlab.fixed_point import (SolverConfig, lipschitz_probe, picard_solve, residual,
                                  uniqueness_probe)


def forcing(seed, cfg, fraction):
    F = EnsembleSpec(seed=seed, count=1).tensor(0)
    return F * (fraction / (8 * cfg.C0_estimate ** 2) / cfg.d_norm(F))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--C0", type=float, default=1.766)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    cfg = SolverConfig(args.alpha, C0_estimate=args.C0)

    print(f"{'gate frac':>9}{'iters':>7}{'max r_n':>11}{'mild':>11}{'pde':>11}{'|u|_S/2C0|F|_D':>16}")
    for frac in (0.1, 0.25, 0.5, 1.0, 2.0, 8.0):
        F = forcing(args.seed, cfg, frac)
        u, rep = picard_solve(F, cfg)
        if u is None:
            print(f"{frac:>9}{rep.iterations:>7}  {rep.status}")
            continue
        pde = residual(u, F, cfg, form="pde")
        ball = cfg.s_norm(u) / (2 * args.C0 * cfg.d_norm(F))
        print(f"{frac:>9}{rep.iterations:>7}{rep.max_ratio():>11.2e}{rep.final_residual:>11.2e}"
              f"{pde:>11.2e}{ball:>16.4f}  {rep.status}")

    F = forcing(args.seed, cfg, 0.5)
    probe = uniqueness_probe(F, cfg, trials=8, seed=args.seed + 1)
    print(f"\nuniqueness: radius {probe.radius:.4f}, distances "
          f"{', '.join(f'{d:.1e}' for d in probe.distances)}, ok {probe.ok}")

    H = forcing(args.seed + 1, cfg, 0.5)
    print("\nlipschitz ratio ||u_F - u_G||_S / ||F - G||_D along G = F + d H")
    for d in 10.0 ** -np.arange(1, 6):
        r = lipschitz_probe(F, F + H * d, cfg)
        print(f"  d = {d:.0e}: {r.ratio:.6f} ({r.status})")


if __name__ == "__main__":
    main()
