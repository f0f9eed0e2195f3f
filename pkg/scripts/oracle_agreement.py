"""Kernel route vs periodic spectral oracle for D[F] on seeded band-limited forcings.

    python3 scripts/oracle_agreement.py --n 512 --seeds 20
"""

import argparse
import math
import time

import numpy as np

from oseenlab.kernels import OseenConfig, assemble_D, interior_relative_error, oseen_oracle
from oseenlab.spectral import Grid2, TensorForcing, band_limited_noise


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--quadrature", default="quintic")
    args = ap.parse_args()
    g = Grid2(16.0, args.n, 4 * math.pi, args.n)
    t0 = time.perf_counter()
    errs = {}
    for seed in range(args.seeds):
        alpha = (0.5, 1.0, 2.0, 4.0)[seed % 4]
        rng = np.random.default_rng(seed)
        F = TensorForcing(*(band_limited_noise(g, 2.0, 8.0, rng, 1.0) for _ in range(4)))
        cfg = OseenConfig(alpha, args.quadrature)
        errs.setdefault(alpha, []).append(
            interior_relative_error(assemble_D(F, cfg), oseen_oracle(F, cfg)))
    for alpha, e in sorted(errs.items()):
        print(f"alpha = {alpha:<4} max interior error {max(e):.2e} over {len(e)} forcings")
    print(f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
