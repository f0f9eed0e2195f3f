"""ODE residual of the four kernel operators against N1, for each quadrature order.

    python3 scripts/quadrature_convergence.py
"""

import math

import numpy as np

from oseenlab.kernels import KERNEL_OPS, QUADRATURES, OseenConfig, ode_residual
from oseenlab.spectral import Grid2, SemiSpectralField


def modes(n1, L1=16.0):
    g = Grid2(L1, n1, math.pi / 2, 8)
    x = g.x1[:, None]
    vals = np.broadcast_to(np.exp(-0.5 * x * x) * (1 + 0.3 * x), g.shape).astype(complex).copy()
    # xi2 = 0 of D0 has a non-decaying tail; the Nyquist column is zeroed by odd multipliers
    vals[:, 0] = vals[:, g.N2 // 2] = 0
    return SemiSpectralField(g, vals)


def main():
    sizes = (128, 256, 512, 1024, 2048)
    for quad in QUADRATURES:
        print(f"\n{quad}")
        print(f"{'op':<12}" + "".join(f"{n:>11}" for n in sizes))
        for kind in sorted(KERNEL_OPS):
            r = [ode_residual(kind, modes(n), OseenConfig(1.0, quad)) for n in sizes]
            print(f"{kind:<12}" + "".join(f"{v:>11.2e}" for v in r))


if __name__ == "__main__":
    main()
