"""Dyadic frequency localisation in xi2.

The partition is built from a C-infinity transition profile ``theta`` that
equals 1 on [0, 1] and 0 on [2, inf); ``phi0(xi) = theta(|xi|) - theta(2|xi|)``
is supported in 1/2 <= |xi| <= 2 and the dilates ``phi_j = phi0(2^-j .)``
telescope to 1 away from xi = 0.  The zero mode belongs to no band.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .spectral import Grid2, SemiSpectralField


@dataclass(frozen=True)
class DyadicProfile:
    identifier: str = "exp-bump-c-inf"

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t - 1.0, 0.0, 1.0)
        out = np.where(t <= 1.0, 1.0, 0.0)
        inside = (s > 0.0) & (s < 1.0)
        si = s[inside]
        with np.errstate(over="ignore"):
            # h(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)})
            h = 1.0 / (1.0 + np.exp(1.0 / si - 1.0 / (1.0 - si)))
        out = np.array(out, dtype=float)
        out[inside] = 1.0 - h
        return out

    def phi0(self, xi):
        a = np.abs(np.asarray(xi, dtype=float))
        return self.theta(a) - self.theta(2.0 * a)

    def phi(self, j: int, xi):
        return self.phi0(np.ldexp(np.asarray(xi, dtype=float), -int(j)))


DEFAULT_PROFILE = DyadicProfile()


@dataclass(frozen=True)
class BandRange:
    jmin: int
    jmax: int

    def __post_init__(self):
        if self.jmin > self.jmax:
            raise ValueError("jmin must not exceed jmax")

    def __iter__(self):
        return iter(range(self.jmin, self.jmax + 1))

    def __contains__(self, j) -> bool:
        return self.jmin <= j <= self.jmax

    def __len__(self) -> int:
        return self.jmax - self.jmin + 1


def _floor_log2(x: float) -> int:
    m, e = math.frexp(x)  # x = m * 2^e, m in [0.5, 1)
    return e - 1


def _ceil_log2(x: float) -> int:
    m, e = math.frexp(x)
    return e - 1 if m == 0.5 else e


def band_range(grid: Grid2) -> BandRange:
    """Smallest index set whose bands cover every nonzero grid mode.

    With 2^jmin <= pi/L2 and 2^jmax >= pi*N2/(2*L2) the finite telescoping
    sum over [jmin, jmax] equals 1 on all nonzero modes.
    """
    lo = math.pi / grid.L2
    hi = math.pi * (grid.N2 // 2) / grid.L2
    return BandRange(_floor_log2(lo), _ceil_log2(hi))


def band_symbol(grid: Grid2, j: int, profile: DyadicProfile = DEFAULT_PROFILE) -> np.ndarray:
    return profile.phi(j, grid.xi2)


def band_project(fh: SemiSpectralField, j: int,
                 profile: DyadicProfile = DEFAULT_PROFILE) -> SemiSpectralField:
    """Delta_j: multiply each xi2 mode by phi_j(xi2).

    Bands outside the resolvable range return a zero field with a warning.
    """
    if j not in band_range(fh.grid):
        warnings.warn(f"band {j} outside resolvable range {band_range(fh.grid)}",
                      stacklevel=2)
        return SemiSpectralField.zeros(fh.grid)
    return SemiSpectralField(fh.grid, fh.values * band_symbol(fh.grid, j, profile))


def almost_orthogonality_check(fh: SemiSpectralField, j: int, k: int,
                               profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """||Delta_j Delta_k f|| / ||f|| for bands at least two apart."""
    if abs(j - k) <= 1:
        raise ValueError(f"bands {j} and {k} overlap by construction; need |j-k| >= 2")
    norm = np.linalg.norm(fh.values)
    if norm == 0.0:
        return 0.0
    both = fh.values * band_symbol(fh.grid, j, profile) * band_symbol(fh.grid, k, profile)
    return float(np.linalg.norm(both) / norm)


def classify(j: int, alpha: float) -> str:
    """'high' when 2^j > alpha, else 'low'."""
    return "high" if math.ldexp(1.0, j) > alpha else "low"


def hybrid_split(fh: SemiSpectralField, alpha: float,
                 profile: DyadicProfile = DEFAULT_PROFILE):
    """Split into high bands (2^j > alpha) and low bands (2^j <= alpha).

    Returns two lists of ``(j, Delta_j f)``.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    high, low = [], []
    for j in band_range(fh.grid):
        piece = SemiSpectralField(fh.grid, fh.values * band_symbol(fh.grid, j, profile))
        (high if classify(j, alpha) == "high" else low).append((j, piece))
    return high, low
