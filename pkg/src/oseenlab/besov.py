"""Anisotropic Besov norms, the hybrid high/low split and the D / S norms.

Band norms are ``||Delta_j f||_{L^p1_x1 L^p2_x2}`` over the resolvable band
range; vector and tensor inputs use the component-wise maximum in every band.
Norms are then ``l^q`` aggregates of ``2^{sj}`` times the band norms over all
bands, or over the high (2^j > alpha) / low (2^j <= alpha) subsets.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import Sequence, Union

import numpy as np

from .littlewood_paley import DEFAULT_PROFILE, DyadicProfile, band_range, band_symbol, classify
from .spectral import (Grid2, ScalarField, TensorForcing, VectorField, mixed_norm_array,
                       to_semispectral, x2_phase)

FieldLike = Union[ScalarField, VectorField, TensorForcing, Sequence[ScalarField]]


def _exponent(p) -> float:
    p = float(p)
    if not p >= 1.0:
        raise ValueError(f"exponents must lie in [1, inf], got {p}")
    return p


@dataclass(frozen=True)
class BesovParams:
    s: float
    p1: float
    p2: float
    q: float

    def __post_init__(self):
        for name in ("p1", "p2", "q"):
            object.__setattr__(self, name, _exponent(getattr(self, name)))
        if not math.isfinite(self.s):
            raise ValueError("regularity index must be finite")


@dataclass(frozen=True)
class HybridContext:
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")


def in_theorem_window(p1: float, p2: float, q: float) -> bool:
    """max{1/3, 2/3 (1 - 1/p2)} < 1/p1 <= 1/2,  1 <= p2 < 4,  1 <= q <= inf."""
    try:
        p1, p2, q = _exponent(p1), _exponent(p2), _exponent(q)
    except ValueError:
        return False
    r1, r2 = 1.0 / p1, 1.0 / p2
    return max(1.0 / 3.0, 2.0 / 3.0 * (1.0 - r2)) < r1 <= 0.5 and p2 < 4.0


@dataclass(frozen=True)
class ThmParams:
    p1: float = 2.0
    p2: float = 2.0
    q: float = 1.0
    strict: bool = True

    def __post_init__(self):
        for name in ("p1", "p2", "q"):
            object.__setattr__(self, name, _exponent(getattr(self, name)))
        if self.strict and not in_theorem_window(self.p1, self.p2, self.q):
            raise ValueError(f"(p1, p2, q) = ({self.p1}, {self.p2}, {self.q}) lies outside "
                             "max{1/3, 2/3(1-1/p2)} < 1/p1 <= 1/2, 1 <= p2 < 4")

    @property
    def in_window(self) -> bool:
        return in_theorem_window(self.p1, self.p2, self.q)

    # regularity indices of the D and S norms
    @property
    def s_data_high(self) -> float:
        return 2.0 / self.p1 + 1.0 / self.p2 - 2.0

    @property
    def s_data_low(self) -> float:
        return 1.0 / self.p1 + 1.0 / self.p2 - 2.0

    @property
    def s_sol_high(self) -> float:
        return self.s_data_high + 1.0

    @property
    def s_sol_low(self) -> float:
        return self.s_data_low + 1.0


def components_of(f: FieldLike) -> tuple[ScalarField, ...]:
    if isinstance(f, ScalarField):
        return (f,)
    if isinstance(f, (VectorField, TensorForcing)):
        return f.components
    return tuple(f)


@dataclass(frozen=True)
class BandTable:
    """Per-band mixed norms of a field (component maximum)."""

    js: np.ndarray
    values: np.ndarray
    grid: Grid2
    p1: float
    p2: float
    profile_id: str

    def weighted(self, s: float) -> np.ndarray:
        return np.exp2(s * self.js) * self.values

    def mask(self, alpha: float | None, part: str) -> np.ndarray:
        if part == "all":
            return np.ones(self.js.shape, bool)
        cls = np.array([classify(int(j), alpha) for j in self.js])
        return cls == part


def band_table(f: FieldLike, p1: float, p2: float,
               profile: DyadicProfile = DEFAULT_PROFILE) -> BandTable:
    comps = components_of(f)
    grid = comps[0].grid
    br = band_range(grid)
    js = np.arange(br.jmin, br.jmax + 1)
    values = np.zeros(len(js))
    inv_phase = x2_phase(grid) / grid.h2
    for c in comps:
        fh = to_semispectral(c).values
        for n, j in enumerate(js):
            sym = band_symbol(grid, int(j), profile)
            cols = np.nonzero(sym)[0]
            if cols.size == 0:
                continue
            spec = np.zeros_like(fh)
            spec[:, cols] = fh[:, cols] * sym[cols]
            piece = np.fft.ifft(spec * inv_phase, axis=1).real
            values[n] = max(values[n], mixed_norm_array(piece, grid, p1, p2))
    return BandTable(js, values, grid, float(p1), float(p2), profile.identifier)


def lq(values: np.ndarray, q: float) -> float:
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return 0.0
    if math.isinf(q):
        return float(v.max())
    if q == 1.0:
        return float(v.sum())
    return float(np.sum(v ** q) ** (1.0 / q))


def aggregate(table: BandTable, s: float, q: float, alpha: float | None = None,
              part: str = "all") -> float:
    """l^q norm of 2^{sj} ||Delta_j f|| over all, high or low bands."""
    m = table.mask(alpha, part)
    return lq(table.weighted(s)[m], q)


def besov_norm(f: FieldLike, params: BesovParams,
               profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    t = band_table(f, params.p1, params.p2, profile)
    return aggregate(t, params.s, params.q)


def hybrid_norms(f: FieldLike, params: BesovParams, ctx: HybridContext,
                 profile: DyadicProfile = DEFAULT_PROFILE) -> tuple[float, float]:
    """(high, low) norms: the same aggregation over 2^j > alpha and 2^j <= alpha."""
    t = band_table(f, params.p1, params.p2, profile)
    return (aggregate(t, params.s, params.q, ctx.alpha, "high"),
            aggregate(t, params.s, params.q, ctx.alpha, "low"))


def data_norm_from_table(t: BandTable, tp: ThmParams, alpha: float) -> float:
    high = aggregate(t, tp.s_data_high, tp.q, alpha, "high")
    low = aggregate(t, tp.s_data_low, tp.q, alpha, "low")
    return alpha ** (-1.0 / tp.p1) * high + low


def solution_norm_from_table(t: BandTable, tp: ThmParams, alpha: float) -> float:
    high = aggregate(t, tp.s_sol_high, tp.q, alpha, "high")
    low = aggregate(t, tp.s_sol_low, tp.q, alpha, "low")
    return alpha ** (-1.0 / tp.p1) * high + low


def data_norm_D(F: FieldLike, tp: ThmParams, ctx: HybridContext,
                profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """alpha^{-1/p1} ||F||^{h}_{s=2/p1+1/p2-2} + ||F||^{l}_{s=1/p1+1/p2-2}."""
    return data_norm_from_table(band_table(F, tp.p1, tp.p2, profile), tp, ctx.alpha)


def solution_norm_S(u: FieldLike, tp: ThmParams, ctx: HybridContext,
                    profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """alpha^{-1/p1} ||u||^{h}_{s=2/p1+1/p2-1} + ||u||^{l}_{s=1/p1+1/p2-1}."""
    return solution_norm_from_table(band_table(u, tp.p1, tp.p2, profile), tp, ctx.alpha)


def _check_dyadic(lam: float) -> None:
    m, _ = math.frexp(lam) if lam > 0 else (0.0, 0)
    if m != 0.5:
        raise ValueError(f"rescaling factor must be a power of two, got {lam}")


def dyadic_rescale(f, lam: float, degree: int):
    """f_lam(x) = lam^degree f(lam x) on the grid with L divided by lam.

    For dyadic lam the new samples are the old ones relabelled, so the
    operation is exact.  Accepts scalar, vector and tensor fields.
    """
    _check_dyadic(lam)
    if isinstance(f, VectorField):
        return VectorField(*(dyadic_rescale(c, lam, degree) for c in f.components))
    if isinstance(f, TensorForcing):
        return TensorForcing(*(dyadic_rescale(c, lam, degree) for c in f.components))
    grid = f.grid.rescaled(lam)
    return ScalarField(grid, f.values * lam ** degree)
