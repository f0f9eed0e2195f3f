"""Empirical constants for the frequency-localised, linear and bilinear estimates.

Every quantifier "for all f" becomes a sup over a seeded ensemble of
band-limited fields.  Ratios are LHS / RHS with the unknown constant set to 1,
so the reported sup ratio is an empirical surrogate for that constant on the
given grid and dyadic profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Iterable, Sequence

import numpy as np

from .besov import (BesovParams, HybridContext, ThmParams, aggregate, band_table,
                    data_norm_from_table, in_theorem_window, solution_norm_from_table)
from .kernels import OseenConfig, assemble_D, eigen_arrays
from .littlewood_paley import DEFAULT_PROFILE, DyadicProfile, band_range, band_symbol
from .spectral import (Grid2, ScalarField, SemiSpectralField, TensorForcing, VectorField,
                       dealiased_product, mixed_norm_array, to_physical, to_semispectral,
                       x2_phase)

DEFAULT_GRID = Grid2(16.0, 256, 4.0 * math.pi, 128)
DEFAULT_ALPHAS = (0.5, 1.0, 2.0, 4.0)
SEMIGROUP_C = {"lambda_minus": 0.25, "lambda_plus": 0.5, "abs": 0.5}
SAFETY = 2.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Reproducible family of random band-limited fields.

    Sample ``i``, component ``c`` draws its mode amplitudes from a generator
    seeded with ``(seed, i, c)``, one pair of complex normals per positive
    mode up to the top of the band range.  The draws do not depend on N1 or
    N2, so a refined grid (same box) carries the same continuous field.
    """

    seed: int = 42
    count: int = 64
    bands: tuple[int, int] = (0, 2)
    width: float = 1.5
    grid: Grid2 = DEFAULT_GRID

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be nonnegative")
        lo, hi = self.bands
        if lo > hi:
            raise ValueError("bands must be (jlo, jhi) with jlo <= jhi")
        br = band_range(self.grid)
        if lo < br.jmin or hi > br.jmax:
            raise ValueError(f"bands {self.bands} outside resolvable range {br}")
        if self.kmax >= self.grid.N2 // 2:
            raise ValueError(f"band {hi} reaches the x2 Nyquist mode on {self.grid}")
        if self.grid.L1 / self.width < 8.0:
            raise ValueError("envelope width too large for the x1 box (needs L1/width >= 8)")

    @property
    def kmax(self) -> int:
        """Largest mode index touched by the top band."""
        return int(math.floor(math.ldexp(1.0, self.bands[1] + 1) * self.grid.L2 / math.pi))

    def with_grid(self, grid: Grid2) -> "EnsembleSpec":
        return EnsembleSpec(self.seed, self.count, self.bands, self.width, grid)

    def with_count(self, count: int) -> "EnsembleSpec":
        return EnsembleSpec(self.seed, count, self.bands, self.width, self.grid)

    def field(self, i: int, c: int = 0) -> ScalarField:
        g = self.grid
        rng = np.random.default_rng([self.seed, i, c])
        re, im = rng.standard_normal((2, 2, self.kmax))
        z = re + 1j * im
        weight = np.zeros(g.N2)
        for j in range(self.bands[0], self.bands[1] + 1):
            weight += band_symbol(g, j)
        coef = np.zeros((2, g.N2), complex)
        k = np.arange(1, self.kmax + 1)
        coef[:, k] = z * weight[k]
        coef[:, -k] = np.conj(z) * weight[-k]
        x = g.x1 / self.width
        env = np.exp(-0.5 * x * x)
        vals = env[:, None] * (coef[0][None, :] + x[:, None] * coef[1][None, :])
        return to_physical(SemiSpectralField(g, vals), symmetrize_input=True)

    def scalars(self) -> list[ScalarField]:
        return [self.field(i) for i in range(self.count)]

    def tensor(self, i: int) -> TensorForcing:
        return TensorForcing(*(self.field(i, c) for c in range(4)))

    def vector(self, i: int, offset: int = 0) -> VectorField:
        return VectorField(self.field(i, offset), self.field(i, offset + 1))


@dataclass
class ConstantReport:
    identifier: str
    ratios: list[float] = field(default_factory=list)
    labels: list[tuple] = field(default_factory=list)
    grid: Grid2 | None = None
    profile_id: str = DEFAULT_PROFILE.identifier
    skipped: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def sup_ratio(self) -> float:
        return max(self.ratios) if self.ratios else math.nan

    @property
    def finite(self) -> bool:
        return bool(self.ratios) and all(math.isfinite(r) for r in self.ratios)

    def add(self, lhs: float, rhs: float, label: tuple) -> None:
        if rhs == 0.0:
            self.skipped += 1
            return
        self.ratios.append(lhs / rhs)
        self.labels.append(label)

    def rows(self) -> list[dict]:
        return [dict(estimate=self.identifier, label=";".join(map(str, lab)), ratio=r)
                for lab, r in zip(self.labels, self.ratios)]


def _physical(spec: np.ndarray, grid: Grid2) -> np.ndarray:
    return np.fft.ifft(spec * (x2_phase(grid) / grid.h2), axis=1).real


# ------------------------------------------------------------- frequency-localised

def _multipliers(alpha: float, xi: np.ndarray, T: float) -> dict[str, tuple]:
    """name -> (symbol on xi, comparison value at the band edge as a function of 2^j)."""
    lm, lp = eigen_arrays(alpha, xi)
    return {
        "resolvent": ((alpha * alpha + xi * xi) ** -0.5,
                      lambda t: (alpha * alpha + t * t) ** -0.5),
        "eigen_multiplier:minus": (lm, lambda t: abs(float(eigen_arrays(alpha, t)[0]))),
        "eigen_multiplier:plus": (lp, lambda t: abs(float(eigen_arrays(alpha, t)[1]))),
        "eigen_semigroup:minus": (np.exp(lm * T), lambda t: math.exp(
            SEMIGROUP_C["lambda_minus"] * float(eigen_arrays(alpha, t)[0]) * T)),
        "eigen_semigroup:plus": (np.exp(-lp * T), lambda t: math.exp(
            -SEMIGROUP_C["lambda_plus"] * float(eigen_arrays(alpha, t)[1]) * T)),
        "poisson_semigroup": (np.exp(-np.abs(xi) * T),
                              lambda t: math.exp(-SEMIGROUP_C["abs"] * t * T)),
    }


LEMMA41_IDS = ("resolvent", "eigen_multiplier", "eigen_semigroup", "poisson_semigroup")


def verify_lemma41(ensemble: EnsembleSpec, alphas: Sequence[float], Ts: Sequence[float],
                   p: float = 2.0, profile: DyadicProfile = DEFAULT_PROFILE
                   ) -> tuple[ConstantReport, ...]:
    """Four reports: ||Delta_j m(D2) f||_p / (bound(2^j) ||Delta_j f||_p).

    The two eigenvalue displays pool the + and - branches; per-branch sups
    are kept in ``extra``.  Semigroup comparison rates c are in SEMIGROUP_C.
    """
    g = ensemble.grid
    reps = {k: ConstantReport(k, grid=g, profile_id=profile.identifier) for k in LEMMA41_IDS}
    branch: dict[str, float] = {}
    lo, hi = ensemble.bands
    for i in range(ensemble.count):
        fh = to_semispectral(ensemble.field(i)).values
        for j in range(lo, hi + 1):
            piece = fh * band_symbol(g, j, profile)
            base = mixed_norm_array(_physical(piece, g), g, p, p)
            two_j = math.ldexp(1.0, j)
            for alpha in alphas:
                for T in Ts:
                    for name, (sym, bound) in _multipliers(alpha, g.xi2, T).items():
                        if name == "resolvent" and T != Ts[0]:
                            continue
                        if name.startswith("eigen_multiplier") and T != Ts[0]:
                            continue
                        lhs = mixed_norm_array(_physical(piece * sym, g), g, p, p)
                        rhs = bound(two_j) * base
                        key = name.split(":")[0]
                        reps[key].add(lhs, rhs, (i, j, alpha, T, name))
                        if rhs > 0:
                            branch[name] = max(branch.get(name, 0.0), lhs / rhs)
    for name, v in branch.items():
        reps[name.split(":")[0]].extra[name] = v
    for r in reps.values():
        r.extra["p"] = p
        r.extra["c"] = dict(SEMIGROUP_C)
    return tuple(reps[k] for k in LEMMA41_IDS)


# ------------------------------------------------------------------ linear estimate

def _check_p3(p1: float, p3: float) -> None:
    if not 1.0 <= p3 <= p1:
        raise ValueError(f"need 1 <= p3 <= p1, got p3 = {p3}, p1 = {p1}")


def lemma42_rhs(F: TensorForcing, alpha: float, tp: ThmParams, p3: float,
                profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """Right-hand side of the linear estimate with C = 1."""
    _check_p3(tp.p1, p3)
    r1, r2, r3 = 1.0 / tp.p1, 1.0 / tp.p2, 1.0 / p3
    t = band_table(F, p3, tp.p2, profile)
    high = aggregate(t, r1 + r2 + r3 - 2.0, tp.q, alpha, "high")
    low_a = aggregate(t, -r1 + r2 + 2.0 * r3 - 2.0, tp.q, alpha, "low")
    low_b = aggregate(t, r1 + r2 - 1.0, tp.q, alpha, "low")
    return (alpha ** -r1 * high + alpha ** (r1 - r3) * low_a
            + alpha ** (-1.0 + r3 - r1) * low_b)


def remark_rhs(F: TensorForcing, alpha: float, tp: ThmParams,
               profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """alpha^{-1/p1} ||F||_{B^{3/p1+1/p2-2}_{p1/2,p2;q}} (needs p1 >= 2)."""
    if tp.p1 < 2.0:
        raise ValueError("the p3 = p1/2 specialisation needs p1 >= 2")
    t = band_table(F, tp.p1 / 2.0, tp.p2, profile)
    return alpha ** (-1.0 / tp.p1) * aggregate(t, 3.0 / tp.p1 + 1.0 / tp.p2 - 2.0, tp.q)


def verify_lemma42(ensemble: EnsembleSpec, alphas: Sequence[float], tp: ThmParams,
                   p3: float | None = None, profile: DyadicProfile = DEFAULT_PROFILE
                   ) -> ConstantReport:
    """||D[F]||_S / RHS over tensor samples; p3 defaults to p1."""
    p3 = tp.p1 if p3 is None else float(p3)
    _check_p3(tp.p1, p3)
    rep = ConstantReport(f"linear(p3={p3:g})", grid=ensemble.grid,
                         profile_id=profile.identifier, extra={"p3": p3})
    for i in range(ensemble.count):
        F = ensemble.tensor(i)
        for alpha in alphas:
            u = assemble_D(F, OseenConfig(alpha), check=False)
            lhs = solution_norm_from_table(band_table(u, tp.p1, tp.p2, profile), tp, alpha)
            rep.add(lhs, lemma42_rhs(F, alpha, tp, p3, profile), (i, alpha))
    return rep


def verify_lemma42_remark(ensemble: EnsembleSpec, alphas: Sequence[float], tp: ThmParams,
                          profile: DyadicProfile = DEFAULT_PROFILE) -> ConstantReport:
    """The p3 = p1/2 specialisation with the collapsed full-range norm."""
    rep = ConstantReport("linear-remark", grid=ensemble.grid, profile_id=profile.identifier,
                         extra={"p3": tp.p1 / 2.0})
    for i in range(ensemble.count):
        F = ensemble.tensor(i)
        for alpha in alphas:
            u = assemble_D(F, OseenConfig(alpha), check=False)
            lhs = solution_norm_from_table(band_table(u, tp.p1, tp.p2, profile), tp, alpha)
            rep.add(lhs, remark_rhs(F, alpha, tp, profile), (i, alpha))
    return rep


# ------------------------------------------------------------------ bilinear estimate

def _bands(fh: np.ndarray, grid: Grid2, profile: DyadicProfile) -> dict[int, np.ndarray]:
    return {j: fh * band_symbol(grid, j, profile) for j in band_range(grid)}


def bony_decompose(f: ScalarField, g: ScalarField, profile: DyadicProfile = DEFAULT_PROFILE
                   ) -> tuple[ScalarField, ScalarField, ScalarField]:
    """(T_f g, T_g f, R(f, g)) with low-frequency cut k - 3 and diagonal |k - l| <= 2.

    Products are dealiased; on zero-mean inputs the three pieces add up to the
    dealiased product f g.
    """
    grid = f.grid
    if g.grid != grid:
        raise ValueError("f and g live on different grids")
    fb = _bands(to_semispectral(f).values, grid, profile)
    gb = _bands(to_semispectral(g).values, grid, profile)
    js = sorted(fb)
    zero = np.zeros(grid.shape, complex)

    def low(bands, k):
        acc = zero.copy()
        for l in js:
            if l <= k - 3:
                acc += bands[l]
        return acc

    def prod(a, b):
        return dealiased_product(SemiSpectralField(grid, a), SemiSpectralField(grid, b)).values

    tfg, tgf, rem = zero.copy(), zero.copy(), zero.copy()
    for k in js:
        lf, lg = low(fb, k), low(gb, k)
        if np.any(lf):
            tfg += prod(lf, gb[k])
        if np.any(lg):
            tgf += prod(lg, fb[k])
        near = sum((gb[l] for l in js if abs(k - l) <= 2), zero)
        rem += prod(fb[k], near)
    return tuple(to_physical(SemiSpectralField(grid, a), symmetrize_input=True)
                 for a in (tfg, tgf, rem))


def product(f: ScalarField, g: ScalarField) -> ScalarField:
    return to_physical(dealiased_product(to_semispectral(f), to_semispectral(g)),
                       symmetrize_input=True)


def bilinear_lhs(f: ScalarField, g: ScalarField, alpha: float, tp: ThmParams,
                 profile: DyadicProfile = DEFAULT_PROFILE) -> float:
    """alpha^{-1/p1} ||f g||_{B^{3/p1+1/p2-2}_{p1/2,p2;q}}."""
    t = band_table(product(f, g), tp.p1 / 2.0, tp.p2, profile)
    return alpha ** (-1.0 / tp.p1) * aggregate(t, 3.0 / tp.p1 + 1.0 / tp.p2 - 2.0, tp.q)


def _bilinear_report(ident: str, ensemble: EnsembleSpec, alphas, tp: ThmParams,
                     profile: DyadicProfile) -> ConstantReport:
    rep = ConstantReport(ident, grid=ensemble.grid, profile_id=profile.identifier,
                         extra={"p1": tp.p1, "p2": tp.p2, "q": tp.q})
    for i in range(ensemble.count):
        f, g = ensemble.field(i, 0), ensemble.field(i, 1)
        tf = band_table(f, tp.p1, tp.p2, profile)
        tg = band_table(g, tp.p1, tp.p2, profile)
        for alpha in alphas:
            rhs = solution_norm_from_table(tf, tp, alpha) * solution_norm_from_table(tg, tp, alpha)
            rep.add(bilinear_lhs(f, g, alpha, tp, profile), rhs, (i, alpha))
    return rep


def verify_lemma43(ensemble: EnsembleSpec, alphas: Sequence[float], tp: ThmParams,
                   profile: DyadicProfile = DEFAULT_PROFILE) -> ConstantReport:
    """alpha^{-1/p1}||fg|| / (||f||_S ||g||_S); parameters must lie in the window."""
    if not in_theorem_window(tp.p1, tp.p2, tp.q):
        raise ValueError(f"(p1, p2, q) = ({tp.p1}, {tp.p2}, {tp.q}) outside the admissible "
                         "window; the bilinear estimate is not claimed there")
    return _bilinear_report("bilinear", ensemble, alphas, tp, profile)


def bilinear_outside_window(ensemble: EnsembleSpec, alphas: Sequence[float],
                            params: Iterable[tuple[float, float, float]],
                            profile: DyadicProfile = DEFAULT_PROFILE) -> list[ConstantReport]:
    """Archive-only sweep outside the window: ratios are recorded, no bound is claimed."""
    out = []
    for p1, p2, q in params:
        tp = ThmParams(p1, p2, q, strict=False)
        rep = _bilinear_report(f"bilinear-archive(p1={p1:g},p2={p2:g},q={q:g})",
                               ensemble, alphas, tp, profile)
        rep.extra["in_window"] = tp.in_window
        out.append(rep)
    return out


# ------------------------------------------------------------------------ C0

@dataclass
class C0Report:
    value: float
    linear: ConstantReport
    bilinear: ConstantReport
    safety: float = SAFETY

    @property
    def raw(self) -> float:
        return max(self.linear.sup_ratio, self.bilinear.sup_ratio)


def verify_corollary(ensemble: EnsembleSpec, alphas: Sequence[float], tp: ThmParams,
                     profile: DyadicProfile = DEFAULT_PROFILE
                     ) -> tuple[ConstantReport, ConstantReport]:
    """Sup ratios ||D[F]||_S/||F||_D and ||D[u(x)v]||_S/(||u||_S ||v||_S)."""
    g = ensemble.grid
    lin = ConstantReport("C0-linear", grid=g, profile_id=profile.identifier)
    bil = ConstantReport("C0-bilinear", grid=g, profile_id=profile.identifier)
    for i in range(ensemble.count):
        F = ensemble.tensor(i)
        u, v = ensemble.vector(i, 0), ensemble.vector(i, 2)
        tF = band_table(F, tp.p1, tp.p2, profile)
        tu = band_table(u, tp.p1, tp.p2, profile)
        tv = band_table(v, tp.p1, tp.p2, profile)
        uv = TensorForcing.outer(u, v)
        for alpha in alphas:
            cfg = OseenConfig(alpha)
            DF = assemble_D(F, cfg, check=False)
            Duv = assemble_D(uv, cfg, check=False)
            lin.add(solution_norm_from_table(band_table(DF, tp.p1, tp.p2, profile), tp, alpha),
                    data_norm_from_table(tF, tp, alpha), (i, alpha))
            bil.add(solution_norm_from_table(band_table(Duv, tp.p1, tp.p2, profile), tp, alpha),
                    solution_norm_from_table(tu, tp, alpha)
                    * solution_norm_from_table(tv, tp, alpha), (i, alpha))
    return lin, bil


def estimate_C0(ensemble: EnsembleSpec, alphas: Sequence[float] = DEFAULT_ALPHAS,
                tp: ThmParams | None = None, safety: float = SAFETY,
                profile: DyadicProfile = DEFAULT_PROFILE) -> C0Report:
    """Empirical C0: safety factor times the larger of the two sup ratios."""
    if ensemble.count <= 0 or not alphas:
        raise ValueError("estimate_C0 needs a non-empty ensemble and alpha list")
    tp = ThmParams() if tp is None else tp
    lin, bil = verify_corollary(ensemble, alphas, tp, profile)
    if not (lin.finite and bil.finite):
        raise ValueError("ensemble produced no finite ratios")
    return C0Report(safety * max(lin.sup_ratio, bil.sup_ratio), lin, bil, safety)
