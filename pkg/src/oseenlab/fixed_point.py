"""Picard iteration for the mild formulation u = D[F - u (x) u].

The iteration map is ``Phi[u] = assemble_D(F - u (x) u)``; products are formed
with 3/2-rule dealiasing in x2.  All distances are measured in the S norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .besov import HybridContext, ThmParams, data_norm_D, solution_norm_S
from .kernels import (OseenConfig, _spectral_pdiv, _zero_nyquist, assemble_D, oseen_oracle,
                      oseen_symbol)
from .spectral import Grid2, TensorForcing, VectorField, band_limited_noise

STATUSES = ("converged", "converged-nonmonotone", "diverged", "max_iter")


@dataclass(frozen=True)
class SolverConfig:
    alpha: float
    tp: ThmParams = field(default_factory=ThmParams)
    tol: float = 1e-10
    max_iter: int = 200
    C0_estimate: float | None = None
    init: str = "zero"
    quadrature: str = "quintic"
    growth_limit: int = 5

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.init not in ("zero", "linear"):
            raise ValueError(f"init must be 'zero' or 'linear', got {self.init!r}")
        if self.C0_estimate is not None and not self.C0_estimate > 0:
            raise ValueError("C0_estimate must be positive")

    @property
    def oseen(self) -> OseenConfig:
        return OseenConfig(self.alpha, self.quadrature)

    @property
    def ctx(self) -> HybridContext:
        return HybridContext(self.alpha)

    def s_norm(self, u) -> float:
        return solution_norm_S(u, self.tp, self.ctx)

    def d_norm(self, F) -> float:
        return data_norm_D(F, self.tp, self.ctx)


@dataclass
class IterationRow:
    n: int
    s_norm: float
    diff: float
    ratio: float       # diff_n / diff_{n-1}; nan for n = 1
    residual: float    # relative mild residual of the previous iterate


@dataclass
class GateReport:
    passed: bool | None
    data_norm: float
    threshold: float
    margin: float      # threshold / data_norm
    skipped: bool = False


@dataclass
class IterationReport:
    rows: list[IterationRow] = field(default_factory=list)
    status: str = "max_iter"
    final_residual: float = math.nan
    discrepancy: float = math.nan   # ||u - Phi[u]||_S
    gate: GateReport | None = None
    ball_radius: float = math.inf

    @property
    def iterations(self) -> int:
        return len(self.rows)

    @property
    def monotone(self) -> bool:
        d = [r.diff for r in self.rows]
        return all(b <= a for a, b in zip(d, d[1:]))

    def max_ratio(self, start: int = 2) -> float:
        """Largest contraction ratio r_n for n >= start (0 if none)."""
        r = [row.ratio for row in self.rows if row.n >= start and math.isfinite(row.ratio)]
        return max(r, default=0.0)

    @property
    def ball_ok(self) -> bool:
        return all(r.s_norm <= self.ball_radius for r in self.rows)


def picard_map(u: VectorField, F: TensorForcing, cfg: SolverConfig) -> VectorField:
    """Phi[u] = D[F - u (x) u]."""
    return assemble_D(F - TensorForcing.outer(u, u), cfg.oseen, check=False)


def check_smallness(F: TensorForcing, cfg: SolverConfig) -> GateReport:
    """Pass iff ||F||_D <= 1 / (8 C0^2); the boundary counts as a pass."""
    dn = cfg.d_norm(F)
    if cfg.C0_estimate is None:
        warnings.warn("no C0_estimate given: smallness gate skipped, no existence "
                      "guarantee is claimed", stacklevel=2)
        return GateReport(None, dn, math.nan, math.nan, skipped=True)
    thr = 1.0 / (8.0 * cfg.C0_estimate ** 2)
    margin = math.inf if dn == 0.0 else thr / dn
    return GateReport(dn <= thr, dn, thr, margin)


def picard_solve(F: TensorForcing, cfg: SolverConfig, u0: VectorField | None = None,
                 gate: bool = False):
    """Iterate Phi from u0 (default: 0, or D[F] with init='linear').

    Returns ``(u, report)``; ``u`` is None when the iteration diverged.
    With ``gate=True`` the smallness gate is evaluated first and recorded.
    """
    report = IterationReport()
    if gate or cfg.C0_estimate is not None:
        with warnings.catch_warnings():
            if not gate:
                warnings.simplefilter("ignore")
            report.gate = check_smallness(F, cfg)
        if report.gate.passed and cfg.C0_estimate is not None:
            report.ball_radius = 2.0 * cfg.C0_estimate * report.gate.data_norm

    if u0 is None:
        u = VectorField.zeros(F.grid) if cfg.init == "zero" else \
            assemble_D(F, cfg.oseen, check=False)
    else:
        u = u0
    growth = 0
    prev = math.nan
    for n in range(1, cfg.max_iter + 1):
        new = picard_map(u, F, cfg)
        diff = cfg.s_norm(new - u)
        s = cfg.s_norm(new)
        if not (math.isfinite(diff) and math.isfinite(s)):
            report.status = "diverged"
            return None, report
        ratio = diff / prev if n > 1 and prev > 0 else math.nan
        resid = diff / s if s > 0 else (0.0 if diff == 0 else math.inf)
        report.rows.append(IterationRow(n, s, diff, ratio, resid))
        growth = growth + 1 if n > 1 and diff > prev else 0
        u, prev = new, diff
        if diff <= cfg.tol:
            report.status = "converged" if report.monotone else "converged-nonmonotone"
            break
        if growth >= cfg.growth_limit:
            report.status = "diverged"
            return None, report
    report.discrepancy, report.final_residual = _mild(u, F, cfg)
    return u, report


def _mild(u: VectorField, F: TensorForcing, cfg: SolverConfig) -> tuple[float, float]:
    phi = picard_map(u, F, cfg)
    disc = cfg.s_norm(u - phi)
    scale = cfg.s_norm(phi)
    if scale == 0.0:
        return disc, (0.0 if disc == 0.0 else math.inf)
    return disc, disc / scale


def _pde_residual(u: VectorField, F: TensorForcing, alpha: float, nonlinear: bool,
                  fraction: float) -> float:
    """Interior max of |(|xi|^2 + i alpha xi1) u^ - (P div G)^| / max |(P div G)^|."""
    G = F - TensorForcing.outer(u, u) if nonlinear else F
    rhs = _spectral_pdiv(G)
    sym = oseen_symbol(u.grid, alpha)
    sym[0, 0] = 0.0
    lhs = _zero_nyquist(np.stack([sym * np.fft.fft2(c.values) for c in u.components]))
    res = np.real(np.fft.ifft2(lhs - rhs, axes=(1, 2)))
    ref = np.real(np.fft.ifft2(rhs, axes=(1, 2)))
    win = u.grid.interior(fraction)
    denom = np.max(np.abs(ref[:, win]))
    if denom == 0.0:
        return 0.0 if np.max(np.abs(res[:, win])) == 0.0 else math.inf
    return float(np.max(np.abs(res[:, win])) / denom)


def residual(u: VectorField, F: TensorForcing, cfg: SolverConfig, form: str = "mild",
             nonlinear: bool = True, fraction: float = 0.5) -> float:
    """Relative residual of u against F.

    ``mild``: ||u - D[F - u(x)u]||_S / ||D[F - u(x)u]||_S, the fixed-point identity.
    ``pde``: the Fourier-form Oseen equation on a periodic box, interior window.
    ``nonlinear=False`` drops the quadratic term in either form.
    """
    if u.grid != F.grid:
        raise ValueError("u and F live on different grids")
    if form == "mild":
        G = F - TensorForcing.outer(u, u) if nonlinear else F
        phi = assemble_D(G, cfg.oseen, check=False)
        disc, scale = cfg.s_norm(u - phi), cfg.s_norm(phi)
        if scale == 0.0:
            return 0.0 if disc == 0.0 else math.inf
        return disc / scale
    if form == "pde":
        return _pde_residual(u, F, cfg.alpha, nonlinear, fraction)
    raise ValueError(f"unknown residual form {form!r}")


def random_vector_field(grid: Grid2, rng: np.random.Generator, xi_lo: float, xi_hi: float,
                        width: float) -> VectorField:
    return VectorField(band_limited_noise(grid, xi_lo, xi_hi, rng, width),
                       band_limited_noise(grid, xi_lo, xi_hi, rng, width))


@dataclass
class UniquenessReport:
    distances: list[float] = field(default_factory=list)
    iterations: list[int] = field(default_factory=list)
    statuses: list[str] = field(default_factory=list)
    start_norms: list[float] = field(default_factory=list)
    radius: float = math.nan
    tolerance: float = math.nan

    @property
    def ok(self) -> bool:
        return all(s == "converged" for s in self.statuses) and \
            all(d <= self.tolerance for d in self.distances)

    @property
    def violations(self) -> list[int]:
        return [i for i, (d, s) in enumerate(zip(self.distances, self.statuses))
                if s != "converged" or d > self.tolerance]


def uniqueness_probe(F: TensorForcing, cfg: SolverConfig, trials: int, seed: int,
                     baseline: VectorField | None = None, xi_band=(0.5, 8.0),
                     width: float | None = None) -> UniquenessReport:
    """Multi-start Picard from random guesses inside the 1/(4 C0) ball."""
    if cfg.C0_estimate is None:
        raise ValueError("uniqueness_probe needs C0_estimate for the ball radius")
    radius = 1.0 / (4.0 * cfg.C0_estimate)
    rep = UniquenessReport(radius=radius, tolerance=100.0 * cfg.tol)
    if trials <= 0:
        return rep
    if baseline is None:
        baseline, base_rep = picard_solve(F, cfg)
        if base_rep.status != "converged":
            raise RuntimeError(f"baseline did not converge ({base_rep.status})")
    grid = F.grid
    w = grid.L1 / 16.0 if width is None else width
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        v = random_vector_field(grid, rng, xi_band[0], xi_band[1], w)
        nv = cfg.s_norm(v)
        v = v * (radius * rng.uniform(0.25, 1.0) / nv)
        u, r = picard_solve(F, cfg, u0=v)
        rep.start_norms.append(cfg.s_norm(v))
        rep.statuses.append(r.status)
        rep.iterations.append(r.iterations)
        rep.distances.append(math.inf if u is None else cfg.s_norm(u - baseline))
    return rep


@dataclass
class LipschitzReport:
    status: str                 # "ok" | "identical" | "gate-failed" | "not-converged"
    ratio: float = math.nan
    solution_gap: float = math.nan
    data_gap: float = math.nan


def lipschitz_probe(F: TensorForcing, G: TensorForcing, cfg: SolverConfig) -> LipschitzReport:
    """||u_F - u_G||_S / ||F - G||_D for two gated forcings."""
    dg = cfg.d_norm(F - G)
    if dg == 0.0:
        return LipschitzReport("identical", math.nan, 0.0, 0.0)
    if cfg.C0_estimate is not None:
        if not (check_smallness(F, cfg).passed and check_smallness(G, cfg).passed):
            return LipschitzReport("gate-failed", data_gap=dg)
    else:
        warnings.warn("lipschitz_probe without C0_estimate: gate not checked", stacklevel=2)
    uF, rF = picard_solve(F, cfg)
    uG, rG = picard_solve(G, cfg)
    if uF is None or uG is None or not (rF.status.startswith("converged")
                                        and rG.status.startswith("converged")):
        return LipschitzReport("not-converged", data_gap=dg)
    gap = cfg.s_norm(uF - uG)
    return LipschitzReport("ok", gap / dg, gap, dg)


def linear_solution(F: TensorForcing, cfg: SolverConfig, method: str = "kernel") -> VectorField:
    """D[F] by the kernel formulas or by the periodic spectral oracle."""
    if method == "kernel":
        return assemble_D(F, cfg.oseen)
    if method == "oracle":
        return oseen_oracle(F, cfg.oseen)
    raise ValueError(f"unknown method {method!r}")
