"""Oseen solution operators in the semi-spectral (x1, xi2) representation.

For each xi2 mode the Oseen ODE ``w'' - alpha w' - xi2^2 w = g`` has the
bounded Green's function

    G(z) = -exp(lambda_- z) / d   (z > 0),   -exp(lambda_+ z) / d   (z < 0),
    d = sqrt(alpha^2 + 4 xi2^2),

so every operator below is a sum of one causal and one anticausal
exponential convolution in x1.  Those are evaluated by exact recursions:
on each cell the data is replaced by a local Lagrange interpolant and the
interpolant is integrated against the exponential in closed form.

The product (-Delta)^-1 and d_x1 (-Delta)^-1 used by the tilde operators are
symmetric / antisymmetric exponential convolutions at rate |xi2| and reuse
the same recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math
import warnings

import numpy as np
from scipy.special import gammainc

from .spectral import (Grid2, ScalarField, SemiSpectralField, TensorForcing, VectorField,
                       boundary_mass, odd_safe, to_physical, to_semispectral)

QUADRATURES = {"linear": 1, "cubic": 3, "quintic": 5}
DECAY_TOL = 1e-10


@dataclass(frozen=True)
class EigenPair:
    lambda_minus: float
    lambda_plus: float


@dataclass(frozen=True)
class OseenConfig:
    alpha: float
    quadrature: str = "quintic"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.quadrature not in QUADRATURES:
            raise ValueError(f"unknown quadrature {self.quadrature!r}; "
                             f"choose from {sorted(QUADRATURES)}")

    @property
    def degree(self) -> int:
        return QUADRATURES[self.quadrature]


def eigen_arrays(alpha: float, xi) -> tuple[np.ndarray, np.ndarray]:
    """lambda_-(xi), lambda_+(xi); lambda_- in cancellation-free form."""
    xi = np.asarray(xi, dtype=float)
    root = np.sqrt(alpha * alpha + 4.0 * xi * xi)
    lam_plus = 0.5 * (alpha + root)
    if alpha >= 0:
        lam_minus = -2.0 * xi * xi / (alpha + root) if alpha > 0 else -0.5 * root
    else:
        lam_minus = 0.5 * (alpha - root)
    return lam_minus, lam_plus


def eigen_frequencies(alpha: float, xi2: float) -> EigenPair:
    lm, lp = eigen_arrays(alpha, xi2)
    return EigenPair(float(lm), float(lp))


# ---------------------------------------------------------------- recursions

@lru_cache(maxsize=None)
def _lagrange_in_s(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Stencil offsets and Lagrange coefficients in s = 1 - t on one cell.

    Cell [x_i, x_{i+1}] has t in [0, 1]; stencil nodes are the samples
    i + m for the centred offsets m.  Row m of the result gives the
    monomial coefficients of l_m(s).
    """
    half = (degree - 1) // 2
    offsets = np.arange(-half, degree - half + 1)
    s_nodes = 1.0 - offsets
    vt = np.vander(s_nodes, degree + 1, increasing=True).T
    coef = np.linalg.inv(vt)
    return offsets, coef


def _exp_moments(x: np.ndarray, degree: int) -> np.ndarray:
    """N_k = int_0^1 exp(-x s) s^k ds for k = 0..degree, x >= 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty((degree + 1,) + x.shape)
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    for k in range(degree + 1):
        big = math.factorial(k) * gammainc(k + 1, xs) / xs ** (k + 1)
        xk = np.where(small, x, 0.0)
        series = (1.0 / (k + 1) - xk / (k + 2) + xk * xk / (2.0 * (k + 3))
                  - xk ** 3 / (6.0 * (k + 4)))
        out[k] = np.where(small, series, big)
    return out


def exp_filter(h: np.ndarray, rate, dx: float, degree: int, reverse: bool = False) -> np.ndarray:
    """Causal exponential convolution along axis 0.

    Returns ``C(x_i) = int_{x_0}^{x_i} exp(-rate (x_i - y)) h(y) dy`` with h
    extended by zero outside the samples (zero influx).  ``rate >= 0`` is
    broadcast over the trailing axes.  ``reverse`` gives the anticausal
    integral from x_i to the far end.
    """
    if reverse:
        return exp_filter(h[::-1], rate, dx, degree)[::-1]
    h = np.asarray(h)
    n = h.shape[0]
    rate = np.broadcast_to(np.asarray(rate, dtype=float), h.shape[1:])
    if np.any(rate < 0):
        raise ValueError("exp_filter needs nonnegative decay rates")
    offsets, coef = _lagrange_in_s(degree)
    moments = _exp_moments(rate * dx, degree)
    weights = np.tensordot(coef, moments, axes=(1, 0))  # (n_offsets, *trailing)
    pad_lo = -offsets[0]
    pad_hi = offsets[-1]
    hp = np.concatenate([np.zeros((pad_lo,) + h.shape[1:], h.dtype), h,
                         np.zeros((pad_hi,) + h.shape[1:], h.dtype)])
    src = np.zeros(h.shape, dtype=np.result_type(h, float))
    for m, w in zip(offsets, weights):
        src += w * hp[pad_lo + m: pad_lo + m + n]
    src *= dx
    decay = np.exp(-rate * dx)
    out = np.empty_like(src)
    acc = np.zeros(h.shape[1:], dtype=src.dtype)
    out[0] = acc
    for i in range(n - 1):
        acc = decay * acc + src[i]
        out[i + 1] = acc
    return out


def _check_decay(gh: SemiSpectralField, what: str) -> None:
    a = np.abs(gh.values)
    peak = a.max()
    if peak > 0 and max(a[0].max(), a[-1].max()) > DECAY_TOL * peak:
        warnings.warn(f"{what}: input does not decay at the x1 boundary "
                      f"(boundary/peak > {DECAY_TOL:g}); truncation error may dominate",
                      stacklevel=3)


class _Rates:
    """Per-mode constants shared by all operators for one (grid, alpha)."""

    def __init__(self, grid: Grid2, alpha: float):
        xi = grid.xi2
        self.xi = xi
        self.absxi = np.abs(xi)
        self.lam_minus, self.lam_plus = eigen_arrays(alpha, xi)
        self.d = np.sqrt(alpha * alpha + 4.0 * xi * xi)
        self.fused0 = odd_safe(grid, -0.5j * np.sign(xi) * xi * xi)   # (i xi)^3 / (2|xi|)
        self.fused1 = 0.5 * xi * xi                                     # -(i xi)^2 / 2
        self.ddx2 = odd_safe(grid, 1j * xi)


def _oseen_parts(vals: np.ndarray, grid: Grid2, rates: _Rates, degree: int):
    """(int_{-inf}^x e^{lambda_-(x-y)} g, int_x^inf e^{lambda_+(x-y)} g)."""
    causal = exp_filter(vals, -rates.lam_minus, grid.h1, degree)
    anti = exp_filter(vals, rates.lam_plus, grid.h1, degree, reverse=True)
    return causal, anti


def _sym_parts(vals: np.ndarray, grid: Grid2, rates: _Rates, degree: int):
    """Causal and anticausal pieces of the e^{-|xi||y-z|} convolution."""
    causal = exp_filter(vals, rates.absxi, grid.h1, degree)
    anti = exp_filter(vals, rates.absxi, grid.h1, degree, reverse=True)
    return causal, anti


def _d0(vals, grid, rates, degree):
    c, a = _oseen_parts(vals, grid, rates, degree)
    return -(c + a) / rates.d


def _d1(vals, grid, rates, degree):
    c, a = _oseen_parts(vals, grid, rates, degree)
    return -(rates.lam_minus * c + rates.lam_plus * a) / rates.d


def apply_D0(gh: SemiSpectralField, cfg: OseenConfig, check: bool = True) -> SemiSpectralField:
    """Bounded solution of w'' - alpha w' - xi^2 w = g, mode by mode."""
    if check:
        _check_decay(gh, "apply_D0")
    rates = _Rates(gh.grid, cfg.alpha)
    return SemiSpectralField(gh.grid, _d0(gh.values, gh.grid, rates, cfg.degree))


def apply_D1(gh: SemiSpectralField, cfg: OseenConfig, check: bool = True) -> SemiSpectralField:
    """Bounded solution of w'' - alpha w' - xi^2 w = d_x1 g (lambda-weighted kernels)."""
    if check:
        _check_decay(gh, "apply_D1")
    rates = _Rates(gh.grid, cfg.alpha)
    return SemiSpectralField(gh.grid, _d1(gh.values, gh.grid, rates, cfg.degree))


def apply_tildeD0_d3(gh: SemiSpectralField, cfg: OseenConfig,
                     check: bool = True) -> SemiSpectralField:
    """tilde-D0 composed with d_x2^3; the fused weight vanishes at xi2 = 0."""
    if check:
        _check_decay(gh, "apply_tildeD0_d3")
    g, rates = gh.grid, _Rates(gh.grid, cfg.alpha)
    c, a = _sym_parts(gh.values, g, rates, cfg.degree)
    return SemiSpectralField(g, _d0(rates.fused0 * (c + a), g, rates, cfg.degree))


def apply_tildeD1_d2(gh: SemiSpectralField, cfg: OseenConfig,
                     check: bool = True) -> SemiSpectralField:
    """tilde-D1 composed with d_x2^2 (antisymmetric inner kernel)."""
    if check:
        _check_decay(gh, "apply_tildeD1_d2")
    g, rates = gh.grid, _Rates(gh.grid, cfg.alpha)
    c, a = _sym_parts(gh.values, g, rates, cfg.degree)
    return SemiSpectralField(g, _d0(rates.fused1 * (c - a), g, rates, cfg.degree))


def sgn_convolution(gh: SemiSpectralField, degree: int = 5) -> SemiSpectralField:
    """int sgn(x1 - z) exp(-|xi2||x1 - z|) g(z) dz, mode by mode."""
    rates = _Rates(gh.grid, 1.0)
    c, a = _sym_parts(gh.values, gh.grid, rates, degree)
    return SemiSpectralField(gh.grid, c - a)


def _require_nonzero_xi(gh: SemiSpectralField, what: str) -> None:
    if np.any(gh.values[:, 0] != 0):
        raise ValueError(f"{what} is singular at xi2 = 0; use the fused form")


def apply_tildeD0(gh: SemiSpectralField, cfg: OseenConfig) -> SemiSpectralField:
    """Unfused tilde-D0 for rows with xi2 != 0 only."""
    _require_nonzero_xi(gh, "apply_tildeD0")
    g, rates = gh.grid, _Rates(gh.grid, cfg.alpha)
    c, a = _sym_parts(gh.values, g, rates, cfg.degree)
    inv = np.zeros_like(rates.absxi)
    inv[1:] = 0.5 / rates.absxi[1:]
    return SemiSpectralField(g, _d0(inv * (c + a), g, rates, cfg.degree))


def apply_tildeD1(gh: SemiSpectralField, cfg: OseenConfig) -> SemiSpectralField:
    """Unfused tilde-D1 for rows with xi2 != 0 only."""
    _require_nonzero_xi(gh, "apply_tildeD1")
    g, rates = gh.grid, _Rates(gh.grid, cfg.alpha)
    c, a = _sym_parts(gh.values, g, rates, cfg.degree)
    return SemiSpectralField(g, _d0(-0.5 * (c - a), g, rates, cfg.degree))


def assemble_D_hat(Fh: tuple[SemiSpectralField, ...], cfg: OseenConfig
                   ) -> tuple[SemiSpectralField, SemiSpectralField]:
    """Semi-spectral D[F] from the four transformed components (F11, F12, F21, F22)."""
    g = Fh[0].grid
    rates = _Rates(g, cfg.alpha)
    deg = cfg.degree
    diff = Fh[0].values - Fh[3].values      # F11 - F22
    summ = Fh[1].values + Fh[2].values      # F12 + F21
    f21 = Fh[2].values
    c, a = _sym_parts(np.stack([diff, summ], axis=1), g, rates, deg)
    sym_diff, sym_sum = (c + a)[:, 0], (c + a)[:, 1]
    sgn_diff, sgn_sum = (c - a)[:, 0], (c - a)[:, 1]
    rhs1 = rates.ddx2 * f21 + rates.fused0 * sym_sum + rates.fused1 * sgn_diff
    rhs2 = rates.ddx2 * diff + rates.fused0 * sym_diff - rates.fused1 * sgn_sum
    c, a = _oseen_parts(np.stack([rhs1, rhs2, f21], axis=1), g, rates, deg)
    d0 = -(c + a) / rates.d
    d1_f21 = -(rates.lam_minus * c[:, 2] + rates.lam_plus * a[:, 2]) / rates.d
    return SemiSpectralField(g, d0[:, 0]), SemiSpectralField(g, d0[:, 1] - d1_f21)


def assemble_D(F: TensorForcing, cfg: OseenConfig, check: bool = True) -> VectorField:
    """u = D[F] through the explicit kernel formulas (real output)."""
    Fh = tuple(to_semispectral(c) for c in F.components)
    if check:
        for c in Fh:
            _check_decay(c, "assemble_D")
    u1h, u2h = assemble_D_hat(Fh, cfg)
    return VectorField(to_physical(u1h, symmetrize_input=True),
                       to_physical(u2h, symmetrize_input=True))


# ----------------------------------------------------- fully spectral route

def _wavenumbers(grid: Grid2):
    xi1 = grid.xi1[:, None]
    xi2 = grid.xi2[None, :]
    return xi1, xi2


def _zero_nyquist(a: np.ndarray) -> np.ndarray:
    n1, n2 = a.shape[-2:]
    a[..., n1 // 2, :] = 0.0
    a[..., :, n2 // 2] = 0.0
    return a


def _spectral_pdiv(F: TensorForcing) -> np.ndarray:
    g = F.grid
    xi1, xi2 = _wavenumbers(g)
    Fk = [np.fft.fft2(c.values) for c in F.components]
    div = [1j * xi1 * Fk[0] + 1j * xi2 * Fk[1], 1j * xi1 * Fk[2] + 1j * xi2 * Fk[3]]
    k2 = xi1 * xi1 + xi2 * xi2
    k2[0, 0] = 1.0
    xi = (xi1, xi2)
    proj = np.array([div[j] - xi[j] * (xi1 * div[0] + xi2 * div[1]) / k2 for j in range(2)])
    proj[:, 0, 0] = 0.0
    return _zero_nyquist(proj)


def _reduced_pdiv(F: TensorForcing) -> np.ndarray:
    g = F.grid
    xi1, xi2 = _wavenumbers(g)
    F11, F12, F21, F22 = (np.fft.fft2(c.values) for c in F.components)
    k2 = xi1 * xi1 + xi2 * xi2
    k2[0, 0] = 1.0
    inv = 1.0 / k2
    d1, d2 = 1j * xi1, 1j * xi2
    r1 = -(d2 * F21 + inv * d2 ** 3 * (F12 + F21) + d1 * inv * d2 ** 2 * (F11 - F22))
    r2 = -((d2 + inv * d2 ** 3) * (F11 - F22) - d1 * (F21 + inv * d2 ** 2 * (F12 + F21)))
    out = np.array([r1, r2])
    out[:, 0, 0] = 0.0
    return _zero_nyquist(out)


def _from_fft2(arr: np.ndarray, grid: Grid2) -> VectorField:
    return VectorField(ScalarField(grid, np.fft.ifft2(arr[0]).real),
                       ScalarField(grid, np.fft.ifft2(arr[1]).real))


def helmholtz_project_div(F: TensorForcing) -> VectorField:
    """P div F by 2D Fourier multipliers on the periodic box ((0,0) mode zeroed)."""
    return _from_fft2(_spectral_pdiv(F), F.grid)


def helmholtz_project_div_reduced(F: TensorForcing) -> VectorField:
    """Same target through the reduced display used to derive D_1, D_2."""
    return _from_fft2(_reduced_pdiv(F), F.grid)


def oseen_symbol(grid: Grid2, alpha: float) -> np.ndarray:
    xi1, xi2 = _wavenumbers(grid)
    sym = xi1 * xi1 + xi2 * xi2 + 1j * alpha * xi1
    sym[0, 0] = 1.0
    return sym


def oseen_oracle(F: TensorForcing, cfg: OseenConfig) -> VectorField:
    """Independent solution of -Delta u + alpha d1 u = P div F by 2D inversion."""
    rhs = _spectral_pdiv(F) / oseen_symbol(F.grid, cfg.alpha)
    rhs[:, 0, 0] = 0.0
    return _from_fft2(rhs, F.grid)


def apply_oseen_operator(u: VectorField, alpha: float) -> VectorField:
    """-Delta u + alpha d1 u spectrally on the periodic box."""
    sym = oseen_symbol(u.grid, alpha)
    sym[0, 0] = 0.0
    out = []
    for c in u.components:
        k = _zero_nyquist(np.fft.fft2(c.values) * sym)
        out.append(ScalarField(u.grid, np.fft.ifft2(k).real))
    return VectorField(*out)


def spectral_divergence(u: VectorField) -> float:
    """max |div u| relative to max |grad u| scale (spectral derivatives)."""
    xi1, xi2 = _wavenumbers(u.grid)
    k1 = np.fft.fft2(u.u1.values)
    k2 = np.fft.fft2(u.u2.values)
    div = _zero_nyquist(1j * xi1 * k1 + 1j * xi2 * k2)
    ref = _zero_nyquist(np.abs(xi1 * k1) + np.abs(xi2 * k2))
    denom = np.max(ref)
    return 0.0 if denom == 0 else float(np.max(np.abs(div)) / denom)


# ------------------------------------------------------------ ODE residuals

KERNEL_OPS = {
    "D0": apply_D0,
    "D1": apply_D1,
    "tildeD0_d3": apply_tildeD0_d3,
    "tildeD1_d2": apply_tildeD1_d2,
}


def _x1_derivatives(vals: np.ndarray, grid: Grid2):
    om = grid.xi1[:, None]
    k = np.fft.fft(vals, axis=0)
    k[grid.N1 // 2] = 0.0
    return om, k


def ode_rhs(kind: str, gh: SemiSpectralField) -> np.ndarray:
    """Fourier form of the right-hand side each kernel operator solves for."""
    g = gh.grid
    om, k = _x1_derivatives(gh.values, g)
    xi = g.xi2[None, :]
    denom = om * om + xi * xi
    denom[0, 0] = 1.0
    if kind == "D0":
        sym = np.ones_like(denom)
    elif kind == "D1":
        sym = 1j * om
    elif kind == "tildeD0_d3":
        sym = (1j * xi) ** 3 / denom
    elif kind == "tildeD1_d2":
        sym = 1j * om * (1j * xi) ** 2 / denom
    else:
        raise ValueError(f"unknown kernel {kind!r}")
    sym = np.array(np.broadcast_to(sym, k.shape), dtype=complex)
    sym[0, 0] = 0.0 if kind != "D0" else 1.0
    if kind == "tildeD0_d3":
        sym = odd_safe(g, sym)
    return np.fft.ifft(k * sym, axis=0)


def ode_lhs(wh: SemiSpectralField, alpha: float) -> np.ndarray:
    g = wh.grid
    om, k = _x1_derivatives(wh.values, g)
    xi = g.xi2[None, :]
    sym = -om * om - 1j * alpha * om - xi * xi
    return np.fft.ifft(k * sym, axis=0)


def ode_residual(kind: str, gh: SemiSpectralField, cfg: OseenConfig,
                 fraction: float = 0.5) -> float:
    """Interior relative residual of the defining ODE for one kernel operator."""
    wh = KERNEL_OPS[kind](gh, cfg, check=False)
    lhs = ode_lhs(wh, cfg.alpha)
    rhs = ode_rhs(kind, gh)
    mask = gh.grid.interior(fraction)
    scale = np.max(np.abs(rhs[mask]))
    if scale == 0:
        return float(np.max(np.abs(lhs[mask])))
    return float(np.max(np.abs(lhs[mask] - rhs[mask])) / scale)


def interior_relative_error(u: VectorField, v: VectorField, fraction: float = 0.5) -> float:
    """max |u - v| / max |v| over |x1| <= fraction*L1, both components."""
    mask = u.grid.interior(fraction)
    num = max(np.max(np.abs(a.values[mask] - b.values[mask]))
              for a, b in zip(u.components, v.components))
    den = max(np.max(np.abs(b.values[mask])) for b in v.components)
    return float(num / den) if den > 0 else float(num)


def forcing_boundary_mass(F: TensorForcing) -> float:
    return max(boundary_mass(c) for c in F.components)
