"""Grids, field containers and the x2-Fourier transform.

Fields live on the periodic box [-L1, L1) x [-L2, L2).  Arrays are indexed
``values[i1, i2]`` (x1 outer, x2 inner).  Semi-spectral fields keep the x1
sample index and replace x2 by the Fourier modes in numpy FFT order.

The transform is normalised to approximate the continuous Fourier transform
``f^(xi) = int f(x2) exp(-i xi x2) dx2``, so values are comparable across grid
resolutions and under zero padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid2:
    """Uniform periodic grid on [-L1, L1) x [-L2, L2)."""

    L1: float
    N1: int
    L2: float
    N2: int

    def __post_init__(self):
        for name in ("N1", "N2"):
            n = getattr(self, name)
            if int(n) != n or n < 8 or not _is_pow2(int(n)):
                raise ValueError(f"{name} must be a power of two >= 8, got {n}")
        for name in ("L1", "L2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")

    @property
    def h1(self) -> float:
        return 2.0 * self.L1 / self.N1

    @property
    def h2(self) -> float:
        return 2.0 * self.L2 / self.N2

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N1, self.N2)

    @cached_property
    def x1(self) -> np.ndarray:
        return -self.L1 + self.h1 * np.arange(self.N1)

    @cached_property
    def x2(self) -> np.ndarray:
        return -self.L2 + self.h2 * np.arange(self.N2)

    @cached_property
    def k2(self) -> np.ndarray:
        """Integer mode numbers in FFT order."""
        return np.fft.fftfreq(self.N2, 1.0 / self.N2).astype(int)

    @cached_property
    def xi2(self) -> np.ndarray:
        """Mode frequencies pi*k/L2 in FFT order."""
        return np.pi * self.k2 / self.L2

    @cached_property
    def xi1(self) -> np.ndarray:
        """x1 frequencies of the periodic truncation (FFT order)."""
        return np.pi * np.fft.fftfreq(self.N1, 1.0 / self.N1) / self.L1

    @property
    def nyquist2(self) -> int:
        """FFT-order column index of the x2 Nyquist mode."""
        return self.N2 // 2

    def interior(self, fraction: float = 0.5) -> np.ndarray:
        """Boolean mask of x1 rows with |x1| <= fraction * L1."""
        return np.abs(self.x1) <= fraction * self.L1 + 1e-12 * self.L1

    def rescaled(self, lam: float) -> "Grid2":
        return Grid2(self.L1 / lam, self.N1, self.L2 / lam, self.N2)

    def refined(self, factor: int = 2) -> "Grid2":
        return Grid2(self.L1, self.N1 * factor, self.L2, self.N2 * factor)


def _check_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{what} contains non-finite values")


@dataclass(frozen=True, eq=False)
class ScalarField:
    grid: Grid2
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"expected shape {self.grid.shape}, got {v.shape}")
        _check_finite(v, "ScalarField")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid2) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape))

    def _other(self, other):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return ScalarField(self.grid, self.values + self._other(other))

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - self._other(other))

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class SemiSpectralField:
    grid: Grid2
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"expected shape {self.grid.shape}, got {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, grid: Grid2) -> "SemiSpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def __add__(self, other):
        return SemiSpectralField(self.grid, self.values + other.values)

    def __sub__(self, other):
        return SemiSpectralField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return SemiSpectralField(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VectorField:
    u1: ScalarField
    u2: ScalarField

    def __post_init__(self):
        if self.u1.grid != self.u2.grid:
            raise ValueError("vector components must share a grid")

    @property
    def grid(self) -> Grid2:
        return self.u1.grid

    @property
    def components(self) -> tuple[ScalarField, ScalarField]:
        return (self.u1, self.u2)

    @classmethod
    def zeros(cls, grid: Grid2) -> "VectorField":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    def __add__(self, o):
        return VectorField(self.u1 + o.u1, self.u2 + o.u2)

    def __sub__(self, o):
        return VectorField(self.u1 - o.u1, self.u2 - o.u2)

    def __mul__(self, c):
        return VectorField(self.u1 * c, self.u2 * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TensorForcing:
    F11: ScalarField
    F12: ScalarField
    F21: ScalarField
    F22: ScalarField

    def __post_init__(self):
        g = self.F11.grid
        if any(c.grid != g for c in self.components):
            raise ValueError("tensor components must share a grid")

    @property
    def grid(self) -> Grid2:
        return self.F11.grid

    @property
    def components(self) -> tuple[ScalarField, ...]:
        return (self.F11, self.F12, self.F21, self.F22)

    @classmethod
    def zeros(cls, grid: Grid2) -> "TensorForcing":
        return cls(*(ScalarField.zeros(grid) for _ in range(4)))

    @classmethod
    def outer(cls, u: VectorField, v: VectorField) -> "TensorForcing":
        """(u (x) v)_jk = u_j v_k, formed with the dealiased product."""
        uh = [to_semispectral(c) for c in u.components]
        vh = [to_semispectral(c) for c in v.components]
        return cls(*(to_physical(dealiased_product(uh[j], vh[k]), symmetrize_input=True)
                     for j in range(2) for k in range(2)))

    def __add__(self, o):
        return TensorForcing(*(a + b for a, b in zip(self.components, o.components)))

    def __sub__(self, o):
        return TensorForcing(*(a - b for a, b in zip(self.components, o.components)))

    def __mul__(self, c):
        return TensorForcing(*(a * c for a in self.components))

    __rmul__ = __mul__


def x2_phase(grid: Grid2) -> np.ndarray:
    # exp(i xi_k L2) = (-1)^k: shifts the FFT origin from x2 = -L2 to x2 = 0
    return np.where(grid.k2 % 2 == 0, 1.0, -1.0)


def to_semispectral(f: ScalarField) -> SemiSpectralField:
    """FFT along x2, normalised as a sampled continuous Fourier transform."""
    _check_finite(f.values, "input field")
    g = f.grid
    vals = np.fft.fft(f.values, axis=1) * (g.h2 * x2_phase(g))
    return SemiSpectralField(g, vals)


def hermitian_defect(fh: SemiSpectralField) -> float:
    """max |f(-xi) - conj f(xi)| relative to max |f|."""
    v = fh.values
    mirrored = np.conj(v[:, (-fh.grid.k2) % fh.grid.N2])
    peak = np.max(np.abs(v)) if v.size else 0.0
    if peak == 0.0:
        return 0.0
    return float(np.max(np.abs(v - mirrored)) / peak)


def symmetrize(fh: SemiSpectralField) -> SemiSpectralField:
    v = fh.values
    mirrored = np.conj(v[:, (-fh.grid.k2) % fh.grid.N2])
    return SemiSpectralField(fh.grid, 0.5 * (v + mirrored))


def to_physical(fh: SemiSpectralField, symmetrize_input: bool = False,
                tol: float = 1e-12) -> ScalarField:
    """Inverse of :func:`to_semispectral`.

    Non-Hermitian input (the transform of a complex field) is rejected unless
    ``symmetrize_input`` is set, in which case the Hermitian part is used.
    """
    if symmetrize_input:
        fh = symmetrize(fh)
    else:
        defect = hermitian_defect(fh)
        if defect > tol:
            raise ValueError(f"input is not Hermitian in xi2 (defect {defect:.3e})")
    g = fh.grid
    vals = np.fft.ifft(fh.values * (x2_phase(g) / g.h2), axis=1)
    return ScalarField(g, vals.real)


def _check_p(p: float, name: str) -> float:
    p = float(p)
    if not (p >= 1.0):  # also rejects nan
        raise ValueError(f"{name} must lie in [1, inf], got {p}")
    return p


def lp_along(values: np.ndarray, p: float, h: float, axis: int) -> np.ndarray:
    a = np.abs(values)
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1.0:
        return a.sum(axis=axis) * h
    if p == 2.0:
        return np.sqrt(np.sum(a * a, axis=axis) * h)
    return (np.sum(a ** p, axis=axis) * h) ** (1.0 / p)


def mixed_norm_array(values: np.ndarray, grid: Grid2, p1: float, p2: float) -> float:
    p1 = _check_p(p1, "p1")
    p2 = _check_p(p2, "p2")
    inner = lp_along(values, p2, grid.h2, axis=1)
    return float(lp_along(inner, p1, grid.h1, axis=0))


def mixed_norm(f: ScalarField, p1: float, p2: float) -> float:
    """L^{p1}_{x1} L^{p2}_{x2} norm by the rectangle rule (grid max for p = inf)."""
    return mixed_norm_array(f.values, f.grid, p1, p2)


def odd_safe(grid: Grid2, symbol: np.ndarray) -> np.ndarray:
    """Zero an odd symbol at the Nyquist column so Hermitian symmetry survives."""
    s = np.array(symbol, dtype=complex)
    s[..., grid.nyquist2] = 0.0
    return s


def dx2_symbol(grid: Grid2, order: int) -> np.ndarray:
    sym = (1j * grid.xi2) ** order
    return odd_safe(grid, sym) if order % 2 else sym.astype(complex)


def dx2_multiplier(fh: SemiSpectralField, order: int) -> SemiSpectralField:
    """Multiply by (i xi2)^order.  Odd orders zero the Nyquist column."""
    if int(order) != order or order < 0:
        raise ValueError(f"order must be a nonnegative integer, got {order}")
    if order == 0:
        return SemiSpectralField(fh.grid, fh.values.copy())
    return SemiSpectralField(fh.grid, fh.values * dx2_symbol(fh.grid, int(order)))


def _pad_modes(values: np.ndarray, n_old: int, n_new: int) -> np.ndarray:
    half = n_old // 2
    out = np.zeros(values.shape[:-1] + (n_new,), dtype=complex)
    out[..., :half] = values[..., :half]
    # the old Nyquist column is dropped (ambiguous sign after padding)
    out[..., n_new - half + 1:] = values[..., half + 1:]
    return out


def _truncate_modes(values: np.ndarray, n_new: int) -> np.ndarray:
    half = n_new // 2
    out = np.zeros(values.shape[:-1] + (n_new,), dtype=complex)
    out[..., :half] = values[..., :half]
    out[..., half + 1:] = values[..., values.shape[-1] - half + 1:]
    return out


def dealiased_product(fh: SemiSpectralField, gh: SemiSpectralField) -> SemiSpectralField:
    """Pointwise product f*g with 3/2-rule zero padding in xi2.

    The product is formed in physical space on the padded x2 grid and
    truncated back to the original modes; the Nyquist column is zero.
    """
    if fh.grid != gh.grid:
        raise ValueError("fields live on different grids")
    g = fh.grid
    m = 3 * g.N2 // 2
    h = 2.0 * g.L2 / m
    k = np.fft.fftfreq(m, 1.0 / m).astype(int)
    phase = np.where(k % 2 == 0, 1.0, -1.0)

    def up(a: SemiSpectralField) -> np.ndarray:
        padded = _pad_modes(symmetrize(a).values, g.N2, m)
        return np.fft.ifft(padded * (phase / h), axis=1).real

    ph = np.fft.fft(up(fh) * up(gh), axis=1) * (h * phase)
    return SemiSpectralField(g, _truncate_modes(ph, g.N2))


def x2_mean(f: ScalarField) -> np.ndarray:
    return f.values.mean(axis=1)


def remove_x2_mean(f: ScalarField) -> tuple[ScalarField, float]:
    """Project out the xi2 = 0 content; returns the field and the discarded L2 mass."""
    mean = x2_mean(f)
    discarded = float(np.sqrt(np.sum(mean ** 2) * f.grid.h1 * 2 * f.grid.L2))
    return ScalarField(f.grid, f.values - mean[:, None]), discarded


def boundary_mass(f: ScalarField) -> float:
    """Largest |f| on the two outermost x1 rows, relative to the peak of |f|."""
    a = np.abs(f.values)
    peak = a.max()
    if peak == 0.0:
        return 0.0
    return float(max(a[0].max(), a[-1].max()) / peak)


def band_limited_noise(grid: Grid2, xi_lo: float, xi_hi: float,
                       rng: np.random.Generator, width: float = 1.0) -> ScalarField:
    """Smooth random field with x2 spectrum in xi_lo <= |xi2| <= xi_hi.

    Used by tests and probes.  Gaussian x1 envelope of the given width.
    """
    xi = np.abs(grid.xi2)
    mask = (xi >= xi_lo) & (xi <= xi_hi)
    mask[grid.nyquist2] = False
    coef = (rng.standard_normal((2, grid.N2)) + 1j * rng.standard_normal((2, grid.N2))) * mask
    x = grid.x1 / width
    env = np.exp(-0.5 * x * x)
    vals = env[:, None] * (coef[0][None, :] + x[:, None] * coef[1][None, :])
    return to_physical(SemiSpectralField(grid, vals), symmetrize_input=True)
