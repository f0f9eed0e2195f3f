"""Forcing generators with admissibility enforcement."""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .spectral import Grid2, ScalarField, TensorForcing, boundary_mass, remove_x2_mean

BOUNDARY_TOL = 1e-10
KINDS = ("zero", "gaussian-tensor", "random-band", "from-file")


class AdmissibilityError(ValueError):
    """The generated forcing violates a decay or mean condition."""


@dataclass(frozen=True)
class ForcingSpec:
    kind: str = "gaussian-tensor"
    amplitude: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    width: float = 1.0
    components: tuple[float, float, float, float] = (1.0, 0.5, 0.25, -1.0)
    bands: tuple[int, int] = (0, 2)
    seed: int = 0
    path: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown forcing kind {self.kind!r}; expected one of {KINDS}")
        if not math.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if self.kind == "from-file" and not self.path:
            raise ValueError("from-file forcing needs a path")


def _gaussian(grid: Grid2, center, width: float) -> np.ndarray:
    x1 = grid.x1[:, None] - center[0]
    x2 = grid.x2[None, :] - center[1]
    return np.exp(-(x1 * x1 + x2 * x2) / (width * width))


def _raw(spec: ForcingSpec, grid: Grid2) -> TensorForcing:
    if spec.kind == "zero" or spec.amplitude == 0.0:
        return TensorForcing.zeros(grid)
    if spec.kind == "gaussian-tensor":
        if spec.width >= grid.L1 / 4.0:
            bm = math.exp(-(grid.L1 - abs(spec.center[0])) ** 2 / spec.width ** 2)
            raise AdmissibilityError(
                f"gaussian width {spec.width} >= L1/4 = {grid.L1 / 4}: boundary mass "
                f"~{bm:.2e} exceeds {BOUNDARY_TOL:g} of the peak")
        g = _gaussian(grid, spec.center, spec.width)
        return TensorForcing(*(ScalarField(grid, spec.amplitude * a * g)
                               for a in spec.components))
    if spec.kind == "random-band":
        from .estimates import EnsembleSpec
        ens = EnsembleSpec(seed=spec.seed, count=1, bands=spec.bands, width=spec.width,
                           grid=grid)
        return ens.tensor(0) * spec.amplitude
    from .io import read_field
    return read_field(spec.path, grid=grid, expect="tensor") * spec.amplitude


def enforce_admissible(F: TensorForcing) -> TensorForcing:
    """Project out the x2 mean and check decay at the x1 boundary."""
    comps = tuple(remove_x2_mean(c)[0] for c in F.components)
    out = TensorForcing(*comps)
    for name, c in zip(("F11", "F12", "F21", "F22"), comps):
        bm = boundary_mass(c)
        if bm > BOUNDARY_TOL:
            raise AdmissibilityError(
                f"{name}: boundary mass {bm:.3e} exceeds {BOUNDARY_TOL:g} of the peak")
    return out


def generate_forcing(spec: ForcingSpec, grid: Grid2) -> TensorForcing:
    """Deterministic admissible forcing tensor for the given grid."""
    return enforce_admissible(_raw(spec, grid))
