import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import direct_transform
from oseenlab.spectral import (Grid2, ScalarField, SemiSpectralField, TensorForcing, VectorField,
                               band_limited_noise, boundary_mass, dealiased_product,
                               dx2_multiplier, hermitian_defect, mixed_norm, remove_x2_mean,
                               to_physical, to_semispectral)

GRIDS = [Grid2(4.0, 8, math.pi, 8), Grid2(8.0, 32, 2 * math.pi, 64),
         Grid2(16.0, 128, 4 * math.pi, 256)]


def smooth_random(grid, seed):
    rng = np.random.default_rng(seed)
    return band_limited_noise(grid, 0.1, 0.6 * grid.xi2.max(), rng, grid.L1 / 8)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid2(1.0, 12, 1.0, 8)
    with pytest.raises(ValueError):
        Grid2(1.0, 8, 1.0, 4)
    with pytest.raises(ValueError):
        Grid2(-1.0, 8, 1.0, 8)
    g = Grid2(2.0, 16, 3.0, 32)
    assert g.h1 == 0.25 and g.h2 == 6.0 / 32
    assert np.all(np.diff(np.fft.fftshift(g.xi2)) > 0)


def test_nonfinite_rejected():
    g = GRIDS[0]
    vals = np.zeros(g.shape)
    vals[2, 3] = np.nan
    with pytest.raises(ValueError):
        ScalarField(g, vals)


def test_zero_transform():
    g = GRIDS[1]
    assert np.all(to_semispectral(ScalarField.zeros(g)).values == 0)
    assert np.all(to_physical(SemiSpectralField.zeros(g)).values == 0)


def test_matches_direct_sum():
    g = GRIDS[1]
    f = smooth_random(g, 1)
    ref = direct_transform(f.values, g.x2, g.xi2)
    assert np.max(np.abs(to_semispectral(f).values - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_single_mode_concentration():
    g = GRIDS[1]
    k0 = 5
    f = ScalarField(g, np.tile(np.cos(g.xi2[k0] * g.x2), (g.N1, 1)))
    a = np.abs(to_semispectral(f).values[0])
    others = np.delete(a, [k0, g.N2 - k0])
    assert others.max() <= 1e-12 * a.max()


def test_gaussian_against_closed_form():
    # FT of exp(-x^2) is sqrt(pi) exp(-xi^2 / 4)
    g = Grid2(4.0, 8, 8.0, 64)
    f = ScalarField(g, np.tile(np.exp(-g.x2 ** 2), (g.N1, 1)))
    fh = to_semispectral(f).values[0]
    exact = math.sqrt(math.pi) * np.exp(-g.xi2 ** 2 / 4)
    peak = np.abs(exact).max()
    keep = np.abs(exact) > 1e-10 * peak
    # relative 1e-8, with a floor at the FFT rounding level eps * peak
    err = np.abs(fh[keep] - exact[keep])
    assert np.all(err <= 1e-8 * np.abs(exact[keep]) + 4 * np.finfo(float).eps * peak)
    big = np.abs(exact) > 1e-6 * peak
    assert np.max(np.abs(fh[big] - exact[big]) / np.abs(exact[big])) <= 1e-8


def test_hermitian_pair_inverse_is_cosine():
    g = GRIDS[1]
    k0 = 3
    vals = np.zeros(g.shape, complex)
    # amplitude such that the inverse sum gives cos: (1/(2 L2)) (a + a) = 1
    vals[:, k0] = vals[:, -k0] = g.L2
    f = to_physical(SemiSpectralField(g, vals))
    assert np.max(np.abs(f.values - np.cos(g.xi2[k0] * g.x2))) <= 1e-12


def test_asymmetric_input_rejected_by_default():
    g = GRIDS[1]
    vals = np.zeros(g.shape, complex)
    vals[:, 2] = 1.0
    with pytest.raises(ValueError):
        to_physical(SemiSpectralField(g, vals))
    out = to_physical(SemiSpectralField(g, vals), symmetrize_input=True)
    assert np.all(np.isfinite(out.values))


@pytest.mark.parametrize("grid", GRIDS)
@pytest.mark.parametrize("seed", range(3))
def test_round_trip(grid, seed):
    f = smooth_random(grid, seed)
    back = to_physical(to_semispectral(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))
    assert hermitian_defect(to_semispectral(f)) <= 1e-13


@pytest.mark.parametrize("grid", GRIDS)
def test_parseval(grid):
    f = smooth_random(grid, 7)
    phys = np.sum(f.values ** 2) * grid.h2
    spec = np.sum(np.abs(to_semispectral(f).values) ** 2) / (2 * grid.L2)
    assert abs(phys - spec) <= 1e-10 * phys


def test_mixed_norm_constant():
    g = GRIDS[1]
    f = ScalarField(g, np.full(g.shape, 2.5))
    assert abs(mixed_norm(f, 1, 1) - 2.5 * 2 * g.L1 * 2 * g.L2) <= 1e-12 * 2.5 * 4 * g.L1 * g.L2
    assert mixed_norm(f, math.inf, math.inf) == 2.5


def test_mixed_norm_bad_exponent():
    g = GRIDS[0]
    with pytest.raises(ValueError):
        mixed_norm(ScalarField.zeros(g), 0.5, 2)
    with pytest.raises(ValueError):
        mixed_norm(ScalarField.zeros(g), 2, float("nan"))


def _bump(grid):
    x1 = grid.x1[:, None]
    x2 = grid.x2[None, :]
    return ScalarField(grid, np.exp(-(x1 ** 2 + x2 ** 2) ** 2 / 4.0))


@pytest.mark.parametrize("p1,p2", [(2, 2), (1, 3), (1.5, 1)])
def test_mixed_norm_against_dense_grid(p1, p2):
    g = Grid2(8.0, 64, 8.0, 64)
    fine = g.refined(4)
    a, b = mixed_norm(_bump(g), p1, p2), mixed_norm(_bump(fine), p1, p2)
    assert abs(a - b) <= 1e-6 * b


@given(c=st.floats(-1e3, 1e3, allow_nan=False).filter(lambda c: c == 0 or abs(c) > 1e-100),
       seed=st.integers(0, 2 ** 16))
def test_mixed_norm_homogeneous(c, seed):
    g = GRIDS[1]
    f = smooth_random(g, seed)
    for p1, p2 in [(2, 2), (1, math.inf), (3, 1.5)]:
        lhs = mixed_norm(f * c, p1, p2)
        rhs = abs(c) * mixed_norm(f, p1, p2)
        assert abs(lhs - rhs) <= 1e-13 * max(rhs, 1e-300)


def test_dx2_order_zero_identity():
    g = GRIDS[1]
    fh = to_semispectral(smooth_random(g, 2))
    assert np.array_equal(dx2_multiplier(fh, 0).values, fh.values)


def test_dx2_sine_derivative():
    g = GRIDS[1]
    k0 = 4
    xi = g.xi2[k0]
    f = ScalarField(g, np.tile(np.sin(xi * g.x2), (g.N1, 1)))
    d = to_physical(dx2_multiplier(to_semispectral(f), 1))
    assert np.max(np.abs(d.values - xi * np.cos(xi * g.x2))) <= 1e-10


@given(seed=st.integers(0, 2 ** 16), a=st.integers(0, 3), b=st.integers(0, 3))
def test_dx2_composition(seed, a, b):
    g = GRIDS[1]
    fh = to_semispectral(smooth_random(g, seed))
    two = dx2_multiplier(dx2_multiplier(fh, a), b).values
    one = dx2_multiplier(fh, a + b).values
    assert np.max(np.abs(two - one)) <= 1e-13 * max(np.max(np.abs(one)), 1e-300)


def test_dx2_rejects_bad_order():
    fh = SemiSpectralField.zeros(GRIDS[0])
    with pytest.raises(ValueError):
        dx2_multiplier(fh, -1)
    with pytest.raises(ValueError):
        dx2_multiplier(fh, 1.5)


def test_dealiased_product_exact_for_resolved_pair():
    # product of modes k1, k2 with k1 + k2 < N2/2 is captured exactly
    g = GRIDS[1]
    a, b = g.xi2[3], g.xi2[7]
    f = ScalarField(g, np.tile(np.cos(a * g.x2), (g.N1, 1)))
    h = ScalarField(g, np.tile(np.sin(b * g.x2), (g.N1, 1)))
    p = to_physical(dealiased_product(to_semispectral(f), to_semispectral(h)))
    assert np.max(np.abs(p.values - f.values * h.values)) <= 1e-13


def test_dealiasing_drops_aliased_mode():
    # cos^2 at mode 6 of 16 puts energy at mode 12, which would fold onto mode 4
    g = Grid2(4.0, 8, math.pi, 16)
    f = ScalarField(g, np.tile(np.cos(g.xi2[6] * g.x2), (g.N1, 1)))
    naive = to_semispectral(ScalarField(g, f.values ** 2)).values[0]
    p = dealiased_product(to_semispectral(f), to_semispectral(f)).values[0]
    assert abs(naive[4]) > 0.1 * abs(naive[0])
    assert abs(p[4]) <= 1e-12 * abs(p[0])
    assert abs(p[0] - naive[0]) <= 1e-12 * abs(naive[0])


def test_remove_mean_and_boundary_mass():
    g = GRIDS[1]
    vals = np.exp(-g.x1[:, None] ** 2) * (1.0 + np.cos(g.xi2[2] * g.x2)[None, :])
    f, discarded = remove_x2_mean(ScalarField(g, vals))
    assert np.max(np.abs(f.values.mean(axis=1))) <= 1e-15
    assert discarded > 0
    assert boundary_mass(f) <= 1e-10
    assert boundary_mass(ScalarField(g, np.ones(g.shape))) == 1.0


def test_field_algebra():
    g = GRIDS[0]
    u = VectorField(smooth_random(g, 1), smooth_random(g, 2))
    assert np.all((u - u).u1.values == 0)
    F = TensorForcing.outer(u, u)
    assert np.allclose(F.F12.values, F.F21.values, atol=1e-14)
    with pytest.raises(ValueError):
        u.u1 + ScalarField.zeros(GRIDS[1])
