"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` (the lines are also
shown without ``-s``, they bypass capture).
"""

import math
import time

import numpy as np
import pytest

from conftest import band_tensor
from oseenlab.besov import HybridContext, ThmParams, data_norm_D, dyadic_rescale, solution_norm_S
from oseenlab.cli import run
from oseenlab.estimates import (EnsembleSpec, bony_decompose, estimate_C0, product,
                                verify_corollary, verify_lemma41, verify_lemma42,
                                verify_lemma42_remark, verify_lemma43)
from oseenlab.fixed_point import SolverConfig, lipschitz_probe, picard_solve, uniqueness_probe
from oseenlab.kernels import (KERNEL_OPS, OseenConfig, assemble_D, eigen_arrays,
                              interior_relative_error, ode_residual, oseen_oracle)
from oseenlab.littlewood_paley import almost_orthogonality_check, band_range, band_symbol
from oseenlab.spectral import (Grid2, SemiSpectralField, TensorForcing, VectorField,
                               band_limited_noise, to_semispectral)

ALPHAS = (0.5, 1.0, 2.0, 4.0)
GRID = Grid2(16.0, 256, 4 * math.pi, 128)


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def C0():
    return estimate_C0(EnsembleSpec(seed=42, count=64), ALPHAS, ThmParams()).value


def gated_forcing(seed, C0, fraction, alpha=1.0):
    F = EnsembleSpec(seed=seed, count=1, grid=GRID).tensor(0)
    cfg = SolverConfig(alpha, C0_estimate=C0)
    return F * (fraction / (8 * C0 ** 2) / cfg.d_norm(F))


# ---------------------------------------------------------------------------- 1

def test_criterion_1_linear_oracle(capsys):
    g = Grid2(16.0, 512, 4 * math.pi, 512)
    t0 = time.perf_counter()
    errs = []
    for seed in range(20):
        alpha = ALPHAS[seed % 4]
        F = band_tensor(g, seed)
        errs.append(interior_relative_error(assemble_D(F, OseenConfig(alpha)),
                                            oseen_oracle(F, OseenConfig(alpha))))
    elapsed = time.perf_counter() - t0
    ok = max(errs) <= 1e-6 and elapsed <= 60
    report(capsys, 1, ok, f"max interior error {max(errs):.2e} (<= 1e-6), {elapsed:.1f} s (<= 60)")


# ---------------------------------------------------------------------------- 2

def test_criterion_2_ode_residuals(capsys):
    def modes(n1):
        g = Grid2(16.0, n1, math.pi / 2, 8)
        x = g.x1[:, None]
        vals = np.broadcast_to(np.exp(-0.5 * x * x) * (1 + 0.3 * x), g.shape).astype(complex)
        vals = vals.copy()
        vals[:, 0] = vals[:, g.N2 // 2] = 0
        return SemiSpectralField(g, vals)

    parts, ok = [], True
    for kind in sorted(KERNEL_OPS):
        r1 = ode_residual(kind, modes(512), OseenConfig(1.0))
        r2 = ode_residual(kind, modes(1024), OseenConfig(1.0))
        ok &= r1 <= 1e-6 and r1 / r2 >= 4
        parts.append(f"{kind} {r1:.1e} (x{r1 / r2:.0f})")
    report(capsys, 2, ok, "residual (refinement gain): " + ", ".join(parts))


# ---------------------------------------------------------------------------- 3

def test_criterion_3_partition_and_algebra(capsys):
    pou, orth = 0.0, 0.0
    for g in (Grid2(8.0, 16, math.pi, 64), Grid2(8.0, 16, 4 * math.pi, 256),
              Grid2(8.0, 16, 3.0, 128)):
        br = band_range(g)
        total = sum(band_symbol(g, j) for j in br)
        nz = g.xi2 != 0
        pou = max(pou, float(np.max(np.abs(total[nz] - 1))))
        fh = to_semispectral(band_limited_noise(g, 1e-9, g.xi2.max(),
                                                np.random.default_rng(0), 1.0))
        for j in br:
            for k in br:
                if abs(j - k) >= 2:
                    orth = max(orth, almost_orthogonality_check(fh, j, k))
    a = np.logspace(-3, 3, 40)
    x = np.logspace(-4, 4, 25)
    lm, lp = (np.array([eigen_arrays(al, x)[i] for al in a]) for i in (0, 1))
    A, X = np.meshgrid(a, x, indexing="ij")
    eps = np.finfo(float).eps
    s_err = np.max(np.abs(lm + lp - A) / (np.abs(lm) + np.abs(lp))) / eps
    p_err = np.max(np.abs(lm * lp + X * X) / (X * X)) / eps
    ok = pou <= 1e-12 and orth <= 1e-12 and s_err <= 4 and p_err <= 4 and lm.size == 1000
    report(capsys, 3, ok, f"partition {pou:.1e}, far-band product {orth:.1e}, eigen sum/product "
                          f"{s_err:.1f}/{p_err:.1f} eps over {lm.size} points")


# ---------------------------------------------------------------------------- 4

def test_criterion_4_scaling(capsys):
    tp = ThmParams()
    worst = 0.0
    for seed in range(10):
        ens = EnsembleSpec(seed=seed, count=1, grid=GRID)
        F, u = ens.tensor(0), ens.vector(0, 1)
        for alpha in (1.0, 3.0):
            d0 = data_norm_D(F, tp, HybridContext(alpha))
            s0 = solution_norm_S(u, tp, HybridContext(alpha))
            for lam in (0.25, 0.5, 2.0, 4.0):
                d = data_norm_D(dyadic_rescale(F, lam, 2), tp, HybridContext(lam * alpha))
                s = solution_norm_S(dyadic_rescale(u, lam, 1), tp, HybridContext(lam * alpha))
                worst = max(worst, abs(d - d0) / d0, abs(s - s0) / s0)
    report(capsys, 4, worst <= 1e-12, f"max relative change {worst:.1e} (<= 1e-12)")


# ---------------------------------------------------------------------------- 5

def test_criterion_5_contraction(capsys, C0):
    cfg = SolverConfig(1.0, C0_estimate=C0)
    worst_ratio, worst_disc, ball, conv = 0.0, 0.0, True, True
    for n, frac in enumerate(np.linspace(0.1, 1.0, 10)):
        F = gated_forcing(100 + n, C0, frac)
        u, rep = picard_solve(F, cfg, gate=True)
        conv &= rep.gate.passed and rep.status == "converged"
        worst_ratio = max(worst_ratio, rep.max_ratio(2))
        worst_disc = max(worst_disc, rep.discrepancy)
        ball &= rep.ball_ok
    ok = conv and worst_ratio <= 0.5 and worst_disc <= 10 * cfg.tol and ball
    report(capsys, 5, ok, f"C0 = {C0:.4f}, all converged {conv}, max r_n {worst_ratio:.1e}, "
                          f"max discrepancy {worst_disc:.1e}, ball confinement {ball}")


# ---------------------------------------------------------------------------- 6

def test_criterion_6_uniqueness(capsys, C0):
    cfg = SolverConfig(1.0, C0_estimate=C0)
    F = gated_forcing(200, C0, 0.5)
    probe = uniqueness_probe(F, cfg, trials=8, seed=7)
    ok = probe.ok and len(probe.distances) == 8
    report(capsys, 6, ok, f"8 starts in radius {probe.radius:.3f}, max distance "
                          f"{max(probe.distances):.1e} (<= {probe.tolerance:.0e})")


# ---------------------------------------------------------------------------- 7

def test_criterion_7_lipschitz(capsys, C0):
    cfg = SolverConfig(1.0, C0_estimate=C0)
    spreads = []
    for seed in range(5):
        F = gated_forcing(300 + seed, C0, 0.5)
        H = gated_forcing(400 + seed, C0, 0.5)
        rs = []
        for d in (1e-2, 5e-3):
            r = lipschitz_probe(F, F + H * d, cfg)
            assert r.status == "ok", r.status
            rs.append(r.ratio)
        spreads.append(max(rs) / min(rs))
    ok = max(spreads) < 2
    report(capsys, 7, ok, f"max ratio change under halving {max(spreads):.4f} (< 2) "
                          "over 5 base forcings")


# ---------------------------------------------------------------------------- 8

def test_criterion_8_estimates_lab(capsys):
    tp = ThmParams()
    ens = EnsembleSpec(seed=42, count=4, grid=GRID)

    def sups(e):
        reps = list(verify_lemma41(e, ALPHAS, (0.0, 0.5, 2.0)))
        reps.append(verify_lemma42(e, ALPHAS, tp))
        reps.append(verify_lemma42_remark(e, ALPHAS, tp))
        reps.append(verify_lemma43(e, ALPHAS, tp))
        reps.extend(verify_corollary(e, ALPHAS, tp))
        return {r.identifier: (r.sup_ratio, r.finite) for r in reps}

    coarse, fine = sups(ens), sups(ens.with_grid(GRID.refined(2)))
    moves = {k: max(coarse[k][0], fine[k][0]) / min(coarse[k][0], fine[k][0]) for k in coarse}
    finite = all(v[1] for v in coarse.values()) and all(v[1] for v in fine.values())
    bony = 0.0
    for i in range(4):
        f, g = ens.field(i, 0), ens.field(i, 1)
        p = product(f, g).values
        bony = max(bony, float(np.max(np.abs(sum(x.values for x in bony_decompose(f, g)) - p))
                               / np.max(np.abs(p))))
    rejected = 0
    for p1, p2, q in ((3.0, 2.0, 1.0), (2.0, 4.0, 1.0), (1.5, 2.0, 1.0), (2.2, 3.5, 1.0)):
        try:
            verify_lemma43(ens.with_count(1), (1.0,), ThmParams(p1, p2, q, strict=False))
        except ValueError:
            rejected += 1
    ok = finite and max(moves.values()) < 2 and bony <= 1e-8 and rejected == 4
    report(capsys, 8, ok, f"{len(moves)} sup ratios finite {finite}, max refinement move "
                          f"x{max(moves.values()):.4f} (< 2), Bony {bony:.1e}, "
                          f"{rejected}/4 out-of-window sets rejected")


# ---------------------------------------------------------------------------- 9

def test_criterion_9_determinism(capsys, tmp_path):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("grid.L1 = 16\ngrid.N1 = 128\ngrid.L2 = 4pi\ngrid.N2 = 128\nalpha = 1\n"
                   "solver.C0 = 1.8\nforcing.kind = random-band\nforcing.width = 1.5\n"
                   "forcing.seed = 5\nforcing.scale_to_gate = 0.5\n"
                   "sweep.target = solve\nsweep.alphas = 0.5, 1, 2, 4\n")
    for name in ("a", "b"):
        assert run(["sweep", "--config", str(cfg), "--out", str(tmp_path / name),
                    "--quiet"]) == 0
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*")
                   if p.is_file())
    same = [(tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
            for f in files]
    n_fields = sum(f.suffix == ".field" for f in files)
    n_csv = sum(f.suffix == ".csv" for f in files)
    ok = all(same) and n_fields == 8 and n_csv >= 13
    report(capsys, 9, ok, f"{sum(same)}/{len(files)} files bit-identical "
                          f"({n_csv} CSV, {n_fields} field dumps)")
