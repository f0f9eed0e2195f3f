"""Command-line front end: ``oseenlab {solve,linear,norms,verify,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 admissibility error (including
a failed smallness gate), 4 solver diverged.
"""

from __future__ import annotations

import argparse
import logging
import math
from pathlib import Path
import sys

from . import __version__
from .besov import (HybridContext, band_table, data_norm_from_table, dyadic_rescale,
                    solution_norm_from_table)
from .config import ConfigError, RunConfig, build, parse_file
from .estimates import (EnsembleSpec, estimate_C0, verify_lemma41, verify_lemma42,
                        verify_lemma42_remark, verify_lemma43)
from .fixed_point import check_smallness, picard_solve
from .forcing import AdmissibilityError, generate_forcing
from .io import read_csv, write_csv, write_field
from .kernels import assemble_D, interior_relative_error, oseen_oracle
from .littlewood_paley import DEFAULT_PROFILE, classify

EXIT_OK, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_DIVERGED = 0, 2, 3, 4
log = logging.getLogger("oseenlab")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def provenance(cfg: RunConfig, grid=None, alpha=None) -> dict:
    g = grid or cfg.grid
    return {"config_hash": cfg.hash, "profile": DEFAULT_PROFILE.identifier,
            "grid": f"L1={g.L1!r},N1={g.N1},L2={g.L2!r},N2={g.N2}",
            "alpha": repr(float(cfg.alpha if alpha is None else alpha)),
            "version": __version__}


def read_gate(path) -> float:
    try:
        _, rows = read_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read gate file: {exc}", EXIT_CONFIG) from None
    for row in rows:
        if row.get("estimate") == "C0":
            return float(row["value"])
    raise CliError(f"{path}: no 'C0' row in constant report", EXIT_CONFIG)


def make_forcing(cfg: RunConfig):
    try:
        return generate_forcing(cfg.forcing, cfg.grid)
    except AdmissibilityError as exc:
        raise CliError(f"admissibility: {exc}", EXIT_ADMISSIBILITY) from None
    except (ValueError, OSError) as exc:
        raise CliError(f"forcing: {exc}", EXIT_CONFIG) from None


# ------------------------------------------------------------------ commands

def cmd_solve(cfg: RunConfig, out: Path, F=None, grid=None, alpha=None) -> dict:
    F = make_forcing(cfg) if F is None else F
    alpha = cfg.alpha if alpha is None else alpha
    solver = cfg.solver if alpha == cfg.solver.alpha else _with_alpha(cfg.solver, alpha)
    prov = provenance(cfg, F.grid, alpha)
    frac = cfg.values.get("forcing.scale_to_gate")
    if frac is not None:
        if solver.C0_estimate is None:
            raise CliError("forcing.scale_to_gate needs a C0 (solver.C0 or --gate)", EXIT_CONFIG)
        dn = solver.d_norm(F)
        if dn > 0:
            F = F * (frac / (8.0 * solver.C0_estimate ** 2) / dn)
    gate = None
    if solver.C0_estimate is not None:
        gate = check_smallness(F, solver)
        write_csv(out / "gate.csv", ["data_norm", "threshold", "margin", "passed"],
                  [[gate.data_norm, gate.threshold, gate.margin, gate.passed]], prov)
        if not gate.passed:
            raise CliError(f"smallness gate failed: ||F||_D = {gate.data_norm:.6e} > "
                           f"1/(8 C0^2) = {gate.threshold:.6e}", EXIT_ADMISSIBILITY)
    u, rep = picard_solve(F, solver)
    write_csv(out / "iterations.csv", ["n", "s_norm", "diff", "ratio", "residual"],
              [[r.n, r.s_norm, r.diff, r.ratio, r.residual] for r in rep.rows], prov)
    write_field(out / "forcing.field", F, prov)
    summary = {"status": rep.status, "iterations": rep.iterations,
               "d_norm": solver.d_norm(F), "s_norm": math.nan,
               "residual": rep.final_residual, "discrepancy": rep.discrepancy}
    if u is not None:
        write_field(out / "u.field", u, prov)
        summary["s_norm"] = solver.s_norm(u)
    write_csv(out / "summary.csv", list(summary), [list(summary.values())], prov)
    log.info("solve: %s after %d iterations, residual %.3e", rep.status, rep.iterations,
             rep.final_residual)
    if u is None:
        raise CliError(f"solver diverged after {rep.iterations} iterations", EXIT_DIVERGED)
    return summary


def _with_alpha(solver, alpha):
    from dataclasses import replace
    return replace(solver, alpha=alpha)


def cmd_linear(cfg: RunConfig, out: Path, F=None, grid=None, alpha=None) -> dict:
    F = make_forcing(cfg) if F is None else F
    alpha = cfg.alpha if alpha is None else alpha
    solver = _with_alpha(cfg.solver, alpha)
    prov = provenance(cfg, F.grid, alpha)
    u = assemble_D(F, solver.oseen)
    ref = oseen_oracle(F, solver.oseen)
    err = interior_relative_error(u, ref)
    write_field(out / "u_linear.field", u, prov)
    write_csv(out / "oracle_agreement.csv", ["component", "interior_rel_error"],
              [["u1", interior_relative_error(_single(u, 0), _single(ref, 0))],
               ["u2", interior_relative_error(_single(u, 1), _single(ref, 1))],
               ["both", err]], prov)
    summary = {"status": "ok", "d_norm": solver.d_norm(F), "s_norm": solver.s_norm(u),
               "oracle_error": err}
    write_csv(out / "summary.csv", list(summary), [list(summary.values())], prov)
    log.info("linear: interior oracle error %.3e", err)
    return summary


def _single(u, k):
    from .spectral import ScalarField, VectorField
    c = u.components[k]
    return VectorField(c, ScalarField.zeros(c.grid))


def cmd_norms(cfg: RunConfig, out: Path, F=None, grid=None, alpha=None) -> dict:
    F = make_forcing(cfg) if F is None else F
    alpha = cfg.alpha if alpha is None else alpha
    tp = cfg.tp
    prov = provenance(cfg, F.grid, alpha)
    t = band_table(F, tp.p1, tp.p2)
    rows = []
    for j, v in zip(t.js, t.values):
        part = classify(int(j), alpha)
        s = tp.s_data_high if part == "high" else tp.s_data_low
        rows.append([int(j), part, v, 2.0 ** (s * int(j)) * v])
    write_csv(out / "band_table.csv", ["j", "part", "band_norm", "weighted"], rows, prov)
    summary = {"status": "ok", "d_norm": data_norm_from_table(t, tp, alpha)}
    write_csv(out / "summary.csv", list(summary), [list(summary.values())], prov)
    log.info("norms: ||F||_D = %.6e", summary["d_norm"])
    return summary


def cmd_verify(cfg: RunConfig, out: Path, F=None, grid=None, alpha=None) -> dict:
    v = cfg.values
    prov = provenance(cfg)
    try:
        ens = EnsembleSpec(v["verify.seed"], v["verify.count"], tuple(v["verify.bands"]),
                           v["verify.width"], grid or cfg.grid)
    except ValueError as exc:
        raise CliError(f"verify ensemble: {exc}", EXIT_CONFIG) from None
    alphas = v["verify.alphas"] if alpha is None else (alpha,)
    reports, c0 = [], None
    for name in v["verify.estimates"]:
        try:
            if name == "lemma41":
                reports.extend(verify_lemma41(ens, alphas, v["verify.Ts"], v["verify.p"]))
            elif name == "lemma42":
                reports.append(verify_lemma42(ens, alphas, cfg.tp, v["verify.p3"]))
            elif name == "lemma42-remark":
                reports.append(verify_lemma42_remark(ens, alphas, cfg.tp))
            elif name == "lemma43":
                reports.append(verify_lemma43(ens, alphas, cfg.tp))
            elif name == "C0":
                c0 = estimate_C0(ens, alphas, cfg.tp)
                reports.extend([c0.linear, c0.bilinear])
            else:
                raise CliError(f"unknown estimate {name!r}", EXIT_CONFIG)
        except ValueError as exc:
            raise CliError(f"verify {name}: {exc}", EXIT_CONFIG) from None
    rows = [[r.identifier, r.sup_ratio, len(r.ratios), r.skipped] for r in reports]
    if c0 is not None:
        rows.append(["C0", c0.value, len(c0.linear.ratios) + len(c0.bilinear.ratios), 0])
    write_csv(out / "constants.csv", ["estimate", "value", "samples", "skipped"], rows, prov)
    write_csv(out / "ratios.csv", ["estimate", "label", "ratio"],
              [[d["estimate"], d["label"], d["ratio"]] for r in reports for d in r.rows()],
              prov)
    summary = {"status": "ok", "reports": len(reports),
               "C0": c0.value if c0 is not None else math.nan}
    log.info("verify: %d reports%s", len(reports),
             f", C0 = {c0.value:.6e}" if c0 is not None else "")
    return summary


COMMANDS = {"solve": cmd_solve, "linear": cmd_linear, "norms": cmd_norms,
            "verify": cmd_verify}


def _dyadic_factor(alpha: float, base: float) -> float:
    lam = alpha / base
    m, _ = math.frexp(lam)
    if m != 0.5:
        raise CliError(f"sweep alpha {alpha!r} is not a power-of-two multiple of "
                       f"alpha = {base!r}; dyadic rescaling impossible", EXIT_CONFIG)
    return lam


def cmd_sweep(cfg: RunConfig, out: Path) -> dict:
    v = cfg.values
    target = v["sweep.target"]
    if target not in COMMANDS:
        raise CliError(f"sweep.target must be one of {sorted(COMMANDS)}", EXIT_CONFIG)
    base_F = make_forcing(cfg) if target != "verify" else None
    rows = []
    keys = ["cell", "alpha", "lambda", "L1", "L2", "status", "d_norm", "s_norm"]
    for n, alpha in enumerate(v["sweep.alphas"]):
        cell = out / f"cell_{n:03d}"
        cell.mkdir(parents=True, exist_ok=True)
        F, grid, lam = base_F, cfg.grid, 1.0
        if v["sweep.rescale"]:
            lam = _dyadic_factor(alpha, cfg.alpha)
            if F is not None:
                F = dyadic_rescale(F, lam, 2)
                grid = F.grid
        try:
            res = COMMANDS[target](cfg, cell, F=F, grid=grid, alpha=alpha)
        except CliError as exc:
            if exc.code == EXIT_CONFIG:
                raise
            res = {"status": f"error:{exc.code}"}
        rows.append([n, alpha, lam, grid.L1, grid.L2, res.get("status", "ok"),
                     res.get("d_norm", math.nan), res.get("s_norm", math.nan)])
    write_csv(out / "summary.csv", keys, rows, provenance(cfg))
    return {"status": "ok", "cells": len(rows)}


# ------------------------------------------------------------------ entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oseenlab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "linear", "norms", "verify", "sweep"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, help="flat key = value config file")
        s.add_argument("--out", help="output directory (overrides output.dir)")
        s.add_argument("--seed", type=int, help="forcing seed (overrides forcing.seed)")
        s.add_argument("--gate", help="constants.csv from 'verify' providing C0")
        s.add_argument("--quiet", action="store_true")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        values = parse_file(args.config)
        if args.seed is not None:
            values["forcing.seed"] = args.seed
        if args.out is not None:
            values["output.dir"] = args.out
        if args.gate is not None:
            values["solver.C0"] = read_gate(args.gate)
        cfg = build(values, args.config)
        out = cfg.out
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "sweep":
            cmd_sweep(cfg, out)
        else:
            COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
