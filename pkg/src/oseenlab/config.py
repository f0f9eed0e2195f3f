"""Flat ``section.key = value`` run configuration.

Blank lines and ``#`` comments are ignored.  Every key must appear in
:data:`SCHEMA`; errors carry the offending line number.  Real numbers may be
written as multiples of pi (``4pi``, ``pi``, ``0.5pi``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import hashlib
import math
from pathlib import Path

from .besov import ThmParams
from .fixed_point import SolverConfig
from .forcing import ForcingSpec
from .spectral import Grid2


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def _real(text: str) -> float:
    t = text.strip().lower()
    if t.endswith("pi"):
        head = t[:-2].strip().rstrip("*").strip()
        return (float(head) if head else 1.0) * math.pi
    return float(t)


def _int(text: str) -> int:
    return int(text.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def _reals(text: str) -> tuple[float, ...]:
    return tuple(_real(p) for p in text.split(",") if p.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(_int(p) for p in text.split(",") if p.strip())


def _strs(text: str) -> tuple[str, ...]:
    return tuple(p.strip() for p in text.split(",") if p.strip())


def _opt_real(text: str):
    return None if text.strip().lower() in ("", "none") else _real(text)


# key -> (parser, default)
SCHEMA = {
    "grid.L1": (_real, 16.0),
    "grid.N1": (_int, 256),
    "grid.L2": (_real, 4 * math.pi),
    "grid.N2": (_int, 128),
    "alpha": (_real, 1.0),
    "thm.p1": (_real, 2.0),
    "thm.p2": (_real, 2.0),
    "thm.q": (_real, 1.0),
    "thm.strict": (_bool, True),
    "solver.tol": (_real, 1e-10),
    "solver.max_iter": (_int, 200),
    "solver.init": (str.strip, "zero"),
    "solver.quadrature": (str.strip, "quintic"),
    "solver.C0": (_opt_real, None),
    "forcing.kind": (str.strip, "gaussian-tensor"),
    "forcing.amplitude": (_real, 1.0),
    "forcing.center": (_reals, (0.0, 0.0)),
    "forcing.width": (_real, 1.0),
    "forcing.components": (_reals, (1.0, 0.5, 0.25, -1.0)),
    "forcing.bands": (_ints, (0, 2)),
    "forcing.seed": (_int, 0),
    "forcing.path": (str.strip, ""),
    "forcing.scale_to_gate": (_opt_real, None),
    "output.dir": (str.strip, "out"),
    "verify.estimates": (_strs, ("lemma41", "lemma42", "lemma42-remark", "lemma43", "C0")),
    "verify.count": (_int, 16),
    "verify.seed": (_int, 42),
    "verify.bands": (_ints, (0, 2)),
    "verify.width": (_real, 1.5),
    "verify.alphas": (_reals, (0.5, 1.0, 2.0, 4.0)),
    "verify.Ts": (_reals, (0.0, 0.5, 2.0)),
    "verify.p": (_real, 2.0),
    "verify.p3": (_opt_real, None),
    "sweep.target": (str.strip, "norms"),
    "sweep.alphas": (_reals, (0.5, 1.0, 2.0, 4.0)),
    "sweep.rescale": (_bool, True),
}


def parse_text(text: str, source: str = "<config>") -> dict:
    """Parse into a dict of all schema keys (defaults filled in)."""
    values = {k: d for k, (_, d) in SCHEMA.items()}
    seen: dict[str, int] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", n, source)
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}", n, source)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", n, source)
        seen[key] = n
        parser = SCHEMA[key][0]
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {exc}", n, source) from None
    values["_lines"] = seen
    return values


def parse_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", None, str(path)) from None
    return parse_text(text, str(path))


def canonical(values: dict, exclude=("output.dir",)) -> str:
    """Sorted ``key = value`` text of the effective configuration."""
    from .io import fmt
    lines = []
    for k in sorted(SCHEMA):
        if k in exclude:
            continue
        v = values[k]
        if isinstance(v, tuple):
            v = ",".join(fmt(x) for x in v)
        lines.append(f"{k} = {fmt(v) if v is not None else 'none'}")
    return "\n".join(lines) + "\n"


def config_hash(values: dict) -> str:
    return hashlib.sha256(canonical(values).encode()).hexdigest()[:16]


@dataclass
class RunConfig:
    grid: Grid2
    alpha: float
    tp: ThmParams
    solver: SolverConfig
    forcing: ForcingSpec
    out: Path
    values: dict = field(repr=False, default_factory=dict)

    @property
    def hash(self) -> str:
        return config_hash(self.values)


def _guard(values: dict, keys: tuple[str, ...], source: str, fn):
    lines = values.get("_lines", {})
    try:
        return fn()
    except ValueError as exc:
        line = min((lines[k] for k in keys if k in lines), default=None)
        raise ConfigError(str(exc), line, source) from None


def build(values: dict, source: str = "<config>") -> RunConfig:
    v = values
    grid = _guard(v, ("grid.L1", "grid.N1", "grid.L2", "grid.N2"), source,
                  lambda: Grid2(v["grid.L1"], v["grid.N1"], v["grid.L2"], v["grid.N2"]))
    tp = _guard(v, ("thm.p1", "thm.p2", "thm.q", "thm.strict"), source,
                lambda: ThmParams(v["thm.p1"], v["thm.p2"], v["thm.q"], v["thm.strict"]))
    solver = _guard(v, ("alpha", "solver.tol", "solver.max_iter", "solver.init",
                        "solver.quadrature", "solver.C0"), source,
                    lambda: SolverConfig(v["alpha"], tp, v["solver.tol"], v["solver.max_iter"],
                                         v["solver.C0"], v["solver.init"],
                                         v["solver.quadrature"]))
    _guard(v, ("solver.quadrature",), source, lambda: solver.oseen)

    def forcing():
        center = v["forcing.center"]
        comps = v["forcing.components"]
        bands = v["forcing.bands"]
        if len(center) != 2:
            raise ValueError("forcing.center needs two values")
        if len(comps) != 4:
            raise ValueError("forcing.components needs four values (F11, F12, F21, F22)")
        if len(bands) != 2:
            raise ValueError("forcing.bands needs two values (jlo, jhi)")
        return ForcingSpec(v["forcing.kind"], v["forcing.amplitude"], center, v["forcing.width"],
                           comps, bands, v["forcing.seed"], v["forcing.path"] or None)
    spec = _guard(v, tuple(k for k in SCHEMA if k.startswith("forcing.")), source, forcing)
    return RunConfig(grid, v["alpha"], tp, solver, spec, Path(v["output.dir"]), values)


def load(path, overrides: dict | None = None) -> RunConfig:
    values = parse_file(path)
    values.update(overrides or {})
    return build(values, str(path))
