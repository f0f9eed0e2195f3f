"""Field dumps and CSV output.

A field dump is an ASCII header of ``key = value`` lines closed by
``end_header``, followed by the raw little-endian float64 payload in C order
with shape (components, N1, N2).
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .spectral import Grid2, ScalarField, TensorForcing, VectorField

END = "end_header"
KIND_COMPONENTS = {"scalar": 1, "vector": 2, "tensor": 4}


def fmt(x) -> str:
    """Round-trip formatting, stable across runs."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_field(path, f, provenance: Mapping[str, str] | None = None) -> Path:
    if isinstance(f, ScalarField):
        kind, comps = "scalar", (f,)
    elif isinstance(f, VectorField):
        kind, comps = "vector", f.components
    elif isinstance(f, TensorForcing):
        kind, comps = "tensor", f.components
    else:
        raise TypeError(f"cannot dump {type(f).__name__}")
    g = comps[0].grid
    header = {"kind": kind, "components": len(comps), "N1": g.N1, "N2": g.N2,
              "L1": fmt(g.L1), "L2": fmt(g.L2), "complex": "false", "dtype": "<f8"}
    header.update(provenance or {})
    text = "".join(f"{k} = {v}\n" for k, v in header.items()) + END + "\n"
    payload = np.stack([c.values for c in comps]).astype("<f8").tobytes(order="C")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(text.encode("ascii"))
        fh.write(payload)
    return path


def read_header(path) -> tuple[dict[str, str], int]:
    with open(path, "rb") as fh:
        raw = fh.read()
    marker = (END + "\n").encode()
    pos = raw.find(marker)
    if pos < 0:
        raise ValueError(f"{path}: missing '{END}' line")
    header = {}
    for n, line in enumerate(raw[:pos].decode("ascii").splitlines(), 1):
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{n}: expected 'key = value', got {line!r}")
        header[key.strip()] = value.strip()
    return header, pos + len(marker)


def read_field(path, grid: Grid2 | None = None, expect: str | None = None):
    header, offset = read_header(path)
    kind = header.get("kind")
    if kind not in KIND_COMPONENTS:
        raise ValueError(f"{path}: unknown field kind {kind!r}")
    if expect is not None and kind != expect:
        raise ValueError(f"{path}: expected a {expect} field, found {kind}")
    n1, n2 = int(header["N1"]), int(header["N2"])
    file_grid = Grid2(float(header["L1"]), n1, float(header["L2"]), n2)
    if grid is not None and (grid.N1, grid.N2) != (n1, n2):
        raise ValueError(f"{path}: shape mismatch, expected (N1, N2) = ({grid.N1}, {grid.N2}), "
                         f"found ({n1}, {n2})")
    if grid is not None and (grid.L1, grid.L2) != (file_grid.L1, file_grid.L2):
        raise ValueError(f"{path}: box mismatch, expected (L1, L2) = ({grid.L1}, {grid.L2}), "
                         f"found ({file_grid.L1}, {file_grid.L2})")
    ncomp = KIND_COMPONENTS[kind]
    with open(path, "rb") as fh:
        fh.seek(offset)
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != ncomp * n1 * n2:
        raise ValueError(f"{path}: payload has {data.size} values, expected {ncomp * n1 * n2}")
    arrs = data.reshape(ncomp, n1, n2).astype(float)
    comps = [ScalarField(file_grid, a.copy()) for a in arrs]
    if kind == "scalar":
        return comps[0]
    return VectorField(*comps) if kind == "vector" else TensorForcing(*comps)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence],
              provenance: Mapping[str, str] | None = None) -> Path:
    """Comma-separated, LF endings, provenance as leading '#' lines."""
    buf = _io.StringIO()
    for k, v in (provenance or {}).items():
        buf.write(f"# {k} = {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    path = Path(path)
    path.write_bytes(buf.getvalue().encode("utf-8"))
    return path


def read_csv(path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """(provenance, rows) from a file written by :func:`write_csv`."""
    prov, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition("=")
            prov[k.strip()] = v.strip()
        else:
            lines.append(line)
    return prov, list(csv.DictReader(lines))
