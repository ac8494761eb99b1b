"""CSV and JSON serialization.

Conventions: comma separator, '.' decimal, LF rows, UTF-8, floats written
with repr-faithful precision so reruns are byte-identical. Sample files
carry a header row; matrix files may omit it.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InvalidInputError
from .husler_reiss import GaussianProfileLaw
from .max_link import DEFAULT_TAIL_TOL, TabulatedCDF, TabulatedDensity

FLOAT_FMT = "%.17g"


def _fmt_row(row) -> str:
    return ",".join(FLOAT_FMT % v for v in row)


def write_matrix_csv(path, matrix, header: list[str] | None = None) -> None:
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    lines = []
    if header is not None:
        lines.append(",".join(header))
    lines.extend(_fmt_row(row) for row in matrix)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _is_numeric_row(tokens: list[str]) -> bool:
    try:
        for tok in tokens:
            float(tok)
    except ValueError:
        return False
    return True


def read_matrix_csv(path) -> np.ndarray:
    """Read a numeric CSV matrix; a leading non-numeric row is treated as a header."""
    text = Path(path).read_text(encoding="utf-8")
    rows = [line.split(",") for line in text.splitlines() if line.strip()]
    if not rows:
        raise InvalidInputError(f"{path}: empty CSV")
    if not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise InvalidInputError(f"{path}: no numeric rows")
    try:
        return np.array([[float(tok) for tok in row] for row in rows])
    except ValueError as err:
        raise InvalidInputError(f"{path}: non-numeric entry ({err})") from err


def write_samples_csv(path, samples, names: list[str] | None = None, kind: str | None = None) -> None:
    """Write draws, one row each, with a header; optionally a trailing kind column."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    d = samples.shape[1]
    names = names or [f"x{j + 1}" for j in range(d)]
    if len(names) != d:
        raise InvalidInputError(f"{len(names)} column names for {d} columns")
    header = ",".join(names) + (",kind" if kind else "")
    lines = [header]
    suffix = f",{kind}" if kind else ""
    lines.extend(_fmt_row(row) + suffix for row in samples)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_samples_csv(path) -> tuple[np.ndarray, list[str]]:
    """Read a sample CSV (header required); drops a trailing 'kind' column."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise InvalidInputError(f"{path}: need a header row and at least one data row")
    names = lines[0].split(",")
    if _is_numeric_row(names):
        raise InvalidInputError(f"{path}: header row required on sample inputs")
    keep = len(names) - 1 if names[-1].strip().lower() == "kind" else len(names)
    data = []
    for line in lines[1:]:
        toks = line.split(",")[:keep]
        try:
            data.append([float(tok) for tok in toks])
        except ValueError as err:
            raise InvalidInputError(f"{path}: non-numeric entry ({err})") from err
    return np.array(data), [n.strip() for n in names[:keep]]


def dump_json(obj, path) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def load_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _sidecar_path(path) -> Path:
    p = Path(path)
    return p.with_suffix(p.suffix + ".meta.json")


def write_tabulated_cdf(path, cdf: TabulatedCDF) -> None:
    """Two-column (s, value) CSV plus a JSON sidecar with grid metadata."""
    write_matrix_csv(path, np.column_stack([cdf.grid, cdf.values]), header=["s", "value"])
    dump_json(
        {"grid_step": cdf.step, "tail_mass_tol": cdf.tail_mass_tol},
        _sidecar_path(path),
    )


def read_tabulated_cdf(path) -> TabulatedCDF:
    table = read_matrix_csv(path)
    if table.ndim != 2 or table.shape[1] != 2:
        raise InvalidInputError(f"{path}: expected two columns (s, value)")
    tail_tol = DEFAULT_TAIL_TOL
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        tail_tol = float(load_json(sidecar).get("tail_mass_tol", DEFAULT_TAIL_TOL))
    return TabulatedCDF(grid=table[:, 0], values=table[:, 1], tail_mass_tol=tail_tol)


def write_tabulated_density(path, density: TabulatedDensity) -> None:
    write_matrix_csv(path, np.column_stack([density.grid, density.values]), header=["s", "value"])
    dump_json(
        {"grid_step": float(density.grid[1] - density.grid[0]), "norm_tol": density.norm_tol},
        _sidecar_path(path),
    )


def read_tabulated_density(path) -> TabulatedDensity:
    table = read_matrix_csv(path)
    if table.ndim != 2 or table.shape[1] != 2:
        raise InvalidInputError(f"{path}: expected two columns (s, value)")
    norm_tol = 1e-3
    sidecar = _sidecar_path(path)
    if sidecar.exists():
        norm_tol = float(load_json(sidecar).get("norm_tol", norm_tol))
    return TabulatedDensity(grid=table[:, 0], values=table[:, 1], norm_tol=norm_tol)


def write_law_json(path, law: GaussianProfileLaw) -> None:
    dump_json(law.to_dict(), path)


def read_law_json(path) -> GaussianProfileLaw:
    return GaussianProfileLaw.from_dict(load_json(path))
