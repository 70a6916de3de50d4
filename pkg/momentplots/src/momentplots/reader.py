"""Ingestion of momentflow trajectory CSV files.

The files are the only channel between simulator and renderer: two comment
lines (format tag, config echo), one exact header row, then `%.17g` floats.
Nothing here recomputes physics; a table is columns plus the echoed config.
"""
import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FORMAT_PREFIX = "# momentflow trajectory"
CONFIG_PREFIX = "# config "

SPHERE_COLUMNS = (
    "t", "theta", "p_theta", "phi_unwrapped", "p_phi",
    "g2000", "g1100", "g1010", "g1001", "g0200",
    "g0110", "g0101", "g0020", "g0011", "g0002",
    "dg_theta", "dg_phi", "energy",
)
CIRCLE_COLUMNS = ("t", "theta", "p_theta", "g20", "g11", "g02", "dg_theta", "energy")


class SchemaError(ValueError):
    """Input does not match the trajectory CSV contract; names the column."""

    def __init__(self, column: str, message: str):
        super().__init__(f"schema mismatch: column {column!r} {message}")
        self.column = column


@dataclass(frozen=True)
class TrajectoryTable:
    """Parsed trajectory file: column arrays, echoed config, provenance path."""

    path: str
    mode: str  # "sphere" or "circle", inferred from the header
    config: dict
    data: np.ndarray  # shape (n_samples, n_columns)

    @property
    def columns(self) -> tuple[str, ...]:
        return SPHERE_COLUMNS if self.mode == "sphere" else CIRCLE_COLUMNS

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(name, f"not present in a {self.mode} trajectory file")
        return self.data[:, self.columns.index(name)]

    def hbar(self) -> float:
        """Planck constant from the config echo (1.0 when not echoed)."""
        found = _find_key(self.config, "hbar")
        return 1.0 if found is None else float(found)


def _find_key(obj, key: str):
    if isinstance(obj, dict):
        if key in obj and isinstance(obj[key], (int, float)):
            return obj[key]
        for value in obj.values():
            found = _find_key(value, key)
            if found is not None:
                return found
    return None


def read_trajectory(path: str | Path) -> TrajectoryTable:
    """Parse one trajectory CSV, strictly.

    The header must equal the sphere or circle schema exactly; the first
    deviating column is named in the error.  A file with a valid header but
    no data rows is rejected too: there is nothing to draw.
    """
    text = Path(path).read_text(encoding="ascii")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(FORMAT_PREFIX):
        raise ValueError(f"{path}: not a momentflow trajectory file (missing format line)")
    config: dict = {}
    body = 1
    if len(lines) > 1 and lines[1].startswith(CONFIG_PREFIX):
        config = json.loads(lines[1][len(CONFIG_PREFIX):])
        body = 2
    if len(lines) <= body:
        raise ValueError(f"{path}: missing header row")

    header = tuple(next(csv.reader(io.StringIO(lines[body]))))
    mode = _match_header(header)

    rows = [row for row in csv.reader(io.StringIO("\n".join(lines[body + 1:]))) if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(header)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"{path}: row with {len(row)} fields, expected {width}")
    data = np.array([[float(cell) for cell in row] for row in rows], dtype=float)
    return TrajectoryTable(path=str(path), mode=mode, config=config, data=data)


def _match_header(header: tuple[str, ...]) -> str:
    if header == SPHERE_COLUMNS:
        return "sphere"
    if header == CIRCLE_COLUMNS:
        return "circle"
    # name the first deviation from whichever schema the header is closest to
    sphere_score = sum(a == b for a, b in zip(header, SPHERE_COLUMNS))
    circle_score = sum(a == b for a, b in zip(header, CIRCLE_COLUMNS))
    expected = SPHERE_COLUMNS if sphere_score >= circle_score else CIRCLE_COLUMNS
    for i, name in enumerate(expected):
        if i >= len(header):
            raise SchemaError(name, "missing from the header")
        if header[i] != name:
            raise SchemaError(name, f"expected at position {i}, found {header[i]!r}")
    raise SchemaError(header[len(expected)], "unexpected extra column")


def column_checksum(tables: list[TrajectoryTable], names_per_table: list[tuple[str, ...]]) -> str:
    """SHA-256 over the consumed columns, in consumption order.

    Hashes the IEEE-754 little-endian bytes of each named column of each
    table, so the digest identifies exactly the numbers a figure was drawn
    from, independent of file paths or row formatting.
    """
    digest = hashlib.sha256()
    for table, names in zip(tables, names_per_table):
        for name in names:
            digest.update(name.encode("ascii"))
            digest.update(np.ascontiguousarray(table.column(name), dtype="<f8").tobytes())
    return digest.hexdigest()
