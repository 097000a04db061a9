"""
Export helpers shared by the command tools.

PURPOSE: Write reports, polylines and tables as plain JSON or CSV for
         external plotting, and read curvature profiles back in.

FORMAT:
- CSV numbers are written with 17 significant digits ("%.17g").
- JSON numbers use the shortest repr that round-trips.
- Keys and columns keep a fixed order, so identical runs give identical bytes.

PROFILE FILES: a header line "s,k" followed by one "s,k" row per uniform
               node s_j = j·h, j = 0..N-1; the period is N·h.
"""

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from legendrian.errors import LegendrianError, PoleError, ProfileFormatError
from legendrian.geom import CurvatureProfile, SampledCurve, heisenberg_projection
from legendrian.logging_utils import get_logger

logger = get_logger("EXPORT")

FORMATS = ("json", "csv")

POLYLINE_COLUMNS = ["s", "re_z1", "im_z1", "re_z2", "im_z2"]
PROJECTION_COLUMNS = ["heisenberg_x", "heisenberg_y", "heisenberg_z"]


def format_number(value) -> str:
    return format(float(value), ".17g")


def _plain(value):
    """Convert numpy scalars, arrays, fractions and complex numbers to JSON types."""
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def write_json(path: Path, data: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(data), indent=2) + "\n", encoding="utf-8")
    logger.debug("wrote %s", path)
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) if isinstance(v, (float, np.floating)) else v for v in row])
    logger.debug("wrote %s", path)
    return path


def write_table(directory: Path, stem: str, header: Sequence[str], rows: List[Sequence],
                fmt: str) -> Path:
    """A table as `<stem>.csv`, or as a JSON list of records in `<stem>.json`."""
    if fmt == "csv":
        return write_csv(directory / f"{stem}.csv", header, rows)
    records = [dict(zip(header, row)) for row in rows]
    return write_json(directory / f"{stem}.json", {"columns": list(header), "rows": records})


# ========== POLYLINES ==========

def polyline_table(curve: SampledCurve, with_projections: bool = True) -> Dict[str, object]:
    """
    Header and rows of a curve polyline: S³ samples and, when the curve stays
    away from the pole, its Heisenberg projection (whose first two columns are
    the Lagrangian projection).
    """
    s = curve.nodes
    z = curve.samples
    columns = [s, z[:, 0].real, z[:, 0].imag, z[:, 1].real, z[:, 1].imag]
    header = list(POLYLINE_COLUMNS)
    projected = False
    if with_projections:
        try:
            points = heisenberg_projection(curve)
        except PoleError as exc:
            logger.warning("projections omitted: %s", exc)
        else:
            columns.extend(points.T)
            header.extend(PROJECTION_COLUMNS)
            projected = True
    rows = [list(row) for row in np.column_stack(columns).tolist()]
    return {"header": header, "rows": rows, "projected": projected}


def write_polyline(directory: Path, stem: str, curve: SampledCurve, fmt: str) -> Path:
    table = polyline_table(curve)
    return write_table(directory, stem, table["header"], table["rows"], fmt)


def profile_rows(k: CurvatureProfile) -> List[List[float]]:
    return [[float(s), float(value)] for s, value in zip(k.nodes, k.values)]


# ========== PROFILE INPUT ==========

def read_profile(path: Path, relative_tolerance: float = 1e-9) -> CurvatureProfile:
    """
    Read a uniform curvature profile written as "s,k" rows.

    Raises:
        ProfileFormatError: missing file, bad header, unparsable or
            non-uniform rows, or too few samples.
    """
    path = Path(path)
    if not path.is_file():
        raise ProfileFormatError(f"profile file {path} does not exist")
    with path.open(newline="", encoding="utf-8") as handle:
        rows = [row for row in csv.reader(handle) if row and any(cell.strip() for cell in row)]
    if not rows or [cell.strip().lower() for cell in rows[0]] != ["s", "k"]:
        raise ProfileFormatError(f"{path}: expected the header 's,k'")
    try:
        data = np.array([[float(cell) for cell in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise ProfileFormatError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 2:
        raise ProfileFormatError(f"{path}: expected at least two rows of two numbers")
    if not np.all(np.isfinite(data)):
        raise ProfileFormatError(f"{path}: non-finite values")

    s, k = data[:, 0], data[:, 1]
    spacing = float(s[1] - s[0])
    if not spacing > 0:
        raise ProfileFormatError(f"{path}: s must increase")
    expected = s[0] + spacing * np.arange(s.size)
    if np.max(np.abs(s - expected)) > relative_tolerance * spacing * s.size:
        raise ProfileFormatError(f"{path}: nodes are not uniformly spaced")
    try:
        return CurvatureProfile(k, spacing * s.size)
    except LegendrianError as exc:
        raise ProfileFormatError(f"{path}: {exc.message}") from exc


def error_result(exc: LegendrianError, command: str, extra: Optional[dict] = None) -> dict:
    """The error dictionary every tool returns instead of raising."""
    result = {
        "error": type(exc).__name__,
        "details": exc.message,
        "exit_code": exc.exit_code,
        "command": command,
    }
    if extra:
        result.update(extra)
    return result
