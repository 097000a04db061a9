"""
Torus Knot Tool.

PURPOSE: Generate the constant-curvature Legendrian torus knot γ_{m,n} and
         compute its invariants.

INPUT:
    m, n      coprime positive winding numbers
    samples   number of uniform samples N
    out       output directory
    fmt       "json" or "csv" for the polyline

OUTPUT: dict with "summary", "files" and "report" (the InvariantReport), or
        the error dict with "error", "details" and "exit_code".

FILES:
    torus_<m>_<n>_report.json     InvariantReport
    torus_<m>_<n>_polyline.<fmt>  S³ samples with Heisenberg and Lagrangian projections
"""

from pathlib import Path

import anyio

from legendrian.config import DEFAULT_SAMPLES, MASLOV_TOLERANCE
from legendrian.errors import LegendrianError
from legendrian.geom import torus_knot_curve
from legendrian.invariants import compute_invariants
from legendrian.logging_utils import get_logger
from tools.export import error_result, write_json, write_polyline

logger = get_logger("KNOT")


def _torus_knot(m: int, n: int, samples: int, out: Path, fmt: str, tol: float) -> dict:
    curve = torus_knot_curve(m, n, samples)
    report = compute_invariants(curve, maslov_tolerance=tol)
    stem = f"torus_{m}_{n}"
    data = {"m": m, "n": n, "samples": samples, "period": curve.period, **report.to_dict()}
    files = [
        write_json(out / f"{stem}_report.json", data),
        write_polyline(out, f"{stem}_polyline", curve, fmt),
    ]
    summary = (f"torus-knot m={m} n={n}: maslov={report.maslov} cl={report.clifford_index} "
               f"spin={report.spin} turning={report.turning_number} tb={report.bennequin}")
    return {"summary": summary, "files": [str(f) for f in files], "report": data}


async def torus_knot_impl(m: int, n: int, samples: int = DEFAULT_SAMPLES,
                          out: str = ".", fmt: str = "json",
                          tol: float = MASLOV_TOLERANCE) -> dict:
    """
    Build γ_{m,n} and write its polyline and invariant report.

    Args:
        m, n: coprime positive integers
        samples: sample count N (at least 8)
        out: directory for the output files
        fmt: polyline format, "json" or "csv"
        tol: integrality tolerance of the Maslov index

    Returns:
        dict: {"summary", "files", "report"} on success,
              {"error", "details", "exit_code", "command"} on failure
              (exit code 2 for non-coprime or non-positive winding numbers).
    """
    # ========== COMPUTE ==========
    try:
        return await anyio.to_thread.run_sync(_torus_knot, m, n, samples, Path(out), fmt, tol)
    except LegendrianError as exc:
        logger.error("torus knot (%s, %s) failed: %s", m, n, exc.message)
        return error_result(exc, "torus-knot", {"m": m, "n": n})
