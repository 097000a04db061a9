"""
Modular Curve Scan Tool.

PURPOSE: Trace the modular curve Σ_q = {Φ̃2 = q} of a characteristic
         number q = q_num/q_den > 1/2 and tabulate it with the time
         periodicity function P_q.

INPUT:
    q_num, q_den   the characteristic number
    out, fmt       output directory and table format

OUTPUT: dict with "summary", "files" and "trace" (limits, exceptional point,
        unboundedness, asymptotic slope and the minimum of P_q), or the
        error dict (exit code 2 for q <= 1/2).

FILES:
    scan_<p>_<q>.<fmt>            rows (e1, e3, phi2_regularized, lambda, omega, P_q)
    scan_<p>_<q>_summary.json     the "trace" dict
"""

from fractions import Fraction
from functools import partial
from pathlib import Path

import anyio

from legendrian.config import SCAN_NEWTON_TOLERANCE
from legendrian.errors import LegendrianError, ValidationError
from legendrian.logging_utils import get_logger
from legendrian.stationary import boundary_limits, modular_row, scan_modular_curve
from tools.export import error_result, write_json, write_table
from tools.parallel import map_moduli

logger = get_logger("SCAN")

SCAN_COLUMNS = ["e1", "e3", "phi2_regularized", "lambda", "omega", "P_q"]


def _trace_summary(trace, q: Fraction) -> dict:
    lower, upper = boundary_limits(float(q))
    summary = {
        "q": str(q),
        "points": len(trace.points),
        "lower_limit": trace.lower_limit,
        "upper_limit": trace.upper_limit,
        "analytic_lower_limit": lower,
        "analytic_upper_limit": upper,
        "exceptional": trace.exceptional.to_dict() if trace.exceptional else None,
        "unbounded": trace.unbounded,
        "asymptotic_slope": trace.asymptotic_slope(),
        "p_minimum": None,
    }
    if trace.p_minimum is not None:
        value, where = trace.p_minimum
        summary["p_minimum"] = {"P_q": value, "e1": where.e1, "e3": where.e3}
    return summary


async def scan_impl(q_num: int, q_den: int, out: str = ".", fmt: str = "json",
                    tol: float = SCAN_NEWTON_TOLERANCE) -> dict:
    """
    Trace and tabulate one modular curve.

    Args:
        q_num, q_den: numerator and positive denominator of q
        out, fmt: output directory and table format
        tol: residual tolerance of the Newton corrector

    Returns:
        dict: {"summary", "files", "trace"} or the error dict.
    """
    try:
        if q_den <= 0:
            raise ValidationError(f"denominator must be positive, got {q_den}")
        q = Fraction(q_num, q_den)
        trace = await anyio.to_thread.run_sync(partial(scan_modular_curve, float(q), tolerance=tol))

        # ========== TABULATE ==========
        rows = await map_moduli(modular_row, trace.points)
        table = [[row[column] for column in SCAN_COLUMNS] for row in rows]
        directory = Path(out)
        stem = f"scan_{q.numerator}_{q.denominator}"
        data = _trace_summary(trace, q)
        files = [
            write_table(directory, stem, SCAN_COLUMNS, table, fmt),
            write_json(directory / f"{stem}_summary.json", data),
        ]
    except LegendrianError as exc:
        logger.error("scan of %s/%s failed: %s", q_num, q_den, exc.message)
        return error_result(exc, "scan", {"q": f"{q_num}/{q_den}"})

    limits = data["upper_limit"] if data["upper_limit"] else "unbounded"
    summary = (f"scan q={q}: {data['points']} points, lower limit {data['lower_limit']}, "
               f"upper limit {limits}")
    return {"summary": summary, "files": [str(f) for f in files], "trace": data}
