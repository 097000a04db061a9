"""
Stationary Curve Tool.

PURPOSE: Build the stationary curve of the Z_1 flow with a given modulus,
         decide its closure and export its profile, loop and projections.

INPUT:
    e1, e3     modulus coordinates (and e2 for the cnoidal and dnoidal cases)
    case       "symmetric_cnoidal" (default), "cnoidal" or "dnoidal"
    published  name of an entry of data/published_moduli.json, replacing e1/e2/e3/case
    samples    samples per profile (and for the whole loop)
    tol, max_denominator   rational detection of Φ1 and Φ̃2
    out, fmt   output directory and table format

OUTPUT: dict with "summary", "files" and "report", or the error dict
        (exit code 2 for an invalid modulus).

FILES:
    stationary_report.json         ClosureReport, exceptional flag, quartic data and,
                                   for closed symmetric curves, loop, homotopy and
                                   time-periodicity data
    stationary_profile.<fmt>       rows (s, k) over one wavelength
    stationary_loop.<fmt>          closed curve with its projections (closed curves only)
    stationary_clifford.<fmt>      Clifford projection of the loop (closed curves only)

WORKFLOW POSITION: a symmetric modulus quoted to a few digits is projected
                   onto its modular curve before the loop is built.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Optional

import anyio

from legendrian.config import CLOSURE_TOLERANCE, DEFAULT_SAMPLES, RATIONAL_MAX_DENOMINATOR
from legendrian.errors import LegendrianError, ValidationError
from legendrian.geom import clifford_projection, frenet_reconstruct
from legendrian.invariants import RationalDetect, compute_invariants
from legendrian.logging_utils import get_logger
from legendrian.stationary import (
    SYMMETRIC,
    Modulus,
    build_standard_loop,
    classify_time_periodicity,
    closure_quanta,
    curvature_profile,
    homotopy_class,
    is_exceptional,
    momentum_frame0,
    quartic_from_modulus,
)
from tools.export import error_result, profile_rows, write_json, write_polyline, write_table

logger = get_logger("STATIONARY_TOOL")

PUBLISHED_PATH = Path(__file__).resolve().parent.parent / "data" / "published_moduli.json"


def load_published(name: Optional[str] = None, path: Path = PUBLISHED_PATH) -> dict:
    """All published entries, or the one called `name` (ValidationError if unknown)."""
    entries = json.loads(path.read_text(encoding="utf-8"))["moduli"]
    if name is None:
        return entries
    if name not in entries:
        raise ValidationError(f"unknown published modulus {name!r}; known: {', '.join(sorted(entries))}")
    return entries[name]


def make_modulus(case: str, e1: float, e3: float, e2: Optional[float] = None) -> Modulus:
    return Modulus(case, float(e1), None if e2 is None else float(e2), float(e3))


def _loop_section(mod: Modulus, q: Fraction, samples: int, out: Path, fmt: str, files: list) -> dict:
    loop = build_standard_loop(mod, q=q, count=samples)
    files.append(write_polyline(out, "stationary_loop", loop.curve, fmt))
    eta = clifford_projection(loop.curve)
    files.append(write_table(out, "stationary_clifford", ["x", "y", "z"], eta.tolist(), fmt))

    section = {
        "refined_modulus": loop.modulus.to_dict(),
        "characteristic": str(loop.q),
        "wave_number": loop.wave_number,
        "wavelength": loop.wavelength,
        "length": loop.curve.period,
        "monodromy_defect": loop.monodromy_defect,
        "closure_gap": loop.closure_gap,
    }
    try:
        section["invariants"] = compute_invariants(loop.curve).to_dict()
    except LegendrianError as exc:
        logger.warning("invariants of the loop unavailable: %s", exc.message)
        section["invariants"] = None
    section["homotopy"] = homotopy_class(loop.curve).to_dict()
    timing = classify_time_periodicity(loop.modulus, loop.q)
    section["time_periodicity"] = {
        "P_q": timing.value,
        "rational": list(timing.rational) if timing.rational else None,
        "gcd": timing.gcd,
        "period": timing.period,
    }
    return section


def _stationary(mod: Modulus, samples: int, detect: RationalDetect, out: Path, fmt: str,
                label: Optional[str]) -> dict:
    exceptional = is_exceptional(mod)
    report = closure_quanta(mod, detect=detect, count=samples)
    k = curvature_profile(mod, samples)
    files = [write_table(out, "stationary_profile", ["s", "k"], profile_rows(k), fmt)]
    data = {
        "published": label,
        "exceptional": exceptional,
        "quartic": quartic_from_modulus(mod).to_dict(),
        **report.to_dict(),
    }

    # ========== CLOSED CURVES ==========
    if report.closed:
        if mod.case == SYMMETRIC:
            q = Fraction(*report.rational_pair[1])
            data["loop"] = _loop_section(mod, q, samples, out, fmt, files)
        else:
            curve = frenet_reconstruct(k.tiled(report.wave_number), momentum_frame0(mod, k))
            files.append(write_polyline(out, "stationary_loop", curve, fmt))
            data["loop"] = {"wave_number": report.wave_number, "length": curve.period}

    files.insert(0, write_json(out / "stationary_report.json", data))
    phi2 = report.phi2_regularized
    summary = (f"stationary {mod.case} e1={mod.e1:g} e3={mod.e3:g}: closed={report.closed} "
               f"phi2={phi2:.9f} wave_number={report.wave_number} exceptional={exceptional}")
    return {"summary": summary, "files": [str(f) for f in files], "report": data}


async def stationary_impl(e1: Optional[float] = None, e3: Optional[float] = None,
                          e2: Optional[float] = None, case: str = SYMMETRIC,
                          published: Optional[str] = None, samples: int = DEFAULT_SAMPLES,
                          tol: float = CLOSURE_TOLERANCE,
                          max_denominator: int = RATIONAL_MAX_DENOMINATOR,
                          out: str = ".", fmt: str = "json") -> dict:
    """
    Run the stationary pipeline for one modulus.

    Args:
        e1, e3, e2, case: the modulus; ignored when `published` is given
        published: entry name in data/published_moduli.json
        samples: sample count
        tol: rational detection tolerance for Φ1 and Φ̃2
        max_denominator: rational detection bound
        out, fmt: output directory and table format

    Returns:
        dict: {"summary", "files", "report"} or the error dict.
    """
    # ========== RESOLVE MODULUS ==========
    try:
        label = None
        if published is not None:
            entry = load_published(published)
            label = published
            case, e1, e2, e3 = entry["case"], entry["e1"], entry.get("e2"), entry["e3"]
        if e1 is None or e3 is None:
            raise ValidationError("e1 and e3 are required unless a published modulus is named")
        mod = make_modulus(case, e1, e3, e2)
        detect = RationalDetect(max_denominator=max_denominator, tolerance=tol)
        return await anyio.to_thread.run_sync(_stationary, mod, samples, detect, Path(out), fmt, label)
    except LegendrianError as exc:
        logger.error("stationary pipeline failed: %s", exc.message)
        return error_result(exc, "stationary", {"e1": e1, "e2": e2, "e3": e3, "case": case})
