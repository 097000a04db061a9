"""
Evolve Tool.

PURPOSE: Evolve a periodic curvature profile under the Z_n or V_n flow and
         record snapshots and conserved quantities.

INPUT:
    profile    path of an "s,k" CSV profile (uniform nodes)
    n          level of the flow (Z_n: k_t = M_{n+1}; V_n: k_t = M_{n+1} + 4 M_n)
    t_end      final time
    snapshots  number of evenly spaced snapshots after the initial one
    kind       "Z" or "V"
    polylines  also write the curve reconstructed from every snapshot
    out, fmt   output directory and table format

OUTPUT: dict with "summary", "files" and "final" (time, max |k| and the
        conserved quantities at t_end), or the error dict.
        A malformed profile gives exit code 2, the blow-up guard exit code 3.

FILES:
    evolve_snapshots.<fmt>      rows (t, s, k)
    evolve_conservation.csv     rows (t, rho1, rho2, rho3, max_abs_k)
    evolve_polyline_<i>.<fmt>   with polylines, the curve of snapshot i
                                (rebuilt from the identity frame, so up to a rigid motion)
"""

from pathlib import Path

import anyio

from legendrian.config import FLOW_CFL
from legendrian.errors import LegendrianError
from legendrian.flow import FlowState, conserved_quantities, evolve_curvature
from legendrian.geom import CurvatureProfile, frenet_reconstruct
from legendrian.logging_utils import get_logger
from tools.export import error_result, read_profile, write_csv, write_polyline, write_table

logger = get_logger("EVOLVE")

CONSERVATION_COLUMNS = ["t", "rho1", "rho2", "rho3", "max_abs_k"]


def _evolve(profile: Path, n: int, t_end: float, snapshots: int, kind: str,
            polylines: bool, cfl: float, out: Path, fmt: str) -> dict:
    k0 = read_profile(profile)
    state = evolve_curvature(FlowState(k=k0), n, t_end, kind=kind, snapshots=snapshots, cfl=cfl)

    # ========== SNAPSHOTS ==========
    rows = []
    for t, values in state.snapshots:
        for s, value in zip(k0.nodes, values):
            rows.append([float(t), float(s), float(value)])
    files = [write_table(out, "evolve_snapshots", ["t", "s", "k"], rows, fmt)]
    conservation = [
        [row.t, row.rho1, row.rho2, row.rho3, row.max_abs_k] for row in state.conservation
    ]
    files.append(write_csv(out / "evolve_conservation.csv", CONSERVATION_COLUMNS, conservation))

    if polylines:
        for index, (_, values) in enumerate(state.snapshots):
            curve = frenet_reconstruct(CurvatureProfile(values, k0.period), state.frame0)
            files.append(write_polyline(out, f"evolve_polyline_{index}", curve, fmt))

    rho1, rho2, rho3 = conserved_quantities(state.k)
    final = {"t": state.t, "max_abs_k": float(abs(state.k.values).max()),
             "rho1": rho1, "rho2": rho2, "rho3": rho3, "drift": state.drift}
    summary = (f"evolve {kind}_{n} to t={t_end:g}: {len(state.snapshots)} snapshots, "
               f"max|k|={final['max_abs_k']:.6g}")
    return {"summary": summary, "files": [str(f) for f in files], "final": final}


async def evolve_impl(profile: str, n: int, t_end: float, snapshots: int = 0,
                      kind: str = "Z", polylines: bool = False, cfl: float = FLOW_CFL,
                      out: str = ".", fmt: str = "json") -> dict:
    """
    Run a curvature flow from a profile file.

    Args:
        profile: "s,k" CSV file
        n: flow level, n >= 0 for V_n and n >= 1 for Z_n
        t_end: final time (>= 0)
        snapshots: evenly spaced snapshots to record besides t = 0
        kind: "Z" or "V"
        polylines: reconstruct and write a curve per snapshot
        cfl: time-step constant
        out, fmt: output directory and table format

    Returns:
        dict: {"summary", "files", "final"} on success, the error dict otherwise.
    """
    try:
        return await anyio.to_thread.run_sync(
            _evolve, Path(profile), n, t_end, snapshots, kind, polylines, cfl, Path(out), fmt)
    except LegendrianError as exc:
        logger.error("evolution failed: %s", exc.message)
        return error_result(exc, "evolve", {"profile": str(profile), "n": n, "kind": kind})
