"""
Hierarchy Tool.

PURPOSE: Write the first levels of the mKdV hierarchy as text.

INPUT: n_max (number of levels), out, fmt.

OUTPUT: dict with "summary", "files" and "levels" (ρ_j, M_j, N_j, L_j as
        text), or the error dict (exit code 3 beyond the level cap).

FILES:
    hierarchy.txt      one block per level
    hierarchy.<fmt>    the same levels as a table
"""

from pathlib import Path

from legendrian.diffalg import generate_hierarchy
from legendrian.errors import LegendrianError
from legendrian.logging_utils import get_logger
from tools.export import error_result, write_table

logger = get_logger("HIERARCHY")

COLUMNS = ["index", "rho", "M", "N", "L"]


def format_levels(levels) -> str:
    blocks = []
    for level in levels:
        data = level.to_dict()
        blocks.append("\n".join(
            [f"level {level.index}"] + [f"  {name} = {data[name]}" for name in COLUMNS[1:]]))
    return "\n\n".join(blocks) + "\n"


async def hierarchy_impl(n_max: int, out: str = ".", fmt: str = "json") -> dict:
    """
    Generate and write levels 1..n_max.

    Returns:
        dict: {"summary", "files", "levels"} or the error dict.
    """
    try:
        levels = generate_hierarchy(n_max)
    except LegendrianError as exc:
        logger.error("hierarchy failed: %s", exc.message)
        return error_result(exc, "hierarchy", {"n_max": n_max})

    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    text_path = directory / "hierarchy.txt"
    text_path.write_text(format_levels(levels), encoding="utf-8")
    rows = [[level.to_dict()[column] for column in COLUMNS] for level in levels]
    files = [text_path, write_table(directory, "hierarchy", COLUMNS, rows, fmt)]
    return {
        "summary": f"hierarchy: {len(levels)} levels",
        "files": [str(f) for f in files],
        "levels": [level.to_dict() for level in levels],
    }
