import inspect
import json
import math
from functools import partial

import anyio
import numpy as np
import pytest

from cli import build_parser, run
from legendrian.errors import ProfileFormatError
from tools.evolve import evolve_impl
from tools.export import read_profile, write_csv
from tools.parallel import map_moduli
from tools.scan import scan_impl


def write_profile(path, values, period=2.0 * math.pi):
    s = np.arange(len(values)) * period / len(values)
    write_csv(path, ["s", "k"], [[float(a), float(b)] for a, b in zip(s, values)])
    return path


# ========== TORUS KNOTS ==========

def test_torus_knot_writes_its_report(tmp_path, capsys):
    assert run(["torus-knot", "3", "5", "--samples", "2048", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "torus_3_5_report.json").read_text())
    assert report["clifford_index"] == 8
    assert report["bennequin"] == -15
    assert report["maslov"] == -2
    assert (tmp_path / "torus_3_5_polyline.json").is_file()
    assert "tb=-15" in capsys.readouterr().out


def test_torus_knot_polyline_as_csv(tmp_path):
    assert run(["torus-knot", "1", "2", "--samples", "64", "--out", str(tmp_path), "--format", "csv"]) == 0
    lines = (tmp_path / "torus_1_2_polyline.csv").read_text().splitlines()
    assert len(lines) == 65


def test_torus_knot_rejects_common_factor(tmp_path, capsys):
    assert run(["torus-knot", "2", "4", "--out", str(tmp_path)]) == 2
    assert "[CLI] ValidationError" in capsys.readouterr().err
    assert not list(tmp_path.iterdir())


# ========== STATIONARY ==========

def test_stationary_rejects_invalid_modulus(tmp_path, capsys):
    assert run(["stationary", "1.0", "-1.0", "--out", str(tmp_path)]) == 2
    assert "InvalidModulusError" in capsys.readouterr().err


def test_stationary_needs_a_modulus(tmp_path, capsys):
    assert run(["stationary", "--out", str(tmp_path)]) == 2
    assert "ValidationError" in capsys.readouterr().err


def test_stationary_published_lower_branch_closes(tmp_path):
    code = run(["stationary", "--published", "q56_lower_branch", "--samples", "1536", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "stationary_report.json").read_text())
    assert report["closed"] is True
    assert report["published"] == "q56_lower_branch"
    assert report["loop"]["wave_number"] == 6
    assert (tmp_path / "stationary_loop.json").is_file()


def test_unknown_published_name(tmp_path, capsys):
    assert run(["stationary", "--published", "nowhere", "--out", str(tmp_path)]) == 2
    assert "nowhere" in capsys.readouterr().err


# ========== SCAN ==========

def test_scan_rejects_small_characteristic(tmp_path, capsys):
    assert run(["scan", "1", "3", "--out", str(tmp_path)]) == 2
    assert "[CLI] ValidationError" in capsys.readouterr().err


def test_scan_rejects_zero_denominator(tmp_path):
    assert run(["scan", "5", "0", "--out", str(tmp_path)]) == 2


# ========== EVOLVE ==========

def test_evolve_rejects_malformed_profile(tmp_path, capsys):
    profile = tmp_path / "bad.csv"
    profile.write_text("x,y\n0,1\n1,2\n")
    assert run(["evolve", str(profile), "1", "0.1", "--out", str(tmp_path)]) == 2
    assert "ProfileFormatError" in capsys.readouterr().err


def test_evolve_missing_profile(tmp_path):
    assert run(["evolve", str(tmp_path / "missing.csv"), "1", "0.1", "--out", str(tmp_path)]) == 2


def test_evolve_constant_profile_keeps_its_snapshots(tmp_path):
    profile = write_profile(tmp_path / "k.csv", np.full(32, 0.5))
    out = tmp_path / "out"
    assert run(["evolve", str(profile), "1", "0.2", "--snapshots", "2", "--polylines", "--out", str(out)]) == 0
    table = json.loads((out / "evolve_snapshots.json").read_text())
    assert table["columns"] == ["t", "s", "k"]
    assert len(table["rows"]) == 3 * 32
    assert max(abs(row["k"] - 0.5) for row in table["rows"]) < 1e-12
    conservation = (out / "evolve_conservation.csv").read_text().splitlines()
    assert conservation[0] == "t,rho1,rho2,rho3,max_abs_k"
    assert len(conservation) == 4
    assert all((out / f"evolve_polyline_{i}.json").is_file() for i in range(3))


def test_evolve_reports_the_conservation_drift(tmp_path):
    profile = write_profile(tmp_path / "k.csv", np.full(32, 0.5))
    result = anyio.run(partial(evolve_impl, str(profile), 1, 0.2, out=str(tmp_path / "out")))
    assert result["final"]["drift"] is not None
    assert result["final"]["drift"] < 1e-10


# ========== HIERARCHY ==========

def test_hierarchy_writes_text(tmp_path, capsys):
    assert run(["hierarchy", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "hierarchy.txt").read_text().strip()
    table = json.loads((tmp_path / "hierarchy.json").read_text())
    assert len(table["rows"]) == 3
    assert "3 levels" in capsys.readouterr().out


def test_hierarchy_beyond_the_cap_is_a_numerical_failure(tmp_path, capsys):
    assert run(["hierarchy", "9", "--out", str(tmp_path)]) == 3
    assert "HierarchyError" in capsys.readouterr().err


# ========== PARSER ==========

def test_unknown_flag_exits_with_usage_error():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["torus-knot", "1", "2", "--bogus"])
    assert info.value.code == 2


def test_field_option_sets_the_kind():
    args = build_parser().parse_args(["evolve", "k.csv", "0", "1", "--field", "V"])
    assert args.kind == "V"
    assert args.fmt == "json"


@pytest.mark.parametrize("argv", [
    ["torus-knot", "3", "5", "--tol", "1e-4"],
    ["scan", "5", "6", "--tol", "1e-4"],
    ["stationary", "0.6", "2.4", "--tol", "1e-4"],
    ["evolve", "k.csv", "1", "0.1", "--tol", "1e-4"],
    ["hierarchy", "3", "--tol", "1e-4"],
])
def test_tolerance_flag_is_common_to_every_command(argv):
    args = build_parser().parse_args(argv)
    assert args.tol == 1e-4


def test_tolerance_is_unset_by_default_and_scan_writes_json():
    args = build_parser().parse_args(["scan", "5", "6"])
    assert args.tol is None
    assert args.fmt == "json"
    assert inspect.signature(scan_impl).parameters["fmt"].default == "json"


# ========== HELPERS ==========

def test_map_moduli_keeps_order():
    items = list(range(20))
    assert anyio.run(map_moduli, lambda x: x * x, items, 3) == [x * x for x in items]


def test_read_profile_round_trip(tmp_path):
    values = np.cos(np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False))
    k = read_profile(write_profile(tmp_path / "k.csv", values, period=3.0))
    assert k.count == 16
    assert k.period == pytest.approx(3.0)
    assert np.allclose(k.values, values)


def test_read_profile_rejects_uneven_nodes(tmp_path):
    path = tmp_path / "uneven.csv"
    path.write_text("s,k\n0,1\n0.1,1\n0.3,1\n0.4,1\n")
    with pytest.raises(ProfileFormatError) as info:
        read_profile(path)
    assert info.value.exit_code == 2
