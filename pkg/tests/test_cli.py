"""Command line behaviour: exit codes, report schema, SVG determinism."""

import json

import numpy as np
import pytest

from cubicform.cli import main
from cubicform.locus import CharPoint
from cubicform.surface import catalog
from cubicform.svg import render_svg


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["analyze"])  # --surface is required
    assert exc.value.code == 2


def test_unknown_catalog_name_exits_1(capsys):
    assert main(["check", "--surface", "catalog:nope"]) == 1
    assert "unknown catalog surface" in capsys.readouterr().err


def test_bad_parameter_syntax_exits_1(capsys):
    assert main(["check", "--surface", "catalog:platonova", "rho"]) == 1
    assert "KEY=VALUE" in capsys.readouterr().err


def test_grid_floor_is_enforced(capsys):
    rc = main(["check", "--surface", "catalog:platonova", "--grid", "8"])
    assert rc == 1
    assert "at least 16" in capsys.readouterr().err


def test_platonova_degenerate_godron_exits_1(capsys):
    rc = main(["analyze", "--surface", "catalog:platonova", "rho=1"])
    assert rc == 1
    assert "genericity violation" in capsys.readouterr().err


def test_revolution_torus_check_exits_3(capsys):
    rc = main(["check", "--surface", "catalog:torus_revolution", "R=2", "r=1",
               "--grid", "32"])
    assert rc == 3
    out = capsys.readouterr().out
    assert "status: non-generic input" in out


def test_convex_sphere_analyze_verifies_and_report_round_trips(tmp_path):
    report = tmp_path / "sphere.json"
    rc = main(["analyze", "--surface", "catalog:radial_sphere", "eps=0.03",
               "--grid", "48", "--report", str(report)])
    assert rc == 0
    rep = json.loads(report.read_text())
    assert json.loads(json.dumps(rep)) == rep
    assert rep["status"] == "verified"
    assert rep["chi"] == {"surface": 2, "elliptic": 2, "hyperbolic": 0}
    assert rep["counts"] == {"ellipnodes": 6, "hyperbonodes": 0, "godrons": 0}
    assert rep["sums"]["ellipnode_index"] == "2"
    assert all(rep["identities"].values())
    indices = [p["index"] for p in rep["points"]]
    assert indices == ["1/3"] * 6


def test_patch_analyze_reports_local_status(tmp_path):
    report = tmp_path / "lp.json"
    rc = main(["check", "--surface", "catalog:lp_hyperbonode", "a=2", "b=1",
               "--winding", "--report", str(report)])
    assert rc == 0
    rep = json.loads(report.read_text())
    assert rep["status"] == "local patch"
    assert rep["identities"] is None
    assert rep["chi"] is None
    (node,) = [p for p in rep["points"] if p["kind"] == "hyperbonode"]
    assert node["index"] == "-1"
    assert node["winding"] == "-1"
    assert node["rho"] == pytest.approx(-1.0)
    assert node["sigma"] == 1
    assert rep["winding_mismatches"] == []


def test_surface_file_run_section_sets_grid(tmp_path):
    surf = tmp_path / "patch.surf"
    surf.write_text(
        "[surface]\nkind = platonova\nrho = 0.5\n\n[run]\ngrid = 16\n")
    report = tmp_path / "patch.json"
    rc = main(["check", "--surface", str(surf), "--report", str(report)])
    assert rc == 0
    rep = json.loads(report.read_text())
    assert rep["grid"] == 16
    assert rep["surface"]["name"] == "platonova"
    assert rep["counts"]["godrons"] == 1
    (godron,) = [p for p in rep["points"] if p["kind"] == "godron"]
    assert godron["sign"] == -1


def test_surface_file_missing_section_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.surf"
    bad.write_text("[shape]\nkind = torus\n")
    assert main(["check", "--surface", str(bad)]) == 1
    assert "[surface]" in capsys.readouterr().err


def test_shipped_surface_files_load():
    rc = main(["localize", "--surface", "surfaces/lp_hyperbonode.surf"])
    assert rc == 0


def test_localize_hyperbonode_prints_both_routes(capsys):
    rc = main(["localize", "--surface", "catalog:lp_hyperbonode", "a=2", "b=1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "rho = -1" in out
    assert "sigma = +1" in out
    assert "index (closed form) = -1" in out
    assert "index (winding)     = -1" in out


def test_localize_ellipnode_fractional_index(capsys):
    rc = main(["localize", "--surface", "catalog:pre_ellipnode", "I=1", "J=1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "index (closed form) = -1/3" in out
    assert "index (winding)     = -1/3" in out


def test_localize_godron_normal_form(capsys):
    rc = main(["localize", "--surface", "catalog:platonova", "rho=2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "classification: parabolic" in out
    assert "normal-form rho = 2" in out
    assert "sign = +1" in out
    assert "-1/3" in out and "1/2" in out


def test_localize_off_node_point_reports_residual(capsys):
    rc = main(["localize", "--surface", "catalog:platonova", "rho=2",
               "--at", "0.1,0.02"])
    assert rc == 0
    assert "not a node" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# SVG rendering

def test_torus_svg_is_byte_stable(tmp_path):
    paths = [tmp_path / "a.svg", tmp_path / "b.svg"]
    for p in paths:
        rc = main(["analyze", "--surface", "catalog:torus", "--grid", "32",
                   "--report", str(tmp_path / "r.json"), "--svg", str(p)])
        assert rc == 3  # degenerate fixture still renders
    a, b = (p.read_bytes() for p in paths)
    assert a == b
    assert a.count(b'stroke="#101010" stroke-width="1.6"') >= 2  # parabolic bands
    assert b"stroke-dasharray" in a


def test_empty_analysis_renders_legend_only(tmp_path):
    spec = catalog("radial_sphere", {"eps": 0.0})
    data = render_svg(spec, tmp_path / "plain.svg", grid=16, points=[])
    assert data.startswith(b"<?xml")
    assert data.rstrip().endswith(b"</svg>")
    assert b"<polyline" not in data
    assert b">godron</text>" in data  # legend always present


def test_marker_shapes_and_sign_fill(tmp_path):
    spec = catalog("platonova", {"rho": 2.0})
    mk = lambda kind, u, sign, index: CharPoint(
        kind=kind, chart="xy", param=(u, 0.0), base=np.zeros(3),
        sign=sign, index=index)
    pts = [
        mk("ellipnode", -0.2, None, 1),
        mk("ellipnode", -0.1, None, -1),
        mk("hyperbonode", 0.0, None, 1),
        mk("godron", 0.1, -1, None),
    ]
    data = render_svg(spec, tmp_path / "m.svg", grid=16, points=pts)
    body = data.split(b"</g>")[1]  # skip the fill raster, keep markers+legend
    # one filled and one hollow circle beyond the legend samples
    assert body.count(b"<circle") == 1 + 2
    assert body.count(b"<rect") >= 2
    assert body.count(b"<polygon") == 1 + 1
    assert body.count(b'fill="none" stroke="#101010"') >= 2  # hollow markers
