import json
import math
import subprocess
import sys

import numpy as np
import pytest

from trilinea import Line, TriangleSpec
from trilinea.cli import ENV_TOLERANCE, main, resolve_tolerance
from trilinea.io import SceneFile, write_scene
from trilinea.scenes import equilateral_scene, random_generic_scene

SQ3 = math.sqrt(3.0)


@pytest.fixture
def scenes(tmp_path):
    out = {}
    lines, tri = equilateral_scene(1.0)
    out["equilateral"] = tmp_path / "equilateral.json"
    write_scene(SceneFile(2, tuple(lines), tri), out["equilateral"])
    out["mismatch"] = tmp_path / "mismatch.json"
    write_scene(SceneFile(2, tuple(lines), TriangleSpec(SQ3, SQ3, 2.0)), out["mismatch"])
    g_lines, g_tri, _ = random_generic_scene(np.random.default_rng(3))
    out["generic"] = tmp_path / "generic.json"
    write_scene(SceneFile(3, tuple(g_lines), g_tri), out["generic"])
    far = [Line([0, 0, 0], [1, 0, 0]), Line([0, 0, 10], [0, 1, 0]), Line([0, 0, -10], [1, 1, 0])]
    out["far"] = tmp_path / "far.json"
    write_scene(SceneFile(3, tuple(far), TriangleSpec(0.1, 0.1, 0.1)), out["far"])
    out["bad"] = tmp_path / "bad.json"
    out["bad"].write_text('{"dimension": 2, "lines": [')
    out["zero"] = tmp_path / "zero.json"
    doc = json.loads(out["equilateral"].read_text())
    doc["lines"][0]["direction"] = [0, 0]
    out["zero"].write_text(json.dumps(doc))
    return out


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_feasible(self, capsys, scenes):
        code, out, _ = run(capsys, "feasibility", scenes["equilateral"])
        assert code == 0
        summary = json.loads(out)
        assert summary["verdict"] == "FeasibleMechanism"
        assert summary["ratios"] == pytest.approx([2.0, 2.0, 2.0])

    def test_infeasible(self, capsys, scenes):
        code, out, _ = run(capsys, "feasibility", scenes["mismatch"])
        assert code == 1
        assert json.loads(out)["verdict"] == "Infeasible"

    def test_parse_error(self, capsys, scenes):
        code, _, err = run(capsys, "feasibility", scenes["bad"])
        assert code == 2
        assert "bad.json:1:" in err

    def test_validation_error(self, capsys, scenes):
        code, _, err = run(capsys, "simulate", scenes["zero"])
        assert code == 2
        assert "zero direction" in err

    def test_simulate_infeasible(self, capsys, scenes):
        code, _, _ = run(capsys, "simulate", scenes["mismatch"])
        assert code == 1

    def test_render_generic(self, capsys, scenes):
        code, _, _ = run(capsys, "render", scenes["generic"])
        assert code == 1

    def test_solve_edge_too_short(self, capsys, scenes):
        code, out, _ = run(capsys, "solve", scenes["far"])
        assert code == 1
        assert json.loads(out)["status"] == "count=0 (bound 8)"


class TestSimulate:
    def test_csv_rows_and_residuals(self, capsys, scenes, tmp_path):
        target = tmp_path / "trace.csv"
        code, out, _ = run(capsys, "simulate", scenes["equilateral"], "--samples", 1024, "--out", target)
        assert code == 0
        summary = json.loads(out)
        assert summary["samples"] == 1024
        rows = target.read_text().splitlines()
        assert len(rows) == 1025
        data = np.array([[float(x) for x in r.split(",")] for r in rows[1:]])
        assert np.max(data[:, -6:]) < 1e-9

    def test_csv_to_stdout(self, capsys, scenes):
        code, out, _ = run(capsys, "simulate", scenes["equilateral"], "--samples", 4)
        assert code == 0
        assert len(out.splitlines()) == 5

    def test_svg_format(self, capsys, scenes, tmp_path):
        target = tmp_path / "t.svg"
        code, _, _ = run(capsys, "simulate", scenes["equilateral"], "--format", "svg", "--out", target,
                         "--rolling")
        assert code == 0
        assert target.read_text().count("<polyline") == 3

    def test_side_flag(self, capsys, scenes):
        code, _, err = run(capsys, "simulate", scenes["equilateral"], "--side", "-1", "--samples", 8)
        assert code == 1
        assert "side" in err

    def test_byte_identical_reruns(self, capsys, scenes, tmp_path):
        outputs = []
        for k in range(2):
            target = tmp_path / f"r{k}.csv"
            run(capsys, "simulate", scenes["equilateral"], "--samples", 300, "--out", target)
            outputs.append(target.read_bytes())
        assert outputs[0] == outputs[1]


class TestSolve:
    def test_oracle_agreement(self, capsys, scenes):
        code, out, _ = run(capsys, "solve", scenes["mismatch"], "--oracle")
        assert code == 0
        summary = json.loads(out)
        assert summary["oracle"]["agree"]
        assert summary["oracle"]["count"] == summary["count"]
        assert summary["status"] == f"count={summary['count']} (bound 8)"

    def test_generic_status(self, capsys, scenes):
        code, out, _ = run(capsys, "solve", scenes["generic"])
        summary = json.loads(out)
        assert code == 0
        assert summary["count"] <= 8
        assert summary["status"].endswith("(bound 8)")
        for cfg in summary["configurations"]:
            assert cfg["residual"] < 1e-8 * max(1.0, max(json.loads(scenes["generic"].read_text())["triangle"].values()))

    def test_continuum(self, capsys, scenes):
        code, out, _ = run(capsys, "solve", scenes["equilateral"])
        assert code == 0
        assert json.loads(out)["kind"] == "continuum"


class TestVerify:
    def test_mechanism_passes(self, capsys, scenes):
        code, out, _ = run(capsys, "verify", scenes["equilateral"])
        summary = json.loads(out)
        assert code == 0
        assert summary["circumcircle"]["radius"] == pytest.approx(1.0)
        assert summary["rolling"]["pass"]


class TestTolerance:
    def test_flag_beats_environment(self):
        assert resolve_tolerance(1e-3, {ENV_TOLERANCE: "1e-5"}) == 1e-3

    def test_environment_beats_default(self):
        assert resolve_tolerance(None, {ENV_TOLERANCE: "1e-5"}) == 1e-5

    def test_default(self):
        assert resolve_tolerance(None, {}) == 1e-8

    def test_environment_used_by_command(self, capsys, scenes, monkeypatch, tmp_path):
        lines, tri = equilateral_scene(1.0)
        path = tmp_path / "near.json"
        write_scene(SceneFile(2, tuple(lines), TriangleSpec(tri.d12 * (1 + 3e-8), tri.d13, tri.d23)), path)
        assert run(capsys, "feasibility", path)[0] == 1
        monkeypatch.setenv(ENV_TOLERANCE, "1e-7")
        assert run(capsys, "feasibility", path)[0] == 0
        assert run(capsys, "feasibility", path, "--tolerance", "1e-9")[0] == 1

    def test_bad_environment(self, capsys, scenes, monkeypatch):
        monkeypatch.setenv(ENV_TOLERANCE, "lots")
        assert run(capsys, "feasibility", scenes["equilateral"])[0] == 2


def test_console_entry_point(scenes):
    proc = subprocess.run([sys.executable, "-m", "trilinea.cli", "feasibility", str(scenes["equilateral"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "FeasibleMechanism"
