import json

import numpy as np
import pytest

from conftest import write_csv
from schauder_ldp.engine.config import parse_config
from schauder_ldp.errors import EXIT_OK, EXIT_VALIDATION
from schauder_ldp.utils.io_utils import load_path_csv


def _grid_lines(J: int, fn) -> list[str]:
    t = np.linspace(0.0, 1.0, 2**J + 1)
    return ["t,ch0"] + [f"{x!r},{fn(x)!r}" for x in t.tolist()]


def test_basis_eval(runner) -> None:
    result = runner.run(parse_config(["basis", "eval", "--n", "5", "--t", "0.3"]), emit=False)
    assert result.ok and result.exit_code == EXIT_OK
    payload = result.report.payload
    assert (payload["k_level"], payload["l_shift"]) == (2, 1)
    assert payload["haar"] == pytest.approx(2.0)
    assert payload["schauder"] == pytest.approx(2.0 * 0.05)


def test_basis_eval_without_index_fails_with_validation_code(runner) -> None:
    result = runner.run(parse_config(["basis", "eval", "--t", "0.3"]), emit=False)
    assert not result.ok
    assert result.exit_code == EXIT_VALIDATION
    assert "basis needs --n" in result.message
    assert runner.logs()[-1]["status"] == "failed"


def test_basis_table_csv(runner, tmp_path) -> None:
    target = tmp_path / "table.csv"
    result = runner.run(parse_config(["basis", "table", "--J", "2", "--format", "csv", "--out", str(target)]))
    assert result.ok
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,phi0,phi1,phi2,phi3"
    assert len(lines) == 6


def test_transform_forward_then_inverse(runner, tmp_path, capsys) -> None:
    source = write_csv(tmp_path / "path.csv", _grid_lines(4, lambda x: x * x))
    coeffs = tmp_path / "coeffs.csv"
    back = tmp_path / "back.csv"

    forward = runner.run(parse_config(["transform", "forward", "--in", source, "--out", str(coeffs)]))
    assert forward.ok
    report = json.loads(capsys.readouterr().out)
    assert report["N"] == 16 and report["K"] == 1
    assert report["dyadic_holder"]["strategy"] == "exhaustive"

    inverse = runner.run(parse_config(["transform", "inverse", "--J", "4", "--in", str(coeffs), "--out", str(back)]))
    assert inverse.ok
    assert np.allclose(load_path_csv(back).samples, load_path_csv(source).samples, atol=1e-12)


def test_transform_truncates_when_asked(runner, tmp_path) -> None:
    source = write_csv(tmp_path / "path.csv", _grid_lines(4, lambda x: x * x))
    result = runner.run(parse_config(["transform", "forward", "--N", "4", "--in", source]), emit=False)
    assert result.report.payload["N"] == 4


def test_malformed_input_fails(runner, tmp_path) -> None:
    source = write_csv(tmp_path / "path.csv", ["t,ch0", "0,0", "0.5,1", "0.75,1", "1,1"])
    result = runner.run(parse_config(["rate", "--in", source]), emit=False)
    assert result.exit_code == EXIT_VALIDATION
    assert "row count 4" in result.message


def test_simulate_writes_one_file_per_path(runner, tmp_path) -> None:
    out = tmp_path / "sims"
    cfg = parse_config(["simulate", "--J", "5", "--K", "2", "--paths", "3", "--seed", "7", "--out", str(out)])
    result = runner.run(cfg, emit=False)
    assert result.ok
    files = sorted(p.name for p in out.iterdir())
    assert files == ["path_00000.csv", "path_00001.csv", "path_00002.csv"]
    assert load_path_csv(out / "path_00001.csv").K == 2
    assert result.report.payload["log_bound_stat"] < 10.0


def test_rate_of_line(runner, tmp_path) -> None:
    source = write_csv(tmp_path / "line.csv", _grid_lines(3, lambda x: x))
    cfg = parse_config(["rate", "--in", source, "--spectrum", '{"kind": "explicit", "values": [0.5]}'])
    result = runner.run(cfg, emit=False)
    assert result.report.payload["value"] == pytest.approx(1.0)
    assert result.report.payload["finite"] is True


def test_ball_infimum_of_scalar_line(runner, tmp_path) -> None:
    center = write_csv(tmp_path / "center.csv", _grid_lines(6, lambda x: x))
    argv = ["ball-inf", "--center", center, "--delta", "0.2", "--spectrum", '{"kind": "explicit", "values": [1.0]}']
    result = runner.run(parse_config(argv), emit=False)
    payload = result.report.payload
    assert payload["infimum"]["value"] == pytest.approx(0.32)
    assert payload["N"] == 64
    assert payload["partition"]["counts"]["outside"] == 1


def test_ldp_curve_logs_refused_monte_carlo(runner, tmp_path) -> None:
    center = write_csv(tmp_path / "center.csv", _grid_lines(6, lambda x: x))
    report_path = tmp_path / "curve.json"
    argv = [
        "ldp-curve", "--center", center, "--delta", "0.2", "--eps", "0.5,0.25", "--mc-upto", "0.25",
        "--M", "1000", "--spectrum", '{"kind": "explicit", "values": [1.0]}', "--out", str(report_path),
    ]
    result = runner.run(parse_config(argv))
    assert result.ok
    payload = json.loads(report_path.read_text(encoding="utf-8"))
    assert payload["mc_refused"] == [0.5, 0.25]
    assert payload["target"] == pytest.approx(-0.32)
    assert runner.status()["runs"]["errors_logged"] == 2


def test_ldp_curve_needs_center(runner) -> None:
    result = runner.run(parse_config(["ldp-curve", "--delta", "0.2", "--alpha", "0.4"]), emit=False)
    assert result.exit_code == EXIT_VALIDATION
    assert "needs --center" in result.message


def test_tightness_command(runner) -> None:
    argv = ["tightness", "--J", "4", "--N", "16", "--M", "2000", "--eps", "2,0.25,0.125"]
    result = runner.run(parse_config(argv), emit=False)
    assert result.ok
    statuses = [p["status"] for p in result.report.payload["points"]]
    assert statuses == ["vacuous", "passed", "passed"]
    assert result.report.csv_table().header == ["eps", "bound", "mass", "stderr", "status"]


def test_status_counts_runs(runner) -> None:
    runner.run(parse_config(["basis", "eval", "--n", "0", "--t", "0.5"]), emit=False)
    status = runner.status()
    assert status["runs"]["runs"] == {"basis:completed": 1}
    assert status["log_path"].endswith("run_log.json")
    assert runner.logs()[-1]["params"]["action"] == "eval"
