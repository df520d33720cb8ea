import json

from schauder_ldp.errors import EXIT_OK, EXIT_VALIDATION
from schauder_ldp.main import run


def test_usage_error_exit_code(capsys) -> None:
    assert run(["ldp-curve", "--alpha", "0.6"]) == EXIT_VALIDATION
    assert "alpha must be < 1/2" in capsys.readouterr().err


def test_batch_command_prints_report(tmp_path, capsys) -> None:
    code = run(["basis", "eval", "--n", "1", "--t", "0.5", "--log", str(tmp_path / "run_log.json")])
    assert code == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["schauder"] == 0.5
    assert json.loads((tmp_path / "run_log.json").read_text(encoding="utf-8"))[-1]["status"] == "completed"


def test_runtime_failure_is_reported(tmp_path, capsys) -> None:
    code = run(["rate", "--in", str(tmp_path / "missing.csv"), "--log", str(tmp_path / "run_log.json")])
    assert code == EXIT_VALIDATION
    assert "cannot read" in capsys.readouterr().err
