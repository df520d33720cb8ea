import math

import numpy as np
import pytest

from conftest import write_csv
from schauder_ldp.core.ciesielski import CoeffMatrix, forward
from schauder_ldp.errors import IngestionError
from schauder_ldp.utils.io_utils import (
    COEFF_HEADER,
    Table,
    dumps_stable,
    emit_report,
    format_float,
    load_coeff_csv,
    load_path_csv,
    save_coeff_csv,
    save_path_csv,
    sniff_csv_kind,
)


def test_load_three_row_path(tmp_path) -> None:
    location = write_csv(tmp_path / "p.csv", ["t,ch0,ch1", "0,0,0", "0.5,0.3,-1", "1,1,2"])
    path = load_path_csv(location)
    assert path.J == 1
    assert path.K == 2
    assert path.samples[1].tolist() == [0.3, -1.0]
    assert sniff_csv_kind(location) == "path"


@pytest.mark.parametrize(
    "lines, message",
    [
        (["t,ch0", "0,0", "0.25,1", "0.5,1", "1,1"], "row count 4 is not 2\\^J \\+ 1"),
        (["t,ch0", "0,0.1", "0.5,1", "1,1"], "path must start at 0"),
        (["t,ch0", "0,0", "0.5,1", "0.5,1"], "row 4: t=0.5 is not increasing"),
        (["t,ch0", "0,0", "0.4,1", "1,1"], "differs from grid value"),
        (["time,ch0", "0,0", "0.5,1", "1,1"], "header"),
        (["t,ch0", "0,0", "0.5,abc", "1,1"], "row 3"),
        (["t,ch0", "0,0", "0.5,inf", "1,1"], "finite"),
        (["t,ch0", "0,0", "0.5", "1,1"], "expected 2 fields"),
    ],
)
def test_malformed_path_files(tmp_path, lines: list[str], message: str) -> None:
    with pytest.raises(IngestionError, match=message):
        load_path_csv(write_csv(tmp_path / "bad.csv", lines))


def test_missing_file(tmp_path) -> None:
    with pytest.raises(IngestionError, match="cannot read"):
        load_path_csv(tmp_path / "absent.csv")


def test_path_save_load_is_exact(tmp_path, random_walk) -> None:
    path = random_walk(np.random.default_rng(0), J=5, K=3)
    target = tmp_path / "nested" / "walk.csv"
    save_path_csv(path, target)
    assert target.read_text(encoding="utf-8").splitlines()[0] == "t,ch0,ch1,ch2"
    assert np.array_equal(load_path_csv(target).samples, path.samples)


def test_coefficients_save_load_is_exact(tmp_path, random_walk) -> None:
    coeffs = forward(random_walk(np.random.default_rng(1), J=4, K=2), 0.3)
    target = tmp_path / "coeffs.csv"
    save_coeff_csv(coeffs, target)
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(COEFF_HEADER)
    assert lines[1].startswith("0,,,0,")
    assert lines[3].startswith("1,0,0,0,")
    assert sniff_csv_kind(target) == "coeffs"
    back = load_coeff_csv(target, 0.3)
    assert np.array_equal(back.raw, coeffs.raw)


def test_coefficient_file_errors(tmp_path) -> None:
    header = ",".join(COEFF_HEADER)
    dup = write_csv(tmp_path / "dup.csv", [header, "0,,,0,1,1", "0,,,0,2,2"])
    with pytest.raises(IngestionError, match="duplicate entry n=0"):
        load_coeff_csv(dup, 0.4)
    gap = write_csv(tmp_path / "gap.csv", [header, "0,,,0,1,1", "2,1,0,0,1,1"])
    with pytest.raises(IngestionError, match="must cover"):
        load_coeff_csv(gap, 0.4)
    empty = write_csv(tmp_path / "empty.csv", [header])
    with pytest.raises(IngestionError, match="no rows"):
        load_coeff_csv(empty, 0.4)


def test_unknown_csv_kind(tmp_path) -> None:
    with pytest.raises(IngestionError, match="unrecognized"):
        sniff_csv_kind(write_csv(tmp_path / "x.csv", ["a,b", "1,2"]))


def test_format_float() -> None:
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(1.0 / 3.0)) == 1.0 / 3.0
    assert format_float(math.inf) == "inf"
    assert format_float(-math.inf) == "-inf"
    assert format_float(math.nan) == "nan"


def test_dumps_stable_sorts_keys_and_quotes_infinity() -> None:
    text = dumps_stable({"b": [1, 2.5], "a": -math.inf, "c": {"z": None, "y": True}})
    assert text == '{"a": "-inf", "b": [1, 2.5], "c": {"y": true, "z": null}}\n'
    assert dumps_stable({"x": np.float64(0.5), "n": np.int64(3)}) == '{"n": 3, "x": 0.5}\n'


def test_emit_report_to_stdout_and_file(tmp_path, capsys) -> None:
    text = emit_report({"value": 1.0}, "json")
    assert capsys.readouterr().out == text == '{"value": 1}\n'

    table = Table(header=["eps", "mc_p"], rows=[[0.5, None], [0.25, 0.1]])
    target = tmp_path / "out" / "curve.csv"
    emit_report(table, "csv", target)
    assert target.read_text(encoding="utf-8") == "eps,mc_p\n0.5,\n0.25,0.10000000000000001\n"


def test_emit_report_without_csv_form() -> None:
    with pytest.raises(ValueError, match="no CSV form"):
        emit_report({"value": 1.0}, "csv", "-")


def test_loaded_coefficients_keep_alpha(tmp_path) -> None:
    coeffs = CoeffMatrix.from_raw(np.ones((2, 1)), 0.25)
    save_coeff_csv(coeffs, tmp_path / "c.csv")
    back = load_coeff_csv(tmp_path / "c.csv", 0.4)
    assert back.alpha == 0.4
    assert np.allclose(back.scaled[1], 2.0 ** (0.4 - 1.0))
