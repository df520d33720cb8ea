from __future__ import annotations

"""
File I/O for paths, coefficient matrices and reports.

Floats are written with 17 significant digits so that save/load round-trips exactly;
JSON reports have sorted keys and carry infinities as the strings "inf" / "-inf".
"""

import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from schauder_ldp.core.ciesielski import CoeffMatrix, DyadicPath
from schauder_ldp.core.dyadic_basis import index_info, is_power_of_two, validate_alpha
from schauder_ldp.errors import IngestionError


COEFF_HEADER = ["n", "k_level", "l_shift", "channel", "raw", "scaled"]


@dataclass(frozen=True)
class Table:
    header: list[str]
    rows: list[list[Any]]


def resolve_path_safely(path: Path) -> Path:
    try:
        return path.expanduser().resolve()
    except Exception:
        return path.expanduser().absolute()


def ensure_directory(dir_path: Path) -> bool:
    try:
        dir_path.mkdir(parents=True, exist_ok=True)
        return True
    except Exception:
        return False


def format_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps_stable(obj: Any) -> str:
    return _encode(obj) + "\n"


def emit_report(result: Any, fmt: str = "json", location: str | Path | None = None) -> str:
    if fmt == "json":
        payload = result.to_dict() if hasattr(result, "to_dict") else result
        text = dumps_stable(payload)
    elif fmt == "csv":
        table = _as_table(result)
        text = _csv_text(table.header, table.rows)
    else:
        raise ValueError(f"unknown report format {fmt!r}")

    if location is None or str(location) == "-":
        sys.stdout.write(text)
        return text
    target = resolve_path_safely(Path(location))
    ensure_directory(target.parent)
    target.write_text(text, encoding="utf-8")
    return text


def save_path_csv(path: DyadicPath, location: str | Path) -> None:
    header = ["t"] + [f"ch{k}" for k in range(path.K)]
    rows = [[t, *row] for t, row in zip(path.grid.tolist(), path.samples.tolist())]
    _write_text(location, _csv_text(header, rows))


def load_path_csv(location: str | Path) -> DyadicPath:
    header, rows = _read_csv(location)
    if not header or header[0] != "t" or header[1:] != [f"ch{k}" for k in range(len(header) - 1)] or len(header) < 2:
        raise IngestionError("header must be t,ch0,...,ch{K-1}")
    count = len(rows)
    if not is_power_of_two(count - 1):
        raise IngestionError(f"row count {count} is not 2^J + 1")
    J = (count - 1).bit_length() - 1
    values = np.empty((count, len(header) - 1))
    previous_t = -math.inf
    for j, row in enumerate(rows):
        line = j + 2
        if len(row) != len(header):
            raise IngestionError(f"row {line}: expected {len(header)} fields, got {len(row)}")
        numbers = _parse_row(row, line)
        t = numbers[0]
        if t <= previous_t:
            raise IngestionError(f"row {line}: t={row[0]} is not increasing")
        if t != j / 2.0**J:
            raise IngestionError(f"row {line}: t={row[0]} differs from grid value {j / 2.0**J!r}")
        previous_t = t
        values[j] = numbers[1:]
    if np.any(values[0] != 0.0):
        raise IngestionError("row 2: path must start at 0")
    try:
        return DyadicPath(values)
    except ValueError as ex:
        raise IngestionError(str(ex)) from ex


def save_coeff_csv(coeffs: CoeffMatrix, location: str | Path) -> None:
    _write_text(location, _csv_text(COEFF_HEADER, coeff_rows(coeffs)))


def coeff_rows(coeffs: CoeffMatrix) -> list[list[Any]]:
    rows: list[list[Any]] = []
    for n in range(coeffs.N):
        info = index_info(n)
        for k in range(coeffs.K):
            rows.append([n, info.k, info.l, k, float(coeffs.raw[n, k]), float(coeffs.scaled[n, k])])
    return rows


def load_coeff_csv(location: str | Path, alpha: float) -> CoeffMatrix:
    alpha = validate_alpha(alpha)
    header, rows = _read_csv(location)
    if header != COEFF_HEADER:
        raise IngestionError(f"header must be {','.join(COEFF_HEADER)}")
    entries: dict[tuple[int, int], float] = {}
    for j, row in enumerate(rows):
        line = j + 2
        if len(row) != len(COEFF_HEADER):
            raise IngestionError(f"row {line}: expected {len(COEFF_HEADER)} fields, got {len(row)}")
        try:
            n, channel, raw = int(row[0]), int(row[3]), float(row[4])
        except ValueError as ex:
            raise IngestionError(f"row {line}: {ex}") from ex
        if (n, channel) in entries:
            raise IngestionError(f"row {line}: duplicate entry n={n}, channel={channel}")
        entries[(n, channel)] = raw
    if not entries:
        raise IngestionError("coefficient file has no rows")
    N = max(n for n, _ in entries) + 1
    K = max(k for _, k in entries) + 1
    if not is_power_of_two(N) or len(entries) != N * K:
        raise IngestionError(f"coefficient file must cover n < 2^J and all channels, got N={N}, K={K}")
    raw = np.empty((N, K))
    for (n, k), value in entries.items():
        raw[n, k] = value
    return CoeffMatrix.from_raw(raw, alpha)


def sniff_csv_kind(location: str | Path) -> str:
    header, _ = _read_csv(location)
    if header and header[0] == "t":
        return "path"
    if header == COEFF_HEADER:
        return "coeffs"
    raise IngestionError(f"unrecognized CSV header in {location}")


def _as_table(result: Any) -> Table:
    if isinstance(result, Table):
        return result
    if hasattr(result, "csv_table"):
        return result.csv_table()
    raise ValueError(f"{type(result).__name__} has no CSV form")


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def _read_csv(location: str | Path) -> tuple[list[str], list[list[str]]]:
    target = resolve_path_safely(Path(location))
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as ex:
        raise IngestionError(f"cannot read {target}: {ex}") from ex
    lines = [row for row in csv.reader(io.StringIO(text)) if row]
    if not lines:
        raise IngestionError(f"{target} is empty")
    return [h.strip() for h in lines[0]], lines[1:]


def _parse_row(row: list[str], line: int) -> list[float]:
    try:
        numbers = [float(cell) for cell in row]
    except ValueError as ex:
        raise IngestionError(f"row {line}: {ex}") from ex
    if not all(math.isfinite(x) for x in numbers):
        raise IngestionError(f"row {line}: values must be finite")
    return numbers


def _write_text(location: str | Path, text: str) -> None:
    target = resolve_path_safely(Path(location))
    ensure_directory(target.parent)
    target.write_text(text, encoding="utf-8")


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return json.dumps(format_float(x)) if not math.isfinite(x) else format_float(x)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")
