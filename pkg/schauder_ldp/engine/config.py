from __future__ import annotations

"""
Run configuration: shipped defaults < --config file < command-line flags.

Flags may appear before or after the subcommand. Every validation failure is a
UsageError naming the offending key.
"""

import argparse
import json
import math
import re
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator

from schauder_ldp.core.dyadic_basis import is_power_of_two, validate_alpha
from schauder_ldp.core.spectrum import Spectrum, spectrum_from_descriptor
from schauder_ldp.core.tightness import DivergentSeq, divergent_from_descriptor
from schauder_ldp.errors import ConfigError, DomainError, UsageError
from schauder_ldp.utils.io_utils import resolve_path_safely


COMMANDS = ("basis", "transform", "simulate", "rate", "ball-inf", "ldp-curve", "tightness", "verify", "serve")
ACTIONS = {"basis": ("eval", "table"), "transform": ("forward", "inverse")}
LDP_COMMANDS = frozenset({"ball-inf", "ldp-curve", "tightness", "verify"})

_FLAG_NAMES = {"input": "in", "output": "out", "eps_grid": "eps", "mc_upto": "mc-upto", "lam_bar": "lam-bar"}

_RANGE = re.compile(r"^2\^(-?\d+)\.\.2\^(-?\d+)$")
_POWER = re.compile(r"^2\^(-?\d+)$")

_FALLBACK_DEFAULTS: dict[str, Any] = {
    "alpha": 0.4,
    "J": 8,
    "N": None,
    "K": 4,
    "spectrum": {"kind": "geometric", "lambda0": 0.5, "ratio": 0.5},
    "trace_budget": None,
    "seed": 42,
    "M": 100_000,
    "paths": 1,
    "delta": None,
    "eps_grid": "2^-3..2^-14",
    "mc_upto": None,
    "a": 1.0,
    "divergent": {"kind": "geometric", "growth": math.sqrt(2.0)},
    "lam_bar": None,
    "workers": 1,
    "format": "json",
    "log_path": None,
    "host": "127.0.0.1",
    "port": 8732,
}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    command: Literal["basis", "transform", "simulate", "rate", "ball-inf", "ldp-curve", "tightness", "verify", "serve"]
    action: str | None = None
    alpha: float = Field(0.4, gt=0.0, lt=1.0)
    J: int = Field(8, ge=0, le=24)
    N: int | None = Field(None, ge=1)
    K: int = Field(4, ge=1)
    spectrum: dict[str, Any] = Field(default_factory=lambda: dict(_FALLBACK_DEFAULTS["spectrum"]))
    trace_budget: float | None = Field(None, gt=0.0)
    seed: int = Field(42, ge=0)
    M: int = Field(100_000, ge=1)
    paths: int = Field(1, ge=1)
    delta: float | None = Field(None, gt=0.0)
    eps_grid: list[float] = Field(default_factory=lambda: parse_eps_grid("2^-3..2^-14"))
    mc_upto: float | None = Field(None, gt=0.0)
    a: float = Field(1.0, gt=0.0)
    divergent: dict[str, Any] = Field(default_factory=lambda: dict(_FALLBACK_DEFAULTS["divergent"]))
    lam_bar: float | None = Field(None, gt=0.0)
    n: int | None = Field(None, ge=0)
    t: float | None = Field(None, ge=0.0, le=1.0)
    input: str | None = None
    output: str | None = None
    center: str | None = None
    format: Literal["json", "csv"] = "json"
    log_path: str | None = None
    workers: int = Field(1, ge=1, le=256)
    host: str = "127.0.0.1"
    port: int = Field(8732, ge=1, le=65535)

    _explicit: frozenset[str] = PrivateAttr(default_factory=frozenset)

    @field_validator("eps_grid", mode="before")
    @classmethod
    def _coerce_eps_grid(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_eps_grid(value)
        return value

    @field_validator("eps_grid")
    @classmethod
    def _check_eps_grid(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("eps grid is empty")
        if any(not (e > 0.0) or not math.isfinite(e) for e in value):
            raise ValueError("eps values must be positive and finite")
        if any(b >= a for a, b in zip(value, value[1:])):
            raise ValueError("eps grid must be strictly decreasing")
        return value

    @field_validator("mc_upto", mode="before")
    @classmethod
    def _coerce_mc_upto(cls, value: Any) -> Any:
        if isinstance(value, str):
            return _parse_eps_token(value)
        return value

    @property
    def explicit(self) -> frozenset[str]:
        return self._explicit

    @property
    def truncation(self) -> int:
        return 2**self.J if self.N is None else int(self.N)

    def build_spectrum(self, K: int | None = None) -> Spectrum:
        """Spectrum at K channels; K from a data file applies unless K was set explicitly."""
        channels = self.K if K is None or "K" in self._explicit else int(K)
        try:
            return spectrum_from_descriptor(self.spectrum, channels, trace_budget=self.trace_budget)
        except ConfigError as ex:
            raise UsageError("spectrum", str(ex)) from ex

    def build_divergent(self) -> DivergentSeq:
        try:
            return divergent_from_descriptor(self.divergent)
        except ConfigError as ex:
            raise UsageError("divergent", str(ex)) from ex

    def log_params(self) -> dict[str, Any]:
        keep = ("action", "alpha", "J", "N", "K", "seed", "M", "paths", "delta", "a", "input", "output", "center")
        data = self.model_dump(include=set(keep))
        data["spectrum"] = self.spectrum
        return {k: v for k, v in data.items() if v is not None}


def parse_eps_grid(text: str) -> list[float]:
    text = str(text).strip()
    m = _RANGE.match(text)
    if m:
        first, last = int(m.group(1)), int(m.group(2))
        step = 1 if last >= first else -1
        return [2.0**e for e in range(first, last + step, step)]
    return [_parse_eps_token(tok) for tok in text.split(",") if tok.strip()]


def load_defaults(path: Path | None = None) -> dict[str, Any]:
    defaults_path = resolve_path_safely(path or (Path(__file__).resolve().parents[1] / "config" / "defaults.json"))
    try:
        data = json.loads(defaults_path.read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("defaults must be a JSON object")
    except Exception:
        data = {}
    merged = dict(_FALLBACK_DEFAULTS)
    merged.update({k: v for k, v in data.items() if k in _FALLBACK_DEFAULTS})
    return merged


def parse_config(argv: list[str], config_file: str | Path | None = None) -> RunConfig:
    flags = vars(build_parser().parse_args(list(argv)))
    config_path = flags.pop("config", None) or config_file

    values = load_defaults()
    explicit: set[str] = set()
    if config_path:
        file_values = _read_config_file(config_path)
        values.update(file_values)
        explicit.update(file_values)
    for key in ("spectrum", "divergent"):
        if key in flags:
            flags[key] = _decode_json(key, flags[key])
    values.update(flags)
    explicit.update(flags)

    _resolve_channels(values, explicit)
    try:
        cfg = RunConfig(**values)
    except ValidationError as ex:
        err = ex.errors()[0]
        key = str(err["loc"][0]) if err.get("loc") else "config"
        raise UsageError(key, err.get("msg", "invalid value")) from ex
    cfg._explicit = frozenset(explicit)
    check_config(cfg)
    return cfg


def check_config(cfg: RunConfig) -> None:
    """Cross-field checks not expressible as single-field constraints."""
    actions = ACTIONS.get(cfg.command)
    if actions is not None and cfg.action not in actions:
        raise UsageError("action", f"{cfg.command} needs one of {', '.join(actions)}")
    if actions is None and cfg.action is not None:
        raise UsageError("action", f"{cfg.command} takes no action")

    try:
        validate_alpha(cfg.alpha, ldp=cfg.command in LDP_COMMANDS)
    except DomainError as ex:
        raise UsageError("alpha", str(ex)) from ex

    N = cfg.truncation
    if not is_power_of_two(N):
        raise UsageError("N", f"N={N} is not a power of two")
    if N > 2**cfg.J:
        raise UsageError("N", f"N={N} exceeds 2^J={2**cfg.J}")

    cfg.build_spectrum()
    if cfg.command == "tightness":
        cfg.build_divergent()


def require(cfg: RunConfig, *keys: str) -> None:
    """Inputs a command cannot run without; checked when the command executes."""
    for key in keys:
        if getattr(cfg, key) in (None, ""):
            raise UsageError(key, f"{cfg.command} needs --{_FLAG_NAMES.get(key, key)}")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError("argv", message)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    add = common.add_argument
    S = argparse.SUPPRESS
    add("--config", default=S, help="JSON config file")
    add("--alpha", type=float, default=S)
    add("--spectrum", default=S, help="inline JSON spectrum descriptor")
    add("--trace-budget", dest="trace_budget", type=float, default=S)
    add("--J", type=int, default=S)
    add("--N", type=int, default=S)
    add("--K", type=int, default=S)
    add("--seed", type=int, default=S)
    add("--M", type=int, default=S)
    add("--paths", type=int, default=S)
    add("--delta", type=float, default=S)
    add("--eps", dest="eps_grid", default=S, help="2^-3..2^-14 or a comma list")
    add("--mc-upto", dest="mc_upto", default=S)
    add("--a", type=float, default=S)
    add("--divergent", default=S, help="inline JSON divergent-sequence descriptor")
    add("--lam-bar", dest="lam_bar", type=float, default=S)
    add("--n", type=int, default=S)
    add("--t", type=float, default=S)
    add("--in", dest="input", default=S)
    add("--out", dest="output", default=S)
    add("--center", default=S)
    add("--format", choices=("json", "csv"), default=S)
    add("--log", dest="log_path", default=S)
    add("--workers", type=int, default=S)
    add("--host", default=S)
    add("--port", type=int, default=S)

    parser = _ArgumentParser(prog="schauder_ldp", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for command in COMMANDS:
        p = sub.add_parser(command, parents=[common])
        if command in ACTIONS:
            p.add_argument("action", choices=ACTIONS[command])
    return parser


def _resolve_channels(values: dict[str, Any], explicit: set[str]) -> None:
    descriptor = values.get("spectrum")
    if not isinstance(descriptor, dict):
        return
    k_desc = descriptor.get("K")
    if k_desc is None and descriptor.get("kind") == "explicit" and isinstance(descriptor.get("values"), list):
        k_desc = len(descriptor["values"])
    if k_desc is None:
        return
    if "K" in explicit and values.get("K") is not None and int(values["K"]) != int(k_desc):
        raise UsageError("K", f"spectrum K={k_desc} contradicts K={values['K']}")
    values["K"] = int(k_desc)
    explicit.add("K")


def _read_config_file(location: str | Path) -> dict[str, Any]:
    path = resolve_path_safely(Path(location))
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as ex:
        raise UsageError("config", f"cannot read {path}: {ex}") from ex
    except json.JSONDecodeError as ex:
        raise UsageError("config", f"{path} is not valid JSON: {ex}") from ex
    if not isinstance(data, dict):
        raise UsageError("config", f"{path} must hold a JSON object")
    data.pop("version", None)
    return data


def _decode_json(key: str, text: Any) -> Any:
    if not isinstance(text, str):
        return text
    try:
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise UsageError(key, f"not valid JSON: {ex}") from ex


def _parse_eps_token(token: str) -> float:
    token = token.strip()
    m = _POWER.match(token)
    if m:
        return 2.0 ** int(m.group(1))
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"cannot read eps value {token!r}") from None
