"""
Diagonal trace-class covariance operators Q at finite channel truncation K.

Vectors of H are represented by their first K coordinates in the eigenbasis (e_k).
Zero eigenvalues are allowed; the H_0 energy then follows c/0 = inf, 0/0 = 0.
"""

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import special

from schauder_ldp.errors import ConfigError, DomainError


DECAY_KINDS = ("geometric", "power", "explicit")


@dataclass(frozen=True)
class DecaySpec:
    kind: str
    lambda0: float = 1.0
    ratio: float | None = None
    exponent: float | None = None
    values: tuple[float, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "geometric":
            return {"kind": "geometric", "lambda0": self.lambda0, "ratio": self.ratio}
        if self.kind == "power":
            return {"kind": "power", "lambda0": self.lambda0, "exponent": self.exponent}
        return {"kind": "explicit", "values": list(self.values)}


@dataclass(frozen=True)
class Spectrum:
    lambdas: np.ndarray
    decay: DecaySpec
    trace: float
    full_trace: float
    trace_budget: float | None = field(default=None)

    @property
    def K(self) -> int:
        return int(self.lambdas.size)

    @property
    def lambda_max(self) -> float:
        return float(self.lambdas.max()) if self.lambdas.size else 0.0

    def eigenvalue(self, k: int) -> float:
        if 0 <= k < self.K:
            return float(self.lambdas[k])
        return _law_value(self.decay, k)

    def scaled(self, c: float) -> "Spectrum":
        if c < 0:
            raise ConfigError("spectrum scale must be nonnegative")
        d = self.decay
        if d.kind == "explicit":
            decay = DecaySpec(kind="explicit", values=tuple(float(v) * c for v in d.values))
        else:
            decay = DecaySpec(kind=d.kind, lambda0=d.lambda0 * c, ratio=d.ratio, exponent=d.exponent)
        return _build(decay, self.K, None)

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.decay.to_dict(),
            "K": self.K,
            "lambdas": self.lambdas.tolist(),
            "trace": self.trace,
            "full_trace": self.full_trace,
        }


def make_spectrum(decay_spec: DecaySpec | dict[str, Any], K: int, *, trace_budget: float | None = None) -> Spectrum:
    if isinstance(decay_spec, dict):
        decay_spec = _decay_from_dict(decay_spec)
    if int(K) < 1:
        raise ConfigError(f"channel count K must be >= 1, got {K}")
    return _build(decay_spec, int(K), trace_budget)


def spectrum_from_descriptor(descriptor: dict[str, Any], K: int | None = None, **kwargs: Any) -> Spectrum:
    d = dict(descriptor)
    k_desc = d.pop("K", None)
    if K is None:
        K = k_desc
    elif k_desc is not None and int(k_desc) != int(K):
        raise ConfigError(f"spectrum K={k_desc} contradicts K={K}")
    if K is None:
        values = d.get("values")
        K = len(values) if isinstance(values, list) else None
    if K is None:
        raise ConfigError("spectrum descriptor needs K")
    return make_spectrum(d, int(K), **kwargs)


def h0_energy(u: np.ndarray, spec: Spectrum) -> float:
    u = _as_hvector(u, spec.K)
    lam = spec.lambdas
    sq = u * u
    if np.any((lam == 0.0) & (sq > 0.0)):
        return math.inf
    mask = lam > 0.0
    return float(np.sum(sq[mask] / lam[mask]))


def project(v: np.ndarray, k: int, which: str = "head") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    K = v.shape[-1]
    if not (0 <= int(k) <= K):
        raise DomainError(f"cutoff {k} out of range 0..{K}")
    out = np.array(v, dtype=float, copy=True)
    if which == "head":
        out[..., int(k):] = 0.0
    elif which == "tail":
        out[..., : int(k)] = 0.0
    else:
        raise DomainError(f"projection must be 'head' or 'tail', got {which!r}")
    return out


def concentration_constants(spec: Spectrum) -> tuple[float, float]:
    """(c, lam) with P(|Z| >= t) <= c exp(-lam t^2) for Z ~ N(0, Q)."""
    lam_max = max(spec.lambda_max, _law_sup(spec))
    if lam_max <= 0.0:
        return 1.0, math.inf
    return math.exp(spec.full_trace / (2.0 * lam_max)), 1.0 / (4.0 * lam_max)


def _build(decay: DecaySpec, K: int, trace_budget: float | None) -> Spectrum:
    lambdas = np.array([_law_value(decay, k) for k in range(K)], dtype=float)
    if np.any(lambdas < 0.0) or not np.all(np.isfinite(lambdas)):
        raise ConfigError("eigenvalues must be finite and nonnegative")
    trace = float(lambdas.sum())
    full = _full_trace(decay, trace)
    if trace_budget is not None and full > float(trace_budget):
        raise ConfigError(f"extrapolated trace {full} exceeds budget {trace_budget}")
    lambdas.setflags(write=False)
    return Spectrum(lambdas=lambdas, decay=decay, trace=trace, full_trace=full, trace_budget=trace_budget)


def _decay_from_dict(d: dict[str, Any]) -> DecaySpec:
    kind = str(d.get("kind") or "")
    allowed = {
        "geometric": {"kind", "lambda0", "ratio"},
        "power": {"kind", "lambda0", "exponent"},
        "explicit": {"kind", "values"},
    }
    if kind not in allowed:
        raise ConfigError(f"spectrum kind must be one of {DECAY_KINDS}, got {kind!r}")
    unknown = set(d) - allowed[kind]
    if unknown:
        raise ConfigError(f"unknown spectrum keys: {sorted(unknown)}")

    if kind == "geometric":
        lambda0 = float(d.get("lambda0", 0.5))
        ratio = float(d.get("ratio", 0.5))
        if lambda0 <= 0.0:
            raise ConfigError("geometric spectrum needs lambda0 > 0")
        if not (0.0 < ratio < 1.0):
            raise ConfigError("geometric ratio must lie in (0, 1)")
        return DecaySpec(kind="geometric", lambda0=lambda0, ratio=ratio)

    if kind == "power":
        lambda0 = float(d.get("lambda0", 1.0))
        exponent = float(d.get("exponent", 2.0))
        if lambda0 <= 0.0:
            raise ConfigError("power spectrum needs lambda0 > 0")
        if exponent <= 1.0:
            raise ConfigError("power exponent must be > 1 for a finite trace")
        return DecaySpec(kind="power", lambda0=lambda0, exponent=exponent)

    values = d.get("values")
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigError("explicit spectrum needs a nonempty 'values' list")
    vals = tuple(float(v) for v in values)
    if any(v < 0.0 for v in vals):
        raise ConfigError("explicit eigenvalues must be nonnegative")
    return DecaySpec(kind="explicit", values=vals)


def _law_value(decay: DecaySpec, k: int) -> float:
    if decay.kind == "geometric":
        return decay.lambda0 * decay.ratio**k
    if decay.kind == "power":
        return decay.lambda0 * (k + 1.0) ** (-decay.exponent)
    return decay.values[k] if k < len(decay.values) else 0.0


def _law_sup(spec: Spectrum) -> float:
    if spec.decay.kind == "explicit":
        return max(spec.decay.values)
    # decreasing laws: nothing beyond K exceeds lambda_K
    return spec.eigenvalue(spec.K)


def _full_trace(decay: DecaySpec, truncated: float) -> float:
    if decay.kind == "geometric":
        return decay.lambda0 / (1.0 - decay.ratio)
    if decay.kind == "power":
        return decay.lambda0 * float(special.zeta(decay.exponent, 1.0))
    return max(truncated, float(sum(decay.values)))


def _as_hvector(u: np.ndarray, K: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (K,):
        raise DomainError(f"H vector must have length {K}, got shape {u.shape}")
    return u
