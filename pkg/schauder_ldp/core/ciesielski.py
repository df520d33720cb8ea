"""
Forward and inverse Ciesielski transform for multichannel dyadic paths.

A path at level J is known on the grid j / 2^J; its Haar coefficients for n < 2^J
only involve grid values, so the transform pair is exact on that grid. Sequence
norms come in two shapes: row H-norms (isomorphism codomain) and the component
sup (coefficient balls).
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from schauder_ldp.core.dyadic_basis import (
    dyadic_grid,
    is_power_of_two,
    log2_exact,
    schauder_table,
    validate_alpha,
    weights,
)
from schauder_ldp.core.spectrum import project
from schauder_ldp.errors import DomainError


EXHAUSTIVE_MAX_LEVEL = 7


@dataclass(frozen=True)
class DyadicPath:
    samples: np.ndarray

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[:, None]
        if samples.ndim != 2 or not is_power_of_two(samples.shape[0] - 1):
            raise DomainError(f"path needs 2^J + 1 rows, got shape {samples.shape}")
        if samples.shape[1] < 1:
            raise DomainError("path needs at least one channel")
        if not np.all(np.isfinite(samples)):
            raise DomainError("path samples must be finite")
        if np.any(samples[0] != 0.0):
            raise DomainError("path must start at 0")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def J(self) -> int:
        return log2_exact(self.samples.shape[0] - 1)

    @property
    def K(self) -> int:
        return int(self.samples.shape[1])

    @property
    def grid(self) -> np.ndarray:
        return dyadic_grid(self.J)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], J: int) -> "DyadicPath":
        values = np.asarray(fn(dyadic_grid(J)), dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        return cls(values - values[0])


@dataclass(frozen=True)
class CoeffMatrix:
    raw: np.ndarray
    alpha: float
    scaled: np.ndarray

    @property
    def N(self) -> int:
        return int(self.raw.shape[0])

    @property
    def K(self) -> int:
        return int(self.raw.shape[1])

    @classmethod
    def from_raw(cls, raw: np.ndarray, alpha: float) -> "CoeffMatrix":
        raw = _coeff_array(raw)
        alpha = validate_alpha(alpha)
        scaled = weights(raw.shape[0], alpha)[:, None] * raw
        return cls._frozen(raw, alpha, scaled)

    @classmethod
    def from_scaled(cls, scaled: np.ndarray, alpha: float) -> "CoeffMatrix":
        scaled = _coeff_array(scaled)
        alpha = validate_alpha(alpha)
        raw = scaled / weights(scaled.shape[0], alpha)[:, None]
        return cls._frozen(raw, alpha, scaled)

    @classmethod
    def _frozen(cls, raw: np.ndarray, alpha: float, scaled: np.ndarray) -> "CoeffMatrix":
        raw = np.array(raw, dtype=float)
        scaled = np.array(scaled, dtype=float)
        raw.setflags(write=False)
        scaled.setflags(write=False)
        return cls(raw=raw, alpha=alpha, scaled=scaled)


@dataclass(frozen=True)
class HolderEstimate:
    value: float
    strategy: str
    pairs: int

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "strategy": self.strategy, "pairs": self.pairs}


def forward(path: DyadicPath, alpha: float) -> CoeffMatrix:
    F = path.samples
    J = path.J
    N = 2**J
    raw = np.empty((N, path.K))
    raw[0] = F[N] - F[0]
    for k in range(J):
        step = 2 ** (J - k - 1)
        left = F[0:N:2 * step]
        mid = F[step:N:2 * step]
        right = F[2 * step:N + 1:2 * step]
        raw[2**k:2 ** (k + 1)] = math.sqrt(2.0**k) * (2.0 * mid - right - left)
    return CoeffMatrix.from_raw(raw, alpha)


def inverse(coeffs: CoeffMatrix, J_out: int | None = None) -> DyadicPath:
    J_min = log2_exact(coeffs.N)
    if J_out is None:
        J_out = J_min
    if int(J_out) < J_min:
        raise DomainError(f"J_out={J_out} is too small for N={coeffs.N} coefficients (need >= {J_min})")
    table = schauder_table(coeffs.N, int(J_out))
    return DyadicPath(table @ coeffs.raw)


def seq_norm_h(coeffs: CoeffMatrix) -> float:
    return float(np.max(np.linalg.norm(coeffs.scaled, axis=1)))


def seq_norm_comp(coeffs: CoeffMatrix) -> float:
    return float(np.max(np.abs(coeffs.scaled)))


def dyadic_holder(path: DyadicPath, alpha: float) -> HolderEstimate:
    alpha = validate_alpha(alpha)
    if path.J <= EXHAUSTIVE_MAX_LEVEL:
        return _holder_exhaustive(path, alpha)
    return _holder_dyadic_pairs(path, alpha)


def project_path(path: DyadicPath, k: int, which: str = "head") -> DyadicPath:
    return DyadicPath(project(path.samples, k, which))


def truncate(coeffs: CoeffMatrix, N_keep: int) -> CoeffMatrix:
    if not is_power_of_two(int(N_keep)) or N_keep > coeffs.N:
        raise DomainError(f"N_keep must be a power of two <= {coeffs.N}, got {N_keep}")
    return CoeffMatrix._frozen(coeffs.raw[:N_keep], coeffs.alpha, coeffs.scaled[:N_keep])


def schauder_tail_bound(holder: float, alpha: float, N: int) -> float:
    """Uniform-norm bound on the Schauder series remainder beyond the first N terms."""
    alpha = validate_alpha(alpha)
    level = log2_exact(N)
    return holder * 2.0 ** (-alpha * (level + 1)) / (1.0 - 2.0 ** (-alpha))


def holder_constant(alpha: float) -> float:
    alpha = validate_alpha(alpha)
    return 2.0 / ((2.0**alpha - 1.0) * (2.0 ** (1.0 - alpha) - 1.0))


def _holder_exhaustive(path: DyadicPath, alpha: float) -> HolderEstimate:
    F = path.samples
    t = path.grid
    i, j = np.triu_indices(t.size, k=1)
    dist = np.linalg.norm(F[j] - F[i], axis=1)
    quot = dist / (t[j] - t[i]) ** alpha
    return HolderEstimate(value=float(quot.max()) if quot.size else 0.0, strategy="exhaustive", pairs=int(i.size))


def _holder_dyadic_pairs(path: DyadicPath, alpha: float) -> HolderEstimate:
    # pairs (i h, (i+1) h) and (i h, (i+2) h) for every scale h = 2^-m
    F = path.samples
    J = path.J
    N = 2**J
    best = 0.0
    pairs = 0
    for m in range(J + 1):
        step = 2 ** (J - m)
        h = 2.0 ** (-m)
        for width in (1, 2):
            span = width * step
            if span > N:
                continue
            diffs = F[span:N + 1:step] - F[0:N + 1 - span:step]
            norms = np.linalg.norm(diffs, axis=1)
            best = max(best, float(norms.max()) / (width * h) ** alpha)
            pairs += int(norms.size)
    return HolderEstimate(value=best, strategy="dyadic_pairs", pairs=pairs)


def _coeff_array(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or not is_power_of_two(arr.shape[0]) or arr.shape[1] < 1:
        raise DomainError(f"coefficient matrix needs N = 2^J rows and K >= 1 columns, got shape {arr.shape}")
    return arr
