"""
Q-Wiener paths by the double Schauder series W(t) = sum_n phi_n(t) Z_n with
Z_n = (sqrt(lambda_k) N_{n,k})_k, plus Monte Carlo oracles for the covariance
identity, the increment law and the Gaussian log bound.
"""

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from schauder_ldp.core.ciesielski import CoeffMatrix, DyadicPath, inverse
from schauder_ldp.core.dyadic_basis import is_power_of_two, schauder_table, validate_alpha
from schauder_ldp.core.rng import standard_normal_batch, standard_normals
from schauder_ldp.core.spectrum import Spectrum
from schauder_ldp.errors import DomainError


BATCH_FLOATS = 2_000_000


@dataclass(frozen=True)
class SimConfig:
    spectrum: Spectrum
    J: int
    N: int | None = None
    seed: int = 42
    paths: int = 1
    alpha: float = 0.4
    workers: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        if int(self.J) < 0:
            raise DomainError(f"path level J must be >= 0, got {self.J}")
        N = 2 ** int(self.J) if self.N is None else int(self.N)
        if not is_power_of_two(N) or N > 2 ** int(self.J):
            raise DomainError(f"coefficient truncation N={N} must be a power of two <= 2^J")
        if int(self.paths) < 1:
            raise DomainError("sample count must be >= 1")
        validate_alpha(self.alpha)
        object.__setattr__(self, "N", N)

    @property
    def K(self) -> int:
        return self.spectrum.K

    @property
    def sqrt_lambdas(self) -> np.ndarray:
        return np.sqrt(self.spectrum.lambdas)


@dataclass(frozen=True)
class MomentReport:
    estimate: float
    target: float
    stderr: float
    M: int

    @property
    def z_score(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.estimate == self.target else math.inf
        return abs(self.estimate - self.target) / self.stderr

    def to_dict(self) -> dict[str, float | int]:
        return {"estimate": self.estimate, "target": self.target, "stderr": self.stderr, "M": self.M}


def gaussian_draws(cfg: SimConfig, path_index: int) -> np.ndarray:
    return standard_normals(cfg.seed, path_index, cfg.N, cfg.K)


def sample_coeffs(cfg: SimConfig, path_index: int) -> CoeffMatrix:
    raw = gaussian_draws(cfg, path_index) * cfg.sqrt_lambdas
    return CoeffMatrix.from_raw(raw, cfg.alpha)


def sample_path(cfg: SimConfig, path_index: int) -> DyadicPath:
    return inverse(sample_coeffs(cfg, path_index), cfg.J)


def eigen_series_path(cfg: SimConfig, path_index: int) -> DyadicPath:
    """sum_k sqrt(lambda_k) beta_k e_k with beta_k = sum_n phi_n N_{n,k}, sharing the draws."""
    beta = schauder_table(cfg.N, cfg.J) @ gaussian_draws(cfg, path_index)
    return DyadicPath(beta * cfg.sqrt_lambdas)


def sample_coeff_batch(cfg: SimConfig, start: int, count: int) -> np.ndarray:
    draws = standard_normal_batch(cfg.seed, start, count, cfg.N, cfg.K, workers=cfg.workers)
    return draws * cfg.sqrt_lambdas


def iter_coeff_batches(cfg: SimConfig, paths: int | None = None) -> Iterator[np.ndarray]:
    total = cfg.paths if paths is None else int(paths)
    size = max(1, BATCH_FLOATS // max(1, cfg.N * cfg.K))
    for start in range(0, total, size):
        yield sample_coeff_batch(cfg, start, min(size, total - start))


def covariance_check(cfg: SimConfig, v: np.ndarray, w: np.ndarray, s: float, t: float) -> MomentReport:
    v = _hvector(v, cfg.K)
    w = _hvector(w, cfg.K)
    if cfg.paths < 100:
        raise DomainError("covariance_check needs at least 100 paths")
    phi_t = _grid_row(cfg, t)
    phi_s = _grid_row(cfg, s)

    xs, ys = [], []
    for batch in iter_coeff_batches(cfg):
        xs.append(np.einsum("n,bnk,k->b", phi_t, batch, v))
        ys.append(np.einsum("n,bnk,k->b", phi_s, batch, w))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    prod = (x - x.mean()) * (y - y.mean())
    M = x.size
    target = min(s, t) * float(np.sum(cfg.spectrum.lambdas * v * w))
    return MomentReport(
        estimate=float(prod.sum() / (M - 1)),
        target=target,
        stderr=float(prod.std(ddof=1) / math.sqrt(M)),
        M=M,
    )


def increment_variance_check(cfg: SimConfig, s: float, t: float, channel: int) -> MomentReport:
    if not (0.0 <= s < t <= 1.0):
        raise DomainError("increment needs 0 <= s < t <= 1")
    if not (0 <= channel < cfg.K):
        raise DomainError(f"channel {channel} out of range 0..{cfg.K - 1}")
    dphi = _grid_row(cfg, t) - _grid_row(cfg, s)
    incs = np.concatenate([batch[:, :, channel] @ dphi for batch in iter_coeff_batches(cfg)])
    dev = (incs - incs.mean()) ** 2
    M = incs.size
    return MomentReport(
        estimate=float(incs.var(ddof=1)),
        target=(t - s) * float(cfg.spectrum.lambdas[channel]),
        stderr=float(dev.std(ddof=1) / math.sqrt(M)),
        M=M,
    )


def log_bound_stat(cfg: SimConfig) -> float:
    """sup over paths and 2 <= n < N of |Z_n|_H / sqrt(log n)."""
    if cfg.N < 3:
        raise DomainError("log bound statistic needs N >= 3 coefficients")
    scale = 1.0 / np.sqrt(np.log(np.arange(2, cfg.N, dtype=float)))
    best = 0.0
    for batch in iter_coeff_batches(cfg):
        norms = np.sqrt(np.sum(batch[:, 2:, :] ** 2, axis=2))
        best = max(best, float(np.max(norms * scale)))
    return best


def _grid_row(cfg: SimConfig, t: float) -> np.ndarray:
    pos = float(t) * 2**cfg.J
    if not (0.0 <= t <= 1.0) or pos != round(pos):
        raise DomainError(f"time {t} is not a level-{cfg.J} grid point")
    return np.asarray(schauder_table(cfg.N, cfg.J)[int(round(pos))])


def _hvector(u: np.ndarray, K: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (K,):
        raise DomainError(f"H vector must have length {K}, got shape {u.shape}")
    return u
