"""
Exponential-tightness certificates in coefficient space.

For a target rate a the compact set is the product over n of
c_n(alpha) * (closed ball of radius sqrt(a (n+1) / lam_bar) intersected with K_n),
K_n = {x : sum_k c_k x_k^2 <= beta a'_n} for a divergent weight sequence (c_k) with
sum c_k lambda_k finite. Constants come from the Gaussian concentration bound
P(|Z| >= t) <= c(Q) exp(-lambda(Q) t^2); the complement mass under sqrt(eps) W is then
at most (1 + c(Q)) e^{-a/eps} / (1 - e^{-a/eps}) for every eps in (0, 1].

The radii are r_n = c_n(alpha) sqrt(a (n+1) / lam_bar). Since c_n(alpha) ~ n^{alpha - 1/2}, r_n grows
like n^alpha and does not tend to 0; the complement bound above does not depend on it.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import special

from schauder_ldp.core.dyadic_basis import is_power_of_two, validate_alpha, weights
from schauder_ldp.core.qwiener import SimConfig, iter_coeff_batches
from schauder_ldp.core.spectrum import Spectrum, concentration_constants
from schauder_ldp.errors import ConfigError, DomainError


SERIES_TOL = 1e-17
SERIES_MAX_TERMS = 1_000_000


@dataclass(frozen=True)
class DivergentSeq:
    kind: str
    growth: float | None = None
    exponent: float | None = None

    def values(self, K: int) -> np.ndarray:
        k = np.arange(K, dtype=float)
        if self.kind == "geometric":
            return np.power(float(self.growth), k)
        return np.power(k + 1.0, float(self.exponent))

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "geometric":
            return {"kind": "geometric", "growth": self.growth}
        return {"kind": "power", "exponent": self.exponent}


@dataclass(frozen=True)
class TightSet:
    a: float
    alpha: float
    spec: Spectrum
    divergent: DivergentSeq
    lam_bar: float
    lam_bar_source: str
    radii: np.ndarray
    ellipsoid_weights: np.ndarray
    ellipsoid_levels: np.ndarray
    c_seq: np.ndarray
    beta: float
    c: float
    lam_q: float
    c_tilde: float
    tilde_trace: float

    @property
    def N(self) -> int:
        return int(self.radii.size)

    def bound(self, eps: float) -> float:
        x = math.exp(-self.a / eps)
        if x >= 1.0:
            return math.inf
        return (1.0 + self.c) * x / (1.0 - x)

    def to_dict(self) -> dict[str, Any]:
        return {
            "a": self.a,
            "alpha": self.alpha,
            "divergent": self.divergent.to_dict(),
            "lam_bar": self.lam_bar,
            "lam_bar_source": self.lam_bar_source,
            "radii": self.radii.tolist(),
            "ellipsoid_weights": self.ellipsoid_weights.tolist(),
            "ellipsoid_levels": self.ellipsoid_levels.tolist(),
            "beta": self.beta,
            "c": self.c,
            "lambda_q": self.lam_q,
            "c_tilde": self.c_tilde,
            "tilde_trace": self.tilde_trace,
        }


@dataclass(frozen=True)
class TightnessPoint:
    eps: float
    bound: float
    mass: float
    stderr: float
    status: str

    def to_dict(self) -> dict[str, Any]:
        return {"eps": self.eps, "bound": self.bound, "mass": self.mass, "stderr": self.stderr, "status": self.status}


@dataclass(frozen=True)
class TightnessReport:
    tight_set: TightSet
    points: tuple[TightnessPoint, ...]
    M: int

    @property
    def passed(self) -> bool:
        return all(p.status != "failed" for p in self.points)

    def to_dict(self) -> dict[str, Any]:
        meta = self.tight_set.to_dict()
        for key in ("radii", "ellipsoid_weights", "ellipsoid_levels"):
            meta.pop(key)
        return {"set": meta, "M": self.M, "passed": self.passed, "points": [p.to_dict() for p in self.points]}


def divergent_from_descriptor(descriptor: dict[str, Any]) -> DivergentSeq:
    kind = str(descriptor.get("kind") or "")
    if kind == "geometric":
        growth = float(descriptor.get("growth", math.sqrt(2.0)))
        if growth <= 1.0:
            raise ConfigError("divergent geometric growth must be > 1")
        return DivergentSeq(kind="geometric", growth=growth)
    if kind == "power":
        exponent = float(descriptor.get("exponent", 0.5))
        if exponent <= 0.0:
            raise ConfigError("divergent power exponent must be > 0")
        return DivergentSeq(kind="power", exponent=exponent)
    raise ConfigError(f"divergent sequence kind must be 'geometric' or 'power', got {kind!r}")


def tight_build(
    a: float,
    spec: Spectrum,
    divergent: DivergentSeq | dict[str, Any],
    *,
    alpha: float,
    N: int,
    lam_bar: float | None = None,
) -> TightSet:
    if isinstance(divergent, dict):
        divergent = divergent_from_descriptor(divergent)
    a = float(a)
    if not (a > 0.0):
        raise ConfigError(f"decay rate a must be positive, got {a}")
    alpha = validate_alpha(alpha, ldp=True)
    if not is_power_of_two(int(N)):
        raise DomainError(f"N must be a power of two, got {N}")
    if spec.lambda_max <= 0.0:
        raise ConfigError("tightness needs a nonzero spectrum")

    c, lam_q = concentration_constants(spec)
    tilde_trace, tilde_max = _tilde_series(spec, divergent)
    c_tilde = math.exp(tilde_trace / (2.0 * tilde_max))
    beta = 4.0 * tilde_max

    source = "configured"
    if lam_bar is None:
        lam_bar, source = lam_q, "concentration"
    if not (lam_bar > 0.0):
        raise ConfigError("scale lam_bar must be positive")

    n1 = np.arange(1, int(N) + 1, dtype=float)
    radii = weights(int(N), alpha) * np.sqrt(a * n1 / lam_bar)
    c_seq = divergent.values(spec.K)
    arrays = {
        "radii": radii,
        "ellipsoid_weights": np.sqrt(beta / c_seq),
        "ellipsoid_levels": n1 * a + math.log(c_tilde),
        "c_seq": c_seq,
    }
    for arr in arrays.values():
        arr.setflags(write=False)
    return TightSet(
        a=a,
        alpha=alpha,
        spec=spec,
        divergent=divergent,
        lam_bar=float(lam_bar),
        lam_bar_source=source,
        beta=beta,
        c=c,
        lam_q=lam_q,
        c_tilde=c_tilde,
        tilde_trace=tilde_trace,
        **arrays,
    )


def tight_check(tset: TightSet, eps_grid: list[float], cfg: SimConfig) -> TightnessReport:
    if cfg.N != tset.N or cfg.K != tset.spec.K:
        raise DomainError(f"simulation truncation (N={cfg.N}, K={cfg.K}) differs from the tight set")
    eps = np.array([float(e) for e in eps_grid])
    if eps.size == 0 or np.any(eps <= 0.0):
        raise DomainError("tightness needs positive eps values")

    w = weights(tset.N, tset.alpha)
    radius_sq = tset.radii**2
    level = tset.ellipsoid_levels
    outside = np.zeros(eps.size, dtype=np.int64)
    for batch in iter_coeff_batches(cfg):
        row_sq = np.sum(batch**2, axis=2)
        row_weighted = np.sum(batch**2 / tset.ellipsoid_weights**2, axis=2)
        for i, e in enumerate(eps):
            # scaled rows G_n = sqrt(eps) c_n Z_n against the scaled ball and ellipsoid
            ball_fail = e * (w**2) * row_sq > radius_sq
            ellipsoid_fail = e * row_weighted > level
            outside[i] += int(np.sum(np.any(ball_fail | ellipsoid_fail, axis=1)))

    M = cfg.paths
    points = []
    for i, e in enumerate(eps.tolist()):
        mass = outside[i] / M
        stderr = math.sqrt(mass * (1.0 - mass) / M)
        bound = tset.bound(e)
        if e > 1.0 or bound >= 1.0:
            status = "vacuous"
        elif mass <= bound + 3.0 * stderr:
            status = "passed"
        else:
            status = "failed"
        points.append(TightnessPoint(eps=e, bound=bound, mass=mass, stderr=stderr, status=status))
    return TightnessReport(tight_set=tset, points=tuple(points), M=M)


def _tilde_series(spec: Spectrum, divergent: DivergentSeq) -> tuple[float, float]:
    """(sum_k c_k lambda_k, max_k c_k lambda_k) over the extrapolated spectrum."""
    d = spec.decay
    if d.kind == "explicit":
        vals = np.array(d.values) * divergent.values(len(d.values))
        return float(vals.sum()), float(vals.max())

    if d.kind == "geometric" and divergent.kind == "geometric":
        rate = d.ratio * divergent.growth
        if rate >= 1.0:
            raise ConfigError(f"sum c_k lambda_k diverges: ratio {d.ratio} times growth {divergent.growth} >= 1")
        return d.lambda0 / (1.0 - rate), d.lambda0

    if d.kind == "power" and divergent.kind == "geometric":
        raise ConfigError("sum c_k lambda_k diverges: geometric weights against a power-law spectrum")

    if d.kind == "power":
        gap = d.exponent - divergent.exponent
        if gap <= 1.0:
            raise ConfigError(f"sum c_k lambda_k diverges: exponent gap {gap} <= 1")
        return d.lambda0 * float(special.zeta(gap, 1.0)), d.lambda0

    # geometric spectrum against power weights: sum numerically past the peak
    total = 0.0
    best = 0.0
    peak = divergent.exponent / max(-math.log(d.ratio), 1e-300)
    for k in range(SERIES_MAX_TERMS):
        term = d.lambda0 * d.ratio**k * (k + 1.0) ** divergent.exponent
        total += term
        best = max(best, term)
        if k > peak and term < SERIES_TOL * total:
            return total, best
    raise ConfigError("sum c_k lambda_k did not converge numerically")
