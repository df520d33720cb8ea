"""
Small-noise probabilities of coefficient-sup balls.

A ball U(F, delta) holds every G whose scaled coefficients satisfy
|G_{k,n} - F_{k,n}| < delta for all (k, n). Under the law of sqrt(eps) W the scaled
coefficients are independent N(0, c_n^2 eps lambda_k), so the ball probability is an
exact product of one-dimensional Gaussian interval probabilities. The product is
evaluated at truncation (N, K); omitted factors are bounded through the spectrum's
decay law and reported as tail_bound, so the true log-probability lies in
[logp - tail_bound, logp].
"""

import math
import sys
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from schauder_ldp.core.ciesielski import CoeffMatrix
from schauder_ldp.core.dyadic_basis import log2_exact, validate_alpha, weights
from schauder_ldp.core.gaussian import log_interval_prob, log_neg_log_central
from schauder_ldp.core.qwiener import SimConfig, iter_coeff_batches
from schauder_ldp.core.spectrum import Spectrum
from schauder_ldp.errors import ConfigError, DomainError, RefusedError


MIN_EXPECTED_HITS = 25.0
NEGLIGIBLE_LOG = 50.0
LEVEL_CHUNK = 64
CHANNEL_CHUNK = 256
MAX_LEVELS = 1 << 20
MAX_CHANNELS = 1 << 20
_LOG_FLOAT_MAX = math.log(sys.float_info.max)


class LambdaClass(IntEnum):
    OUTSIDE = 1  # |F| > delta: 0 not in the closed interval
    BOUNDARY = 2  # |F| = delta
    DEEP = 3  # |F| <= delta / 2
    INSIDE = 4  # delta / 2 < |F| < delta


@dataclass(frozen=True)
class BallSpec:
    center: CoeffMatrix
    delta: float
    spec: Spectrum

    def __post_init__(self) -> None:
        if not (self.delta > 0.0) or not math.isfinite(self.delta):
            raise DomainError(f"ball radius delta must be positive, got {self.delta}")
        validate_alpha(self.center.alpha, ldp=True)
        if self.center.K != self.spec.K:
            raise DomainError(f"center has {self.center.K} channels but spectrum has K={self.spec.K}")

    @property
    def alpha(self) -> float:
        return self.center.alpha

    @property
    def N(self) -> int:
        return self.center.N

    @property
    def K(self) -> int:
        return self.center.K


@dataclass(frozen=True)
class LambdaPartition:
    classes: np.ndarray
    counts: dict[str, int]
    outside_deep: int

    def to_dict(self) -> dict[str, object]:
        return {"counts": dict(self.counts), "outside_deep": self.outside_deep}


@dataclass(frozen=True)
class BallInfimum:
    value: float
    shrunk: np.ndarray

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "finite": math.isfinite(self.value), "shrunk": self.shrunk.tolist()}


@dataclass(frozen=True)
class ExactLogProb:
    eps: float
    logp: float
    tail_bound: float

    @property
    def lower(self) -> float:
        return self.logp - self.tail_bound

    def to_dict(self) -> dict[str, float]:
        return {"eps": self.eps, "logp": self.logp, "tail_bound": self.tail_bound, "lower": self.lower}


@dataclass(frozen=True)
class MonteCarloEstimate:
    p_hat: float
    stderr: float
    hits: int
    M: int

    def to_dict(self) -> dict[str, float | int]:
        return {"p_hat": self.p_hat, "stderr": self.stderr, "hits": self.hits, "M": self.M}


@dataclass(frozen=True)
class LDPPoint:
    eps: float
    logp: float
    tail_bound: float
    mc: MonteCarloEstimate | None = None

    @property
    def eps_logp(self) -> float:
        return self.eps * self.logp

    def to_dict(self) -> dict[str, object]:
        return {
            "eps": self.eps,
            "logp": self.logp,
            "tail_bound": self.tail_bound,
            "eps_logp": self.eps_logp,
            "mc": self.mc.to_dict() if self.mc else None,
        }


@dataclass(frozen=True)
class LDPCurve:
    target: float
    points: tuple[LDPPoint, ...]
    mc_refused: tuple[float, ...] = field(default=())

    @property
    def eps_grid(self) -> list[float]:
        return [p.eps for p in self.points]

    @property
    def eps_logp(self) -> list[float]:
        return [p.eps_logp for p in self.points]

    def to_dict(self) -> dict[str, object]:
        return {
            "target": self.target,
            "points": [p.to_dict() for p in self.points],
            "mc_refused": list(self.mc_refused),
        }

    def csv_rows(self) -> list[list[float | None]]:
        rows: list[list[float | None]] = []
        for p in self.points:
            rows.append([
                p.eps,
                p.logp,
                p.tail_bound,
                p.eps_logp,
                p.mc.p_hat if p.mc else None,
                p.mc.stderr if p.mc else None,
            ])
        return rows


CURVE_CSV_HEADER = ["eps", "logp", "tail_bound", "eps_logp", "mc_p", "mc_stderr"]


def classify(ball: BallSpec) -> LambdaPartition:
    F = np.abs(ball.center.scaled)
    delta = ball.delta
    classes = np.full(F.shape, int(LambdaClass.INSIDE), dtype=np.int8)
    classes[F <= delta / 2.0] = int(LambdaClass.DEEP)
    classes[F == delta] = int(LambdaClass.BOUNDARY)
    classes[F > delta] = int(LambdaClass.OUTSIDE)
    counts = {cls.name.lower(): int(np.sum(classes == int(cls))) for cls in LambdaClass}
    return LambdaPartition(classes=classes, counts=counts, outside_deep=int(np.sum(classes != int(LambdaClass.DEEP))))


def ball_infimum(ball: BallSpec) -> BallInfimum:
    """Closed-form inf of the rate over the ball via coordinatewise shrinkage F -> F -/+ delta."""
    F = ball.center.scaled
    shrunk = np.sign(F) * np.maximum(np.abs(F) - ball.delta, 0.0)
    c2 = weights(ball.N, ball.alpha)[:, None] ** 2
    lam = ball.spec.lambdas[None, :]
    num = shrunk**2
    if np.any((lam == 0.0) & (num > 0.0)):
        value = math.inf
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(num > 0.0, num / (2.0 * c2 * lam), 0.0)
        value = float(math.fsum(terms.ravel().tolist()))
    shrunk.setflags(write=False)
    return BallInfimum(value=value, shrunk=shrunk)


def exact_log_prob(ball: BallSpec, eps: float) -> ExactLogProb:
    eps = _check_eps(eps)
    logs = _log_factors(ball, eps)
    logp = -math.inf if np.any(np.isneginf(logs)) else float(math.fsum(logs.ravel().tolist()))
    tail = truncation_tail_bound(ball.spec, ball.alpha, ball.delta, eps, ball.N, ball.K)
    return ExactLogProb(eps=eps, logp=min(logp, 0.0), tail_bound=tail)


def truncation_tail_bound(spec: Spectrum, alpha: float, delta: float, eps: float, N: int, K: int | None = None) -> float:
    """Bound on -log of the omitted factors P(|c_n sqrt(eps lambda_k) Z| < delta)."""
    K = spec.K if K is None else int(K)
    first_level = log2_exact(N)
    lam = np.array([spec.eigenvalue(k) for k in range(K)])
    live = lam > 0.0
    parts = []
    if np.any(live):
        parts.append(_log_level_sums(delta / np.sqrt(eps * lam[live]), alpha, first_level))
    parts.append(np.array([_log_channel_tail(spec, alpha, delta, eps, K)]))
    total = float(np.logaddexp.reduce(np.concatenate(parts)))
    if total > _LOG_FLOAT_MAX:
        return math.inf
    return math.exp(total) if math.isfinite(total) else 0.0


def mc_prob(ball: BallSpec, eps: float, cfg: SimConfig) -> MonteCarloEstimate:
    eps = _check_eps(eps)
    if cfg.N != ball.N or cfg.K != ball.K:
        raise DomainError(f"simulation truncation (N={cfg.N}, K={cfg.K}) differs from ball (N={ball.N}, K={ball.K})")
    pre = exact_log_prob(ball, eps)
    expected = math.exp(pre.logp) * cfg.paths
    if expected < MIN_EXPECTED_HITS:
        raise RefusedError(f"expected {expected:.3g} hits is below {MIN_EXPECTED_HITS:g}; use exact method")

    scale = math.sqrt(eps) * weights(ball.N, ball.alpha)[:, None]
    F = ball.center.scaled
    hits = 0
    for batch in iter_coeff_batches(cfg):
        dev = np.abs(batch * scale - F)
        hits += int(np.sum(dev.reshape(dev.shape[0], -1).max(axis=1) < ball.delta))
    M = cfg.paths
    p_hat = hits / M
    return MonteCarloEstimate(p_hat=p_hat, stderr=math.sqrt(p_hat * (1.0 - p_hat) / M), hits=hits, M=M)


def ldp_curve(
    ball: BallSpec,
    eps_grid: list[float],
    with_mc: bool = False,
    cfg: SimConfig | None = None,
    *,
    mc_upto: float | None = None,
) -> LDPCurve:
    grid = [_check_eps(e) for e in eps_grid]
    if any(b >= a for a, b in zip(grid, grid[1:])):
        raise DomainError("eps_grid must be strictly decreasing")
    target = -ball_infimum(ball).value

    points = []
    refused = []
    for eps in grid:
        exact = exact_log_prob(ball, eps)
        mc = None
        if with_mc and cfg is not None and (mc_upto is None or eps >= mc_upto):
            try:
                mc = mc_prob(ball, eps, cfg)
            except RefusedError:
                refused.append(eps)
        points.append(LDPPoint(eps=eps, logp=exact.logp, tail_bound=exact.tail_bound, mc=mc))
    return LDPCurve(target=target, points=tuple(points), mc_refused=tuple(refused))


def convergence_summary(curve: LDPCurve, from_index: int = 0) -> dict[str, object]:
    errors = [abs(p.eps_logp - curve.target) for p in curve.points[from_index:]]
    monotone = all(b <= a + 1e-15 for a, b in zip(errors, errors[1:]))
    last = curve.points[-1].eps_logp if curve.points else math.nan
    if curve.target == 0.0:
        rel = abs(last)
    else:
        rel = abs(last - curve.target) / abs(curve.target)
    return {"target": curve.target, "final_eps_logp": last, "relative_error": rel, "monotone": monotone}


def scalar_gaussian_limit(lo: float, hi: float) -> float:
    """lim eps log P(sqrt(eps) Z in (lo, hi)) = -inf_{x in (lo, hi)} x^2 / 2."""
    if lo >= hi:
        return -math.inf
    if lo < 0.0 < hi:
        return 0.0
    return -min(lo * lo, hi * hi) / 2.0


def _log_factors(ball: BallSpec, eps: float) -> np.ndarray:
    F = ball.center.scaled
    sigma = weights(ball.N, ball.alpha)[:, None] * np.sqrt(eps * ball.spec.lambdas)[None, :]
    out = np.empty(F.shape)
    degenerate = sigma == 0.0
    # point mass at 0: the factor is 1 when 0 lies in the open interval, else 0
    out[degenerate] = np.where(np.abs(F[degenerate]) < ball.delta, 0.0, -np.inf)
    live = ~degenerate
    out[live] = log_interval_prob((F[live] - ball.delta) / sigma[live], (F[live] + ball.delta) / sigma[live])
    return out


def _level_weights(levels: np.ndarray, alpha: float) -> np.ndarray:
    return np.power(2.0, levels * (alpha - 0.5) + alpha - 1.0)


def _log_level_sums(u_scale: np.ndarray, alpha: float, first_level: int) -> np.ndarray:
    """Per row: log sum_{j >= first_level} 2^j g(u_scale / c_j), g(u) = -log P(|Z| < u)."""
    u_scale = np.asarray(u_scale, dtype=float)
    total = np.full(u_scale.shape, -np.inf)
    level = first_level
    while True:
        levels = np.arange(level, level + LEVEL_CHUNK, dtype=float)
        u = u_scale[:, None] / _level_weights(levels, alpha)[None, :]
        terms = levels[None, :] * math.log(2.0) + log_neg_log_central(u)
        total = np.logaddexp(total, np.logaddexp.reduce(terms, axis=1))
        level += LEVEL_CHUNK
        negligible = terms.max(axis=1) < total - NEGLIGIBLE_LOG
        decreasing = terms[:, -1] < terms[:, -2]
        if np.all((negligible & decreasing) | np.isneginf(terms[:, -1])):
            return total
        if level - first_level > MAX_LEVELS:
            raise ConfigError("truncation tail series over levels did not converge")


def _log_channel_tail(spec: Spectrum, alpha: float, delta: float, eps: float, K: int) -> float:
    """log of the omitted-channel part: every index n of every channel k >= K."""
    if spec.decay.kind == "explicit":
        lam = np.array([spec.eigenvalue(k) for k in range(K, len(spec.decay.values))])
        return _log_channels(lam[lam > 0.0], alpha, delta, eps)

    total = -math.inf
    start = K
    previous = math.inf
    while True:
        lam = np.array([spec.eigenvalue(k) for k in range(start, start + CHANNEL_CHUNK)])
        chunk = _log_channel_terms(lam, alpha, delta, eps)
        total = float(np.logaddexp(total, np.logaddexp.reduce(chunk)))
        start += CHANNEL_CHUNK
        if np.all(np.isneginf(chunk)):
            return total
        if chunk.max() < total - NEGLIGIBLE_LOG and chunk[-1] <= previous:
            return total
        previous = float(chunk[-1])
        if start - K > MAX_CHANNELS:
            raise ConfigError("truncation tail series over channels did not converge")


def _log_channels(lam: np.ndarray, alpha: float, delta: float, eps: float) -> float:
    if lam.size == 0:
        return -math.inf
    return float(np.logaddexp.reduce(_log_channel_terms(lam, alpha, delta, eps)))


def _log_channel_terms(lam: np.ndarray, alpha: float, delta: float, eps: float) -> np.ndarray:
    out = np.full(lam.shape, -np.inf)
    live = lam > 0.0
    if np.any(live):
        u_scale = delta / np.sqrt(eps * lam[live])
        constant = log_neg_log_central(u_scale)  # n = 0, c_0 = 1
        out[live] = np.logaddexp(constant, _log_level_sums(u_scale, alpha, 0))
    return out


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (eps > 0.0) or not math.isfinite(eps):
        raise DomainError(f"noise level eps must be positive, got {eps}")
    return eps
