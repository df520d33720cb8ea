"""
Cameron-Martin rate functions.

The scalar rate is I~(f) = 1/2 int |f'|^2 (the factor 1/2 included); the H-valued rate
decomposes channelwise as I(F) = sum_k I~(<F, e_k>) / lambda_k with c/0 = inf and
0/0 = 0. A sampled path stands for its level-J piecewise-linear interpolant.
"""

import math
from dataclasses import dataclass

import numpy as np

from schauder_ldp.core.ciesielski import CoeffMatrix, DyadicPath
from schauder_ldp.core.dyadic_basis import is_power_of_two, log2_exact
from schauder_ldp.core.spectrum import Spectrum, h0_energy
from schauder_ldp.errors import DomainError


@dataclass(frozen=True)
class RateValue:
    value: float
    per_channel: tuple[float, ...]

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)

    def to_dict(self) -> dict[str, object]:
        return {"value": self.value, "per_channel": list(self.per_channel), "finite": self.finite}


def rate_scalar_coeffs(raw: np.ndarray) -> float:
    a = np.asarray(raw, dtype=float).ravel()
    return 0.5 * float(np.dot(a, a))


def rate_scalar_fd(samples: np.ndarray, J: int | None = None) -> float:
    f = np.asarray(samples, dtype=float).ravel()
    if not is_power_of_two(f.size - 1):
        raise DomainError(f"scalar path needs 2^J + 1 samples, got {f.size}")
    level = log2_exact(f.size - 1)
    if J is not None and int(J) != level:
        raise DomainError(f"sample count {f.size} does not match level J={J}")
    d = np.diff(f)
    return 0.5 * float(np.dot(d, d)) * 2.0**level


def rate_total(coeffs: CoeffMatrix, spec: Spectrum) -> RateValue:
    if coeffs.K != spec.K:
        raise DomainError(f"coefficient channels {coeffs.K} do not match spectrum K={spec.K}")
    scalar = 0.5 * np.sum(coeffs.raw**2, axis=0)
    return _combine(scalar, spec.lambdas)


def rate_path(path: DyadicPath, spec: Spectrum) -> RateValue:
    if path.K != spec.K:
        raise DomainError(f"path channels {path.K} do not match spectrum K={spec.K}")
    scalar = np.array([rate_scalar_fd(path.samples[:, k]) for k in range(path.K)])
    return _combine(scalar, spec.lambdas)


def rate_path_energy(path: DyadicPath, spec: Spectrum) -> float:
    """1/2 sum_j |Delta F_j|_{H_0}^2 2^J, evaluated increment by increment."""
    if path.K != spec.K:
        raise DomainError(f"path channels {path.K} do not match spectrum K={spec.K}")
    total = 0.0
    for inc in np.diff(path.samples, axis=0):
        energy = h0_energy(inc, spec)
        if math.isinf(energy):
            return math.inf
        total += energy
    return 0.5 * total * 2.0**path.J


def _combine(scalar: np.ndarray, lambdas: np.ndarray) -> RateValue:
    per = []
    for value, lam in zip(scalar.tolist(), lambdas.tolist()):
        if lam > 0.0:
            per.append(value / lam)
        else:
            per.append(math.inf if value > 0.0 else 0.0)
    return RateValue(value=float(math.fsum(per)) if all(map(math.isfinite, per)) else math.inf, per_channel=tuple(per))
