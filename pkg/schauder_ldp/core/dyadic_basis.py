"""
Haar and Schauder functions on [0,1] and the Ciesielski weights c_n(alpha).

Index convention: n = 2^k + l with level k >= 0 and shift 0 <= l <= 2^k - 1;
n = 0 is the constant Haar function (chi_0 = 1, phi_0(t) = t).
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from schauder_ldp.errors import DomainError


@dataclass(frozen=True)
class BasisIndex:
    n: int
    k: int | None
    l: int | None


def validate_alpha(alpha: float, *, ldp: bool = False) -> float:
    alpha = float(alpha)
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if ldp and alpha >= 0.5:
        raise DomainError("alpha must be < 1/2 for LDP commands")
    return alpha


def split_index(n: int) -> tuple[int, int]:
    n = int(n)
    if n == 0:
        raise DomainError("constant index has no dyadic decomposition")
    if n < 0:
        raise DomainError(f"basis index must be nonnegative, got {n}")
    k = n.bit_length() - 1
    return k, n - (1 << k)


def index_info(n: int) -> BasisIndex:
    if int(n) == 0:
        return BasisIndex(n=0, k=None, l=None)
    k, l = split_index(n)
    return BasisIndex(n=int(n), k=k, l=l)


def haar_eval(n: int, t: float) -> float:
    _check_unit_interval(t)
    if int(n) == 0:
        return 1.0
    k, l = split_index(n)
    left, mid, right = _support(k, l)
    height = math.sqrt(2.0**k)
    if left <= t < mid:
        return height
    if mid <= t <= right:
        return -height
    return 0.0


def schauder_eval(n: int, t: float) -> float:
    _check_unit_interval(t)
    if int(n) == 0:
        return float(t)
    k, l = split_index(n)
    left, _mid, right = _support(k, l)
    return math.sqrt(2.0**k) * max(0.0, min(t - left, right - t))


def weight(n: int, alpha: float) -> float:
    alpha = validate_alpha(alpha)
    if int(n) == 0:
        return 1.0
    k, _ = split_index(n)
    return 2.0 ** (k * (alpha - 0.5) + alpha - 1.0)


def weights(N: int, alpha: float) -> np.ndarray:
    alpha = validate_alpha(alpha)
    levels = _levels(N)
    w = np.power(2.0, levels * (alpha - 0.5) + alpha - 1.0)
    if N > 0:
        w[0] = 1.0
    return w


def haar_table(N: int, t: np.ndarray) -> np.ndarray:
    """Matrix of chi_n(t_i) with rows indexed by the points and columns by n < N."""
    t = np.asarray(t, dtype=float)
    if t.size and (t.min() < 0.0 or t.max() > 1.0):
        raise DomainError("evaluation points must lie in [0, 1]")
    out = np.zeros((t.size, N))
    if N == 0:
        return out
    out[:, 0] = 1.0
    for n in range(1, N):
        k, l = split_index(n)
        left, mid, right = _support(k, l)
        height = math.sqrt(2.0**k)
        out[(t >= left) & (t < mid), n] = height
        out[(t >= mid) & (t <= right), n] = -height
    return out


@lru_cache(maxsize=32)
def schauder_table(N: int, J: int) -> np.ndarray:
    """Read-only matrix of phi_n(j / 2^J), shape (2^J + 1, N)."""
    if N < 1 or J < 0:
        raise DomainError("schauder_table needs N >= 1 and J >= 0")
    t = np.arange(2**J + 1, dtype=float) / 2.0**J
    out = np.empty((t.size, N))
    out[:, 0] = t
    for n in range(1, N):
        k, l = split_index(n)
        left, _mid, right = _support(k, l)
        out[:, n] = math.sqrt(2.0**k) * np.maximum(0.0, np.minimum(t - left, right - t))
    out.setflags(write=False)
    return out


def dyadic_grid(J: int) -> np.ndarray:
    return np.arange(2**J + 1, dtype=float) / 2.0**J


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(int(n)):
        raise DomainError(f"{n} is not a power of two")
    return int(n).bit_length() - 1


def _levels(N: int) -> np.ndarray:
    levels = np.zeros(N, dtype=float)
    for n in range(1, N):
        levels[n] = n.bit_length() - 1
    return levels


def _support(k: int, l: int) -> tuple[float, float, float]:
    scale = 2.0 ** (k + 1)
    return 2 * l / scale, (2 * l + 1) / scale, (2 * l + 2) / scale


def _check_unit_interval(t: float) -> None:
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t}")
