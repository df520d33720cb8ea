"""
Log-space standard normal probabilities.

Built on scipy.special ndtr / log_ndtr / erf, which wrap the Cephes rational
approximations of erf and erfc (relative error around 1e-16 on the real line) and
an asymptotic series for log_ndtr in the far lower tail. All functions broadcast.
"""

import math

import numpy as np
from scipy import special


LN2 = math.log(2.0)
_SMALL_LOG = -30.0


def log1mexp(x: np.ndarray) -> np.ndarray:
    """log(1 - exp(x)) for x <= 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.where(x > -LN2, np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def log_interval_prob(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """log P(lo < Z < hi) for a standard normal Z."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # interval inside the upper half-line; lower half-line mirrored onto it
        flip = hi <= 0.0
        a = np.where(flip, -hi, lo)
        b = np.where(flip, -lo, hi)
        log_upper_a = special.log_ndtr(-a)
        log_upper_b = special.log_ndtr(-b)
        one_sided = log_upper_a + log1mexp(log_upper_b - log_upper_a)

        tails = special.ndtr(lo) + special.ndtr(-hi)
        central = np.where(
            tails < 0.5,
            np.log1p(-tails),
            np.log(0.5 * (special.erf(hi / math.sqrt(2.0)) + special.erf(-lo / math.sqrt(2.0)))),
        )
        out = np.where((lo < 0.0) & (hi > 0.0), central, one_sided)
        out = np.where(lo >= hi, -np.inf, out)
    return out


def log_two_sided_tail(u: np.ndarray) -> np.ndarray:
    """log P(|Z| >= u) for u >= 0."""
    u = np.asarray(u, dtype=float)
    return np.minimum(LN2 + special.log_ndtr(-u), 0.0)


def log_neg_log_central(u: np.ndarray) -> np.ndarray:
    """log(-log P(|Z| < u)); the per-coordinate cost of an omitted centred factor."""
    lt = log_two_sided_tail(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = np.log(-log1mexp(lt))
    return np.where(lt < _SMALL_LOG, lt, exact)


def normal_cdf(x: np.ndarray) -> np.ndarray:
    return special.ndtr(np.asarray(x, dtype=float))


def normal_ppf(p: np.ndarray) -> np.ndarray:
    return special.ndtri(np.asarray(p, dtype=float))
