"""
Counter-based standard normal draws.

Draw N_{n,k} of path i is a pure function of (seed, i, n, k): a Philox-4x64 bit
generator keyed by (seed, i) with channel k placed in its own counter block, n the
position in that block. Uniforms come from the top 53 bits of each 64-bit word and
are mapped through the inverse normal CDF, so no rejection loop touches the counter.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import special


_MASK64 = (1 << 64) - 1
_UNIT = 2.0**-53


def channel_normals(seed: int, path_index: int, channel: int, N: int) -> np.ndarray:
    bitgen = np.random.Philox(key=[int(seed) & _MASK64, int(path_index) & _MASK64], counter=[0, 0, int(channel), 0])
    words = bitgen.random_raw(int(N))
    u = ((words >> np.uint64(11)).astype(float) + 0.5) * _UNIT
    return special.ndtri(u)


def standard_normals(seed: int, path_index: int, N: int, K: int) -> np.ndarray:
    out = np.empty((int(N), int(K)))
    for k in range(int(K)):
        out[:, k] = channel_normals(seed, path_index, k, N)
    return out


def standard_normal_batch(seed: int, start: int, count: int, N: int, K: int, *, workers: int = 1) -> np.ndarray:
    """Draws for paths start .. start+count-1, shape (count, N, K); independent of workers."""
    out = np.empty((int(count), int(N), int(K)))
    indices = range(int(start), int(start) + int(count))

    def fill(pos_index: tuple[int, int]) -> None:
        pos, index = pos_index
        out[pos] = standard_normals(seed, index, N, K)

    if workers <= 1 or count < 2:
        for item in enumerate(indices):
            fill(item)
    else:
        with ThreadPoolExecutor(max_workers=int(workers), thread_name_prefix="schauder-ldp-draws") as pool:
            list(pool.map(fill, enumerate(indices)))
    return out
