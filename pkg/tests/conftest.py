import math

import numpy as np
import pytest

from schauder_ldp.core.ciesielski import DyadicPath
from schauder_ldp.core.spectrum import Spectrum, make_spectrum
from schauder_ldp.engine.runner import Runner


@pytest.fixture
def geometric_spectrum() -> Spectrum:
    return make_spectrum({"kind": "geometric", "lambda0": 0.5, "ratio": 0.5}, 4)


@pytest.fixture
def unit_spectrum() -> Spectrum:
    return make_spectrum({"kind": "explicit", "values": [1.0]}, 1)


@pytest.fixture
def runner(tmp_path) -> Runner:
    return Runner(log_path=tmp_path / "run_log.json")


@pytest.fixture
def random_walk():
    def make(rng: np.random.Generator, J: int, K: int) -> DyadicPath:
        steps = rng.standard_normal((2**J, K)) * math.sqrt(2.0**-J)
        return DyadicPath(np.vstack([np.zeros((1, K)), np.cumsum(steps, axis=0)]))

    return make


def write_csv(path, lines: list[str]) -> str:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return str(path)
