import math

import numpy as np
import pytest

from schauder_ldp.core.ciesielski import CoeffMatrix, DyadicPath, forward
from schauder_ldp.core.rate import (
    rate_path,
    rate_path_energy,
    rate_scalar_coeffs,
    rate_scalar_fd,
    rate_total,
)
from schauder_ldp.core.spectrum import make_spectrum
from schauder_ldp.errors import DomainError


def test_scalar_rate_examples() -> None:
    t = np.linspace(0.0, 1.0, 17)
    assert rate_scalar_fd(t) == pytest.approx(0.5)
    assert rate_scalar_fd(2.0 * t, J=4) == pytest.approx(2.0)
    assert rate_scalar_coeffs(np.array([1.0, 0.0, 0.0])) == 0.5


def test_scalar_rate_checks_level() -> None:
    with pytest.raises(DomainError, match="2\\^J \\+ 1"):
        rate_scalar_fd(np.zeros(6))
    with pytest.raises(DomainError, match="does not match"):
        rate_scalar_fd(np.zeros(9), J=4)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_parseval_bridge(seed: int, random_walk) -> None:
    path = random_walk(np.random.default_rng(seed), J=8, K=1)
    fd = rate_scalar_fd(path.samples[:, 0])
    coeff = rate_scalar_coeffs(forward(path, 0.4).raw[:, 0])
    assert abs(fd - coeff) <= 1e-9 * max(1.0, fd)


def test_line_on_first_channel_costs_one_over_twice_lambda() -> None:
    spec = make_spectrum({"kind": "explicit", "values": [0.5, 0.25]}, 2)
    path = DyadicPath.from_function(lambda t: np.stack([t, np.zeros_like(t)], axis=1), 5)
    value = rate_path(path, spec)
    assert value.value == pytest.approx(1.0)
    assert value.per_channel == pytest.approx((1.0, 0.0))
    assert value.finite
    assert rate_total(forward(path, 0.3), spec).value == pytest.approx(1.0)
    assert rate_path_energy(path, spec) == pytest.approx(1.0)


def test_mass_on_degenerate_channel_is_infinite() -> None:
    spec = make_spectrum({"kind": "explicit", "values": [1.0, 0.0]}, 2)
    raw = np.array([[1.0, 0.0], [0.0, 0.5]])
    value = rate_total(CoeffMatrix.from_raw(raw, 0.4), spec)
    assert value.value == math.inf
    assert not value.finite
    assert value.per_channel == (0.5, math.inf)
    assert value.to_dict()["finite"] is False

    path = DyadicPath.from_function(lambda t: np.stack([t, t], axis=1), 3)
    assert rate_path_energy(path, spec) == math.inf


def test_zero_on_degenerate_channel_costs_nothing() -> None:
    spec = make_spectrum({"kind": "explicit", "values": [1.0, 0.0]}, 2)
    raw = np.array([[1.0, 0.0], [0.0, 0.0]])
    assert rate_total(CoeffMatrix.from_raw(raw, 0.4), spec).value == 0.5


def test_path_and_coefficient_rates_agree(geometric_spectrum, random_walk) -> None:
    path = random_walk(np.random.default_rng(4), J=7, K=4)
    by_path = rate_path(path, geometric_spectrum).value
    assert rate_total(forward(path, 0.4), geometric_spectrum).value == pytest.approx(by_path, rel=1e-10)
    assert rate_path_energy(path, geometric_spectrum) == pytest.approx(by_path, rel=1e-10)


def test_channel_mismatch(geometric_spectrum) -> None:
    with pytest.raises(DomainError, match="spectrum K=4"):
        rate_total(CoeffMatrix.from_raw(np.zeros((4, 2)), 0.4), geometric_spectrum)


@pytest.mark.parametrize("c", [0.0, -2.0, 0.3])
def test_rate_is_quadratic_in_the_path(c: float, geometric_spectrum) -> None:
    raw = np.random.default_rng(4).normal(size=(16, 4))
    base = rate_total(CoeffMatrix.from_raw(raw, 0.4), geometric_spectrum).value
    scaled = rate_total(CoeffMatrix.from_raw(c * raw, 0.4), geometric_spectrum).value
    assert scaled == pytest.approx(c * c * base, rel=1e-13, abs=1e-300)
