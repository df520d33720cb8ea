import math

import numpy as np
import pytest

from schauder_ldp.core.spectrum import (
    concentration_constants,
    h0_energy,
    make_spectrum,
    project,
    spectrum_from_descriptor,
)
from schauder_ldp.errors import ConfigError, DomainError


def test_geometric_spectrum() -> None:
    spec = make_spectrum({"kind": "geometric", "lambda0": 0.5, "ratio": 0.5}, 3)
    assert spec.lambdas.tolist() == [0.5, 0.25, 0.125]
    assert spec.trace == pytest.approx(7.0 / 8.0)
    assert spec.full_trace == pytest.approx(1.0)
    assert spec.eigenvalue(10) == pytest.approx(0.5**11)


def test_power_spectrum() -> None:
    spec = make_spectrum({"kind": "power", "exponent": 2.0}, 4)
    assert np.allclose(spec.lambdas, [1.0, 1.0 / 4.0, 1.0 / 9.0, 1.0 / 16.0])
    assert spec.full_trace == pytest.approx(math.pi**2 / 6.0)


def test_explicit_spectrum_extrapolates_with_zero() -> None:
    spec = make_spectrum({"kind": "explicit", "values": [1.0]}, 1)
    assert spec.lambdas.tolist() == [1.0]
    assert spec.eigenvalue(1) == 0.0
    assert spec.full_trace == 1.0


def test_lambdas_are_read_only(geometric_spectrum) -> None:
    with pytest.raises(ValueError):
        geometric_spectrum.lambdas[0] = 2.0


@pytest.mark.parametrize(
    "descriptor",
    [
        {"kind": "geometric", "ratio": 1.5},
        {"kind": "geometric", "lambda0": -1.0},
        {"kind": "power", "exponent": 1.0},
        {"kind": "explicit", "values": [1.0, -0.5]},
        {"kind": "explicit", "values": []},
        {"kind": "lognormal"},
        {"kind": "geometric", "ratio": 0.5, "exponent": 2.0},
    ],
)
def test_invalid_descriptors_are_rejected(descriptor: dict) -> None:
    with pytest.raises(ConfigError):
        make_spectrum(descriptor, 4)


def test_trace_budget() -> None:
    spec = make_spectrum({"kind": "geometric", "lambda0": 0.5, "ratio": 0.5}, 4, trace_budget=1.0)
    assert spec.trace_budget == 1.0
    with pytest.raises(ConfigError, match="exceeds budget"):
        make_spectrum({"kind": "geometric", "lambda0": 0.5, "ratio": 0.5}, 4, trace_budget=0.9)


def test_descriptor_channel_count() -> None:
    assert spectrum_from_descriptor({"kind": "geometric", "K": 3}).K == 3
    assert spectrum_from_descriptor({"kind": "explicit", "values": [1.0, 0.5]}).K == 2
    assert spectrum_from_descriptor({"kind": "geometric", "K": 3}, 3).K == 3
    with pytest.raises(ConfigError, match="contradicts"):
        spectrum_from_descriptor({"kind": "geometric", "K": 3}, 5)
    with pytest.raises(ConfigError, match="needs K"):
        spectrum_from_descriptor({"kind": "geometric"})


def test_scaled_multiplies_every_eigenvalue(geometric_spectrum) -> None:
    doubled = geometric_spectrum.scaled(2.0)
    assert np.allclose(doubled.lambdas, 2.0 * geometric_spectrum.lambdas)
    assert doubled.full_trace == pytest.approx(2.0)


def test_h0_energy_examples() -> None:
    unit = make_spectrum({"kind": "explicit", "values": [1.0, 1.0]}, 2)
    half = make_spectrum({"kind": "explicit", "values": [0.5, 3.0]}, 2)
    degenerate = make_spectrum({"kind": "explicit", "values": [1.0, 0.0]}, 2)
    assert h0_energy(np.array([1.0, 0.0]), unit) == 1.0
    assert h0_energy(np.array([1.0, 0.0]), half) == 2.0
    assert h0_energy(np.array([0.0, 1.0]), degenerate) == math.inf
    assert h0_energy(np.array([2.0, 0.0]), degenerate) == 4.0


def test_h0_energy_checks_length(geometric_spectrum) -> None:
    with pytest.raises(DomainError):
        h0_energy(np.ones(3), geometric_spectrum)


def test_project() -> None:
    v = np.array([3.0, 4.0])
    assert project(v, 1, "head").tolist() == [3.0, 0.0]
    assert project(v, 1, "tail").tolist() == [0.0, 4.0]
    assert project(v, 2, "head").tolist() == [3.0, 4.0]
    assert np.array_equal(project(v, 1, "head") + project(v, 1, "tail"), v)
    with pytest.raises(DomainError):
        project(v, 3)


def test_concentration_constants(geometric_spectrum) -> None:
    c, lam = concentration_constants(geometric_spectrum)
    assert c == pytest.approx(math.e)
    assert lam == pytest.approx(0.5)


@pytest.mark.parametrize("k", [0, 1, 3, 5])
def test_head_and_tail_are_orthogonal(k: int) -> None:
    v = np.random.default_rng(k).normal(size=5)
    head, tail = project(v, k, "head"), project(v, k, "tail")
    assert float(head @ head + tail @ tail) == pytest.approx(float(v @ v), rel=1e-14)
    assert float(head @ tail) == 0.0


def test_h0_energy_is_quadratic_and_dominates_plain_norm(geometric_spectrum) -> None:
    u = np.random.default_rng(3).normal(size=4)
    energy = h0_energy(u, geometric_spectrum)
    assert h0_energy(-3.0 * u, geometric_spectrum) == pytest.approx(9.0 * energy, rel=1e-13)
    assert energy >= float(u @ u) / geometric_spectrum.lambda_max
