import math

import numpy as np
import pytest
from scipy import special

from schauder_ldp.core.qwiener import SimConfig
from schauder_ldp.core.spectrum import make_spectrum
from schauder_ldp.core.tightness import (
    DivergentSeq,
    divergent_from_descriptor,
    tight_build,
    tight_check,
)
from schauder_ldp.errors import ConfigError, DomainError


ROOT2 = {"kind": "geometric", "growth": math.sqrt(2.0)}


def test_constants_for_geometric_spectrum(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=16)
    assert tset.c == pytest.approx(math.e)
    assert tset.lam_q == pytest.approx(0.5)
    assert tset.lam_bar == tset.lam_q
    assert tset.lam_bar_source == "concentration"
    assert tset.tilde_trace == pytest.approx(0.5 / (1.0 - 0.5 * math.sqrt(2.0)))
    assert tset.beta == pytest.approx(2.0)
    assert tset.N == 16
    assert tset.bound(0.25) == pytest.approx(0.0694, abs=1e-4)


def test_bound_is_infinite_when_exponent_vanishes(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=4)
    assert tset.bound(1e308) == math.inf
    assert tset.bound(0.5) < tset.bound(1.0)


def test_radii_scale_with_square_root_of_rate(geometric_spectrum) -> None:
    one = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=8)
    two = tight_build(2.0, geometric_spectrum, ROOT2, alpha=0.4, N=8)
    assert np.allclose(two.radii, math.sqrt(2.0) * one.radii)
    with pytest.raises(ValueError):
        one.radii[0] = 0.0


def test_configured_scale(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=8, lam_bar=0.25)
    assert tset.lam_bar_source == "configured"
    assert tset.to_dict()["lam_bar"] == 0.25


@pytest.mark.parametrize(
    "descriptor",
    [{"kind": "geometric", "growth": 1.0}, {"kind": "power", "exponent": 0.0}, {"kind": "harmonic"}],
)
def test_bad_divergent_descriptors(descriptor: dict) -> None:
    with pytest.raises(ConfigError):
        divergent_from_descriptor(descriptor)


def test_divergent_values() -> None:
    assert DivergentSeq(kind="geometric", growth=2.0).values(4).tolist() == [1.0, 2.0, 4.0, 8.0]
    assert np.allclose(DivergentSeq(kind="power", exponent=0.5).values(3), [1.0, math.sqrt(2.0), math.sqrt(3.0)])


def test_weighted_trace_must_converge(geometric_spectrum) -> None:
    with pytest.raises(ConfigError, match="diverges"):
        tight_build(1.0, geometric_spectrum, {"kind": "geometric", "growth": 2.5}, alpha=0.4, N=8)
    power = make_spectrum({"kind": "power", "exponent": 2.0}, 4)
    with pytest.raises(ConfigError, match="diverges"):
        tight_build(1.0, power, ROOT2, alpha=0.4, N=8)
    with pytest.raises(ConfigError, match="exponent gap"):
        tight_build(1.0, power, {"kind": "power", "exponent": 1.0}, alpha=0.4, N=8)


def test_power_weights_against_power_spectrum() -> None:
    power = make_spectrum({"kind": "power", "exponent": 2.0}, 4)
    tset = tight_build(1.0, power, {"kind": "power", "exponent": 0.5}, alpha=0.4, N=8)
    assert tset.tilde_trace == pytest.approx(float(special.zeta(1.5, 1.0)))


def test_power_weights_against_geometric_spectrum(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, {"kind": "power", "exponent": 1.0}, alpha=0.4, N=8)
    # sum (k + 1) 0.5^(k + 1) = 2
    assert tset.tilde_trace == pytest.approx(2.0, rel=1e-12)


def test_build_rejects_bad_arguments(geometric_spectrum) -> None:
    with pytest.raises(ConfigError, match="positive"):
        tight_build(0.0, geometric_spectrum, ROOT2, alpha=0.4, N=8)
    with pytest.raises(DomainError, match="power of two"):
        tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=6)
    with pytest.raises(DomainError, match="must be < 1/2"):
        tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.5, N=8)


def test_complement_mass_stays_below_bound(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=16)
    cfg = SimConfig(geometric_spectrum, J=4, seed=42, paths=5000)
    report = tight_check(tset, [2.0, 0.25, 0.125], cfg)
    assert [p.status for p in report.points] == ["vacuous", "passed", "passed"]
    assert report.passed
    assert report.M == 5000
    payload = report.to_dict()
    assert set(payload) == {"set", "M", "passed", "points"}
    assert "radii" not in payload["set"]


def test_check_needs_matching_truncation(geometric_spectrum) -> None:
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=0.4, N=16)
    with pytest.raises(DomainError, match="differs"):
        tight_check(tset, [0.25], SimConfig(geometric_spectrum, J=5, paths=10))
    with pytest.raises(DomainError, match="positive"):
        tight_check(tset, [], SimConfig(geometric_spectrum, J=4, paths=10))


def test_radii_grow_like_a_power_of_the_index(geometric_spectrum) -> None:
    alpha = 1.0 / 3.0
    tset = tight_build(1.0, geometric_spectrum, ROOT2, alpha=alpha, N=1024)
    r = tset.radii
    assert r[1] == pytest.approx(1.26, abs=0.01)
    assert r[1023] == pytest.approx(10.08, abs=0.01)
    dyadic = [r[2**k] for k in range(10)]
    assert all(b > a for a, b in zip(dyadic, dyadic[1:]))
    # r_{2^k} / 2^{k alpha} -> 2^{alpha - 1} sqrt(a / lam_bar)
    limit = 2.0 ** (alpha - 1.0) * math.sqrt(1.0 / tset.lam_bar)
    assert r[512] / 512.0**alpha == pytest.approx(limit, rel=2e-3)
