import math

import pytest

from conftest import FIXTURES
from petdensity import io
from petdensity.errors import AssumptionViolated, DomainError
from petdensity.models import DensityModel, density_eval
from petdensity.oracle import (
    bias_bound_oracle,
    f_m_oracle,
    f_m_riemann,
    fourier_l1_norm,
    mu_limit,
    mu_oracle,
    mu_upper_bound,
    v_oracle,
)


def gaussian_f_m_at_mean(m):
    # (2 pi)^-2 * 2 pi * int_0^m r exp(-r^2/2) dr
    return (1 - math.exp(-m * m / 2)) / (2 * math.pi)


@pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0])
def test_f_m_at_mean(gaussian, m):
    assert f_m_oracle(gaussian, (0, 0), m) == pytest.approx(gaussian_f_m_at_mean(m), abs=1e-11)


def test_f_m_large_cutoff(gaussian):
    assert f_m_oracle(gaussian, (0, 0), 50.0) == pytest.approx(1 / (2 * math.pi), abs=1e-8)


def test_f_m_small_cutoff(gaussian, disk):
    m = 1e-3
    for model in (gaussian, disk):
        assert abs(f_m_oracle(model, (0.3, 0.0), m)) <= m * m / (4 * math.pi) * (1 + 1e-9)


def test_golden_fixtures_match_oracle(gaussian):
    rows = [r for r in io.read_fixtures(FIXTURES / "golden.csv") if r["quantity"] == "f_m"]
    assert len(rows) >= 3
    for row in rows:
        p = row["params"]
        x = (float(p["x1"]), float(p["x2"]))
        model = DensityModel.gaussian(sigma=float(p["sigma"]))
        assert f_m_oracle(model, x, float(p["m"])) == pytest.approx(row["value"], abs=row["tolerance"])


def test_riemann_oracle_recomputes_fixture():
    rows = [r for r in io.read_fixtures(FIXTURES / "golden.csv") if r["quantity"] == "f_m"]
    p = rows[0]["params"]
    value = f_m_riemann((0.0, 0.0), float(p["sigma"]), (float(p["x1"]), float(p["x2"])), float(p["m"]))
    assert value == rows[0]["value"]


def test_disk_f_m_converges_to_density(disk):
    # the disk is discontinuous, so only slow convergence at the centre
    errors = [abs(f_m_oracle(disk, (0, 0), m) - 1 / math.pi) for m in (5.0, 20.0)]
    assert errors[1] < errors[0]


@pytest.mark.parametrize("m", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("x", [(0.0, 0.0), (1.0, 0.0)])
def test_bias_bound(gaussian, m, x):
    assert abs(f_m_oracle(gaussian, x, m) - density_eval(gaussian, x)) <= bias_bound_oracle(gaussian, x, m)


def test_bias_bound_value(gaussian):
    assert bias_bound_oracle(gaussian, (0, 0), 2.0) == pytest.approx(math.exp(-2) / (2 * math.pi), rel=1e-13)
    assert bias_bound_oracle(gaussian, (0, 0), 40.0) < 1e-300


def test_mu_upper_bound_value(gaussian):
    assert fourier_l1_norm(gaussian) == pytest.approx(2 * math.pi, rel=1e-14)
    rho = 2 * math.pi
    assert mu_upper_bound(gaussian) == pytest.approx(rho * (rho + 2 * math.pi) / ((2 * math.pi) ** 4 * 3), rel=1e-14)
    assert mu_upper_bound(gaussian) == pytest.approx(1 / (6 * math.pi**2), rel=1e-14)


def test_mu_bound_not_available_for_disk(disk):
    with pytest.raises(AssumptionViolated):
        mu_upper_bound(disk)


def test_mu_small_cutoff(gaussian):
    assert 0 < mu_oracle(gaussian, (0, 0), 1e-6) < 1e-8


def test_mu_increases_to_limit(gaussian, disk):
    for model in (gaussian, disk):
        values = [mu_oracle(model, (0, 0), m) for m in (1.0, 4.0, 16.0)]
        assert values[0] < values[1] < values[2] < mu_limit(model, (0, 0))
    assert mu_limit(gaussian, (0, 0)) == pytest.approx(1 / (12 * math.pi) / math.sqrt(2 * math.pi), rel=1e-12)
    assert mu_oracle(gaussian, (0, 0), 32.0) == pytest.approx(mu_limit(gaussian, (0, 0)), rel=0.05)


def test_v_oracle(gaussian):
    mu1 = mu_oracle(gaussian, (0, 0), 1.0)
    expected = 0.003 * (1 + mu1) * math.log(1000) / 1000
    assert v_oracle(1.0, 1000, 0.003, gaussian, (0, 0)) == pytest.approx(expected, rel=1e-14)
    assert v_oracle(1.0, 1000, 0.0, gaussian, (0, 0)) == 0.0


def test_oracles_are_planar_only():
    model = DensityModel.gaussian(dim=3)
    with pytest.raises(DomainError):
        f_m_oracle(model, (0, 0, 0), 1.0)
