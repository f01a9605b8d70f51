import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from petdensity.errors import DomainError
from petdensity.estimator import (
    CutoffGrid,
    SelectionConfig,
    a_hat,
    default_cap,
    empirical_mu,
    estimate_point,
    grid_default,
    grid_estimates,
    integer_root_floor,
    select_from_values,
    select_m,
    v_hat,
)
from petdensity.models import DensityModel, Sample, sample_pet


def kernel_d2(m, u):
    """Independent closed form of the planar kernel."""
    if u == 0.0:
        return m * m / (4 * math.pi)
    return (m * math.sin(u * m) / u + (math.cos(u * m) - 1) / (u * u)) / (2 * math.pi)


def brute_force(sample, x, grid, chi):
    """Plain loops over observations and cut-off pairs."""
    n = len(sample)
    f, mu = [], []
    for m in grid:
        terms = [kernel_d2(m, float(s[0] * x[0] + s[1] * x[1] - u))
                 for s, u in zip(sample.directions.tolist(), sample.offsets.tolist())]
        f.append(sum(terms) / n)
        mu.append(sum((t / m**2) ** 2 * m for t in terms) / n)
    pen = [2 * chi * (1 + mu[j]) * m**3 * math.log(n) / n for j, m in enumerate(grid)]
    a = []
    for j, m in enumerate(grid):
        best = 0.0
        for k, mp in enumerate(grid):
            joint = f[j] if mp >= m else f[k]  # f at min(m, m')
            best = max(best, (joint - f[k]) ** 2 - pen[k])
        a.append(best)
    objective = [a[j] + pen[j] for j in range(len(grid))]
    j = min(range(len(grid)), key=lambda i: (objective[i], i))
    return f, mu, pen, a, j


def test_single_observation():
    model = DensityModel.gaussian()
    sample = Sample(np.array([[0.6, 0.8]]), np.array([0.3]), 0, model)
    x = (0.5, -0.25)
    z = 0.6 * 0.5 - 0.8 * 0.25 - 0.3
    assert estimate_point(sample, x, 2.0) == pytest.approx(kernel_d2(2.0, z), rel=1e-13)
    assert empirical_mu(sample, x, 2.0) == pytest.approx(2.0 * (kernel_d2(2.0, z) / 4) ** 2, rel=1e-13)


def test_small_cutoff_shrinks_estimate():
    sample = sample_pet(DensityModel.gaussian(), 200, 1)
    value = estimate_point(sample, (0, 0), 1e-4)
    assert abs(value) <= 1e-8 / (4 * math.pi) * (1 + 1e-12)


def test_empty_sample_rejected():
    sample = sample_pet(DensityModel.gaussian(), 0, 1)
    with pytest.raises(DomainError):
        estimate_point(sample, (0, 0), 1.0)


def test_nonpositive_cutoff_rejected():
    sample = sample_pet(DensityModel.gaussian(), 10, 1)
    with pytest.raises(DomainError):
        estimate_point(sample, (0, 0), 0.0)


def test_mu_hat_bound():
    sample = sample_pet(DensityModel.disk(), 300, 4)
    for m in (0.3, 1.0, 4.0):
        assert empirical_mu(sample, (0.2, 0.1), m) <= m * (1 / (4 * math.pi)) ** 2 * (1 + 1e-12)


def test_grid_estimates_match_pointwise():
    sample = sample_pet(DensityModel.gaussian(), 400, 8)
    grid = (0.5, 1.0, 2.5)
    f, mu = grid_estimates(sample, (0.3, 0.3), grid)
    for j, m in enumerate(grid):
        assert f[j] == estimate_point(sample, (0.3, 0.3), m)
        assert mu[j] == pytest.approx(empirical_mu(sample, (0.3, 0.3), m), rel=1e-14)


def test_v_hat_arithmetic():
    assert v_hat(1.0, 1000, 1.0, 0.0) == pytest.approx(2 * math.log(1000) / 1000, rel=1e-15)
    expected = 2 * 0.003 * 1.05 * 8 * math.log(1000) / 1000
    assert v_hat(2.0, 1000, 0.003, 0.05) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(3.4814e-4, rel=1e-4)
    assert v_hat(2.0, 1000, 0.006, 0.05) == pytest.approx(2 * expected, rel=1e-15)
    assert v_hat(2.0, 1000, 0.0, 0.05) == 0.0


def test_integer_root_floor_exact():
    assert integer_root_floor(1000, 3) == 10
    assert integer_root_floor(999, 3) == 9
    assert integer_root_floor(2, 3) == 1
    assert integer_root_floor(10**18, 3) == 10**6
    assert integer_root_floor(10**18 - 1, 3) == 10**6 - 1
    assert default_cap(1000, 2) == 10.0


def test_theory_grid():
    assert grid_default(1000, rule="theory").values == tuple(float(k) for k in range(1, 11))
    assert grid_default(999, rule="theory").values == tuple(float(k) for k in range(1, 10))
    assert grid_default(2, rule="theory").values == (1.0,)


def test_fractional_grid():
    grid = grid_default(1000, step=0.1)
    assert len(grid) == 100
    assert grid.values[0] == 0.1 and grid.values[-1] == 10.0
    assert grid.values[36] == 3.7
    small = grid_default(1000, step=0.1, cap_override=9.95)
    assert len(small) == 99


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=100, rule="nope"), dict(n=100, step=0.0),
                                    dict(n=100, cap_override=0.05)])
def test_grid_errors(kwargs):
    with pytest.raises(DomainError):
        grid_default(**kwargs)


def test_cutoff_grid_validation():
    with pytest.raises(DomainError):
        CutoffGrid.of([])
    with pytest.raises(DomainError):
        CutoffGrid.of([1.0, 0.5])
    with pytest.raises(DomainError):
        CutoffGrid.of([0.0, 1.0])


def test_a_hat_zero_at_top_and_singleton():
    sample = sample_pet(DensityModel.gaussian(), 300, 2)
    cfg = SelectionConfig(0.003, grid_default(300))
    values = a_hat(sample, (0, 0), cfg)
    assert values[-1][1] == 0.0
    assert a_hat(sample, (0, 0), SelectionConfig(0.003, CutoffGrid.of([1.3]))) == [(1.3, 0.0)]
    trace = select_m(sample, (0, 0), SelectionConfig(0.003, CutoffGrid.of([1.3])))
    assert trace.m_hat == 1.3


def test_matches_brute_force_seed_42():
    sample = sample_pet(DensityModel.gaussian(), 500, 42)
    grid = grid_default(500)
    trace = select_m(sample, (0.0, 0.0), SelectionConfig(0.003, grid))
    f, mu, pen, a, j = brute_force(sample, (0.0, 0.0), grid.values, 0.003)
    assert [r.f_hat for r in trace.per_m] == pytest.approx(f, rel=1e-9, abs=1e-13)
    assert [r.mu_hat for r in trace.per_m] == pytest.approx(mu, rel=1e-9, abs=1e-15)
    assert [r.v_hat for r in trace.per_m] == pytest.approx(pen, rel=1e-9)
    assert [r.a_hat for r in trace.per_m] == pytest.approx(a, rel=1e-7, abs=1e-15)
    assert trace.index == j and trace.m_hat == grid.values[j]


def test_huge_chi_selects_smallest():
    f = np.array([0.1, 0.5, 0.2, 0.9])
    ms = np.array([1.0, 2.0, 3.0, 4.0])
    pen = v_hat(ms, 100, 1e9, np.zeros(4))
    j, a = select_from_values(f, pen)
    assert j == 0
    assert np.all(a == 0.0)


def test_ties_pick_smallest_cutoff():
    j, _ = select_from_values(np.zeros(3), np.zeros(3))
    assert j == 0


def test_trace_fields():
    sample = sample_pet(DensityModel.disk(), 200, 3)
    trace = select_m(sample, (0.1, 0.0), SelectionConfig(0.003, grid_default(200)))
    summary = trace.summary()
    assert summary["n"] == 200 and summary["seed"] == 3
    assert summary["m_hat"] == trace.per_m[trace.index].m
    assert summary["f_hat"] == trace.per_m[trace.index].f_hat


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(2, 120), x=st.tuples(st.floats(-2, 2), st.floats(-2, 2)))
def test_permutation_invariance(seed, n, x):
    sample = sample_pet(DensityModel.gaussian(), n, seed)
    order = np.random.default_rng(seed).permutation(n)
    cfg = SelectionConfig(0.003, grid_default(n))
    a = select_m(sample, x, cfg)
    b = select_m(sample.permuted(order), x, cfg)
    assert a.m_hat == b.m_hat
    assert a.f_hat == pytest.approx(b.f_hat, rel=1e-10, abs=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(2, 150))
def test_selected_cutoff_minimises_objective(seed, n):
    sample = sample_pet(DensityModel.disk(), n, seed)
    trace = select_m(sample, (0.0, 0.0), SelectionConfig(0.003, grid_default(n)))
    objective = [r.a_hat + r.v_hat for r in trace.per_m]
    assert trace.per_m[-1].a_hat == 0.0
    assert objective[trace.index] == min(objective)
    assert all(o > objective[trace.index] for o in objective[:trace.index])
