import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from petdensity.errors import DomainError
from petdensity.kernel import (
    KernelSpec,
    kernel_bound,
    kernel_eval,
    kernel_l2_norm_sq,
    kernel_profile,
    kernel_scaling_check,
    kernel_values,
)
from petdensity.oracle import kernel_l2_norm_sq_quadrature, kernel_quadrature


def test_value_at_origin():
    assert kernel_eval(KernelSpec(2, 2.0), 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
    assert kernel_eval(KernelSpec(2, 3.0), 0.0) == pytest.approx(9 / (4 * math.pi), rel=1e-15)


def test_closed_form_at_pi():
    assert kernel_eval(KernelSpec(2, 1.0), math.pi) == pytest.approx(-1 / math.pi**3, rel=1e-14)


def test_even_in_u():
    u = np.linspace(0, 12, 97)
    for d in (2, 3):
        assert np.array_equal(kernel_values(d, 1.7, u), kernel_values(d, 1.7, -u))


def test_matches_quadrature_on_grid():
    u = np.linspace(-10, 10, 401)
    worst = 0.0
    for m in (0.5, 1.0, 2.0, 5.0):
        closed = kernel_values(2, m, u)
        for ui, ki in zip(u, closed):
            worst = max(worst, abs(ki - kernel_quadrature(2, m, float(ui))))
    assert worst <= 1e-9


def test_d3_against_quadrature():
    for u in (0.0, 0.7, 3.1, 25.0):
        assert kernel_values(3, 2.0, u) == pytest.approx(kernel_quadrature(3, 2.0, u), abs=1e-10)


def test_taylor_branch_is_continuous():
    # the switch point must not produce a visible jump
    for d in (2, 3):
        below = kernel_profile(np.array([1e-3 * (1 - 1e-9)]), d)[0]
        above = kernel_profile(np.array([1e-3 * (1 + 1e-9)]), d)[0]
        assert abs(below - above) < 1e-13


def test_small_argument_has_no_cancellation():
    # sum_k (-1)^k a^2k / ((2k)! (2k+2)) in exact rational arithmetic
    from fractions import Fraction

    a = Fraction(1, 10**4)
    exact = sum(Fraction((-1) ** k) * a ** (2 * k) / (math.factorial(2 * k) * (2 * k + 2)) for k in range(6))
    assert kernel_profile(np.array([1e-4]), 2)[0] == pytest.approx(float(exact), rel=1e-15)


@pytest.mark.parametrize("d, m, u", [(2, 1.0, 0.3), (2, 4.0, -2.5), (2, 0.5, 9.0), (3, 2.0, 0.7), (3, 3.5, 1.2)])
def test_scaling_identity(d, m, u):
    lhs, rhs = kernel_scaling_check(d, m, u)
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(m=st.floats(0.05, 8.0), u=st.floats(-30.0, 30.0))
def test_bounded_by_value_at_origin(m, u):
    assert abs(kernel_eval(KernelSpec(2, m), u)) <= kernel_bound(2, m) * (1 + 1e-12)


def test_l2_norm():
    assert kernel_l2_norm_sq(2) == pytest.approx(1 / (12 * math.pi), rel=1e-14)
    assert kernel_l2_norm_sq(3) == pytest.approx(1 / (20 * math.pi**3), rel=1e-14)
    assert kernel_l2_norm_sq_quadrature(2) == pytest.approx(kernel_l2_norm_sq(2), abs=1e-8)
    assert kernel_l2_norm_sq_quadrature(3) == pytest.approx(kernel_l2_norm_sq(3), abs=1e-8)


@pytest.mark.parametrize("kwargs", [dict(dim=1, m=1.0), dict(dim=2, m=0.0), dict(dim=2, m=-1.0),
                                    dict(dim=2, m=1.0, taylor_threshold=0.0)])
def test_invalid_spec(kwargs):
    with pytest.raises(DomainError):
        KernelSpec(**kwargs)


def test_vector_input_shape():
    out = kernel_eval(KernelSpec(2, 1.0), np.zeros((3, 4)))
    assert out.shape == (3, 4)
