"""Quadrature ground truth for the estimator's deterministic targets (d = 2).

    f_m(x)  = (2 pi)^-2 int_{|t| <= m} exp(-i <x, t>) F[f](t) dt
    mu_m    = rho_d^-1 int_S int_R m K_1(m(<s, x> - u))^2 R[f](s, u) du ds
    V(m)    = chi (1 + mu_m) m^(2d-1) log(n) / n
    |f_m(x) - f(x)| <= (2 pi)^-d int_{|t| > m} |F[f](t)| dt

Everything here is evaluated by nested adaptive quadrature, except the
Riemann-grid fixture generator :func:`f_m_riemann`, which deliberately uses
none of the helpers in this package.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate as _integrate

from petdensity import quadrature
from petdensity.errors import AssumptionViolated, DomainError, NumericalError
from petdensity.kernel import kernel_l2_norm_sq, kernel_values
from petdensity.models import (
    DensityModel,
    disk_fourier_radial,
    fourier_l1_tail,
    radon_eval,
    radon_support,
    rho_d,
)

QuadratureSettings = quadrature.QuadratureSettings

IMAG_TOL = 1e-9


def _require_plane(model: DensityModel):
    if model.dim != 2:
        raise DomainError("oracles are implemented for d = 2 only")


def _radial_amplitude(model: DensityModel, r: float, settings) -> float:
    # F[f](r w) = amplitude(r) * exp(i r <mean, w>)
    if model.is_gaussian:
        return math.exp(-model.sigma**2 * r * r / 2)
    return disk_fourier_radial(r, model.radius, settings)


def f_m_oracle(model: DensityModel, x, m: float, settings: QuadratureSettings = quadrature.DEFAULT) -> float:
    """Expected value of the cut-off estimator at x, by polar quadrature in frequency."""
    _require_plane(model)
    if not m > 0:
        raise DomainError("cut-off m must be positive")
    x = np.asarray(x, dtype=float).reshape(2)
    shift = x - (np.asarray(model.mean) if model.is_gaussian else 0.0)
    px, py = float(shift[0]), float(shift[1])

    def angular(r, part):
        if px == 0.0 and py == 0.0:
            return 2 * math.pi if part == "re" else 0.0
        trig = math.cos if part == "re" else math.sin
        # exp(-i r <shift, w>): real part cos, imaginary part -sin
        val = quadrature.integrate(lambda th: trig(r * (px * math.cos(th) + py * math.sin(th))),
                                   0.0, 2 * math.pi, settings)
        return val if part == "re" else -val

    amp_cache: dict[float, float] = {}

    def amp(r):
        if r not in amp_cache:
            amp_cache[r] = _radial_amplitude(model, r, settings)
        return amp_cache[r]

    scale = (2 * math.pi) ** -2
    re = quadrature.integrate(lambda r: r * amp(r) * angular(r, "re"), 0.0, m, settings)
    im = quadrature.integrate(lambda r: r * amp(r) * angular(r, "im"), 0.0, m, settings)
    if abs(scale * im) > IMAG_TOL:
        raise NumericalError(f"f_m has a residual imaginary part {scale * im:.3e}")
    return scale * re


def f_m_riemann(mean, sigma: float, x, m: float, n_radial: int = 2000, n_angular: int = 2000) -> float:
    """Plain midpoint sums of the Gaussian ``f_m(x)`` over a polar frequency grid.

    Independent of every other routine in the package; used to freeze golden values.
    """
    dr = m / n_radial
    dth = 2 * math.pi / n_angular
    r = (np.arange(n_radial) + 0.5) * dr
    th = (np.arange(n_angular) + 0.5) * dth
    c, s = np.cos(th), np.sin(th)
    total = 0.0
    for ri in r:
        tx, ty = ri * c, ri * s
        phase = tx * (mean[0] - x[0]) + ty * (mean[1] - x[1])
        total += ri * np.sum(np.cos(phase)) * math.exp(-sigma * sigma * ri * ri / 2)
    return total * dr * dth / (4 * math.pi**2)


def mu_oracle(model: DensityModel, x, m: float, settings: QuadratureSettings = quadrature.DEFAULT) -> float:
    """``mu_m`` by nested quadrature: direction angle outside, offset inside."""
    _require_plane(model)
    if not m > 0:
        raise DomainError("cut-off m must be positive")
    x = np.asarray(x, dtype=float).reshape(2)

    def inner(th):
        s = np.array([math.cos(th), math.sin(th)])
        c = float(s @ x)
        lo, hi = radon_support(model, s, settings)

        def integrand(u):
            k1 = kernel_values(2, 1.0, m * (c - u))
            return m * float(k1) ** 2 * radon_eval(model, s, u)

        return quadrature.integrate(integrand, lo, hi, settings, points=[c])

    return quadrature.integrate(inner, 0.0, 2 * math.pi, settings) / rho_d(2)


def v_oracle(m: float, n: int, chi: float, model: DensityModel, x,
             settings: QuadratureSettings = quadrature.DEFAULT) -> float:
    """Penalty with the true ``mu_m`` (not observable; tests only)."""
    if n < 2:
        raise DomainError("the penalty needs n >= 2")
    d = model.dim
    return chi * (1.0 + mu_oracle(model, x, m, settings)) * m ** (2 * d - 1) * math.log(n) / n


def bias_bound_oracle(model: DensityModel, x, m: float) -> float:
    """``(2 pi)^-d ||1_{|t|>m} F[f]||_1``, a bound on ``|f_m(x) - f(x)|``."""
    return fourier_l1_tail(model, m) / (2 * math.pi) ** model.dim


def fourier_l1_norm(model: DensityModel) -> float:
    if not model.is_gaussian:
        raise AssumptionViolated("Fourier transform of the disk is not integrable")
    d, sig = model.dim, model.sigma
    return rho_d(d) * 2 ** (d / 2 - 1) * sig ** (-d) * math.gamma(d / 2)


def mu_upper_bound(model: DensityModel) -> float:
    """``rho_d ((2 pi)^(2d) (2d - 1))^-1 (rho_d + ||F[f]||_1)``, uniform in m."""
    d = model.dim
    rho = rho_d(d)
    return rho / ((2 * math.pi) ** (2 * d) * (2 * d - 1)) * (rho + fourier_l1_norm(model))


def kernel_quadrature(d: int, m: float, u: float) -> float:
    """``K_m(u)`` by plain adaptive quadrature of the defining integral."""
    val = _integrate.quad(lambda r: r ** (d - 1) * math.cos(u * r), 0.0, m,
                          epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    return rho_d(d) / (2 * math.pi) ** d * val


def kernel_l2_norm_sq_quadrature(d: int, periods: int = 4000) -> float:
    """``int K_1(u)^2 du`` over the real line.

    Integrates period by period on [0, periods * pi] and adds the leading tail
    term ``c^2 / (2 U)`` of ``(c sin(u) / u)^2``, c = rho_d (2 pi)^-d.
    """
    if d not in (2, 3):
        raise DomainError("the tail correction is derived for d = 2 and d = 3")
    k1 = lambda u: float(kernel_values(d, 1.0, u)) ** 2  # noqa: E731
    total = 0.0
    for k in range(periods):
        total += _integrate.quad(k1, k * math.pi, (k + 1) * math.pi, epsabs=1e-15, epsrel=1e-13)[0]
    upper = periods * math.pi
    c = rho_d(d) / (2 * math.pi) ** d
    tail = c * c / (2 * upper)
    if d == 2:
        # (cos u - 1)^2 / u^4 averages to 3 / (2 u^4)
        tail += c * c / (2 * upper**3)
    return 2 * (total + tail)


def mu_limit(model: DensityModel, x, settings: QuadratureSettings = quadrature.DEFAULT) -> float:
    """Large-m limit of ``mu_m``: ``||K_1||^2`` times the direction average of ``R_s f(<s, x>)``."""
    _require_plane(model)
    x = np.asarray(x, dtype=float).reshape(2)

    def radon_at_x(th):
        s = np.array([math.cos(th), math.sin(th)])
        return radon_eval(model, s, float(s @ x))

    return kernel_l2_norm_sq(2) * quadrature.integrate(radon_at_x, 0.0, 2 * math.pi, settings) / rho_d(2)
