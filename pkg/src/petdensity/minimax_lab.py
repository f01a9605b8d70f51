"""Two-hypothesis construction behind the pointwise lower bound (d = 2 checks).

f0 is the standard normal density centred at the query point x and

    f1(y) = f0(y) + delta h^(beta - d/2) psi(|y - x| / h)

with a smooth radial bump psi supported in [0, 1], psi(0) = 1 and a
vanishing moment int_0^1 r^(d-1) psi(r) dr = 0. The bump family used here is

    psi_c(r) = (1 - c r^2) exp(-r^2 / (1 - r^2)),   r < 1,

whose constant c is calibrated numerically so the moment vanishes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from petdensity import quadrature
from petdensity.errors import DomainError, NumericalError
from petdensity.models import rho_d

_FINE = quadrature.QuadratureSettings(abs_tol=1e-14)


# -- bump -------------------------------------------------------------------

def bump_psi(r, c: float):
    """``psi_c(r)``; zero for r >= 1. Accepts scalars or arrays."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("bump radius must be non-negative")
    out = np.zeros_like(r)
    inside = r < 1.0
    ri = r[inside]
    out[inside] = (1.0 - c * ri * ri) * np.exp(-ri * ri / (1.0 - ri * ri))
    return float(out) if out.ndim == 0 else out


def bump_moment(c: float, d: int = 2, settings=_FINE) -> float:
    """``int_0^1 r^(d-1) psi_c(r) dr`` by adaptive quadrature."""
    return quadrature.integrate(lambda r: r ** (d - 1) * bump_psi(r, c), 0.0, 1.0, settings)


def bump_moment_gauss_legendre(c: float, d: int = 2, nodes: int = 400) -> float:
    """Second, fixed Gauss-Legendre rule for the same moment."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.5 * (x + 1.0)
    return 0.5 * float(np.sum(w * r ** (d - 1) * bump_psi(r, c)))


@functools.lru_cache(maxsize=None)
def calibrate_bump(d: int = 2, tol: float = 1e-12) -> float:
    """The c > 0 with vanishing bump moment, by bisection.

    The moment is affine in c with negative slope and positive at c = 0.
    """
    if d < 2:
        raise DomainError("dim must be at least 2")
    lo, hi = 0.0, 1.0
    if bump_moment(lo, d) <= 0:
        raise NumericalError("bump moment is not positive at c = 0")
    while bump_moment(hi, d) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise NumericalError("could not bracket the bump calibration constant")
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if bump_moment(mid, d) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bump_sup_norm(c: float, points: int = 200001) -> float:
    r = np.linspace(0.0, 1.0, points)
    return float(np.max(np.abs(bump_psi(r, c))))


# -- configuration ------------------------------------------------------------

@dataclass(frozen=True)
class BumpConfig:
    """Perturbation parameters. ``moment_constant`` defaults to the calibrated c."""

    dim: int = 2
    beta: float = 2.0
    delta: float = 0.0
    h: float = 0.5
    center: tuple[float, ...] = (0.0, 0.0)
    moment_constant: float | None = field(default=None)

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dim must be at least 2")
        if not self.beta > self.dim / 2:
            raise DomainError("beta must exceed d/2")
        if self.delta < 0:
            raise DomainError("delta must be non-negative")
        if not 0 < self.h < 1:
            raise DomainError("h must lie in (0, 1)")
        center = tuple(float(v) for v in self.center)
        if len(center) != self.dim:
            raise DomainError("center has the wrong dimension")
        object.__setattr__(self, "center", center)
        if self.moment_constant is None:
            object.__setattr__(self, "moment_constant", calibrate_bump(self.dim))

    @property
    def amplitude(self) -> float:
        """``delta h^(beta - d/2)``, the bump height at the centre."""
        return self.delta * self.h ** (self.beta - self.dim / 2)

    @property
    def delta_threshold(self) -> float:
        """Largest admissible delta, ``(2 pi e)^(-d/2) / max(1, ||psi||_inf)``."""
        return (2 * math.pi * math.e) ** (-self.dim / 2) / max(1.0, bump_sup_norm(self.moment_constant))


def f0_eval(cfg: BumpConfig, y) -> float:
    diff = np.asarray(y, dtype=float) - np.asarray(cfg.center)
    return (2 * math.pi) ** (-cfg.dim / 2) * math.exp(-0.5 * float(diff @ diff))


def bump_eval(cfg: BumpConfig, y) -> float:
    """``Psi_{h,x}(y) = psi(|y - x| / h)``."""
    dist = float(np.linalg.norm(np.asarray(y, dtype=float) - np.asarray(cfg.center)))
    return bump_psi(dist / cfg.h, cfg.moment_constant)


def f1_eval(cfg: BumpConfig, y) -> float:
    return f0_eval(cfg, y) + cfg.amplitude * bump_eval(cfg, y)


def separation(cfg: BumpConfig) -> float:
    """``|f1(x) - f0(x)|^2``."""
    x = cfg.center
    return (f1_eval(cfg, x) - f0_eval(cfg, x)) ** 2


# -- reports ----------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    check: str
    params: str
    value: float
    bound: float
    passed: bool

    def row(self) -> dict:
        return {"check": self.check, "params": self.params, "value": self.value,
                "bound": self.bound, "pass": self.passed}


def params_label(cfg: BumpConfig) -> str:
    return f"delta={cfg.delta:.6g};h={cfg.h:.6g};beta={cfg.beta:.6g}"


def _require_plane(cfg: BumpConfig):
    if cfg.dim != 2:
        raise DomainError("lower-bound checks are implemented for d = 2 only")


def bump_integral(cfg: BumpConfig, settings=_FINE) -> float:
    """``int Psi_{h,x}`` over the plane, in polar coordinates about x."""
    _require_plane(cfg)
    cx, cy = cfg.center

    def ring(r):
        return quadrature.integrate(
            lambda th: bump_eval(cfg, (cx + r * math.cos(th), cy + r * math.sin(th))),
            0.0, 2 * math.pi, settings)

    return quadrature.integrate(lambda r: r * ring(r), 0.0, cfg.h, settings)


def lemma_density_check(cfg: BumpConfig, grid_points: int = 401,
                        settings=quadrature.DEFAULT) -> list[CheckResult]:
    """Total mass of f1 (polar quadrature) and its minimum over the bump's box."""
    _require_plane(cfg)
    cx, cy = cfg.center
    reach = settings.gaussian_half_width()

    def ring(r):
        return quadrature.integrate(
            lambda th: f1_eval(cfg, (cx + r * math.cos(th), cy + r * math.sin(th))),
            0.0, 2 * math.pi, settings)

    mass = quadrature.integrate(lambda r: r * ring(r), 0.0, reach, settings, points=[cfg.h])
    t = np.linspace(-cfg.h, cfg.h, grid_points)
    gx, gy = np.meshgrid(cx + t, cy + t)
    dist2 = (gx - cx) ** 2 + (gy - cy) ** 2
    f0 = np.exp(-0.5 * dist2) / (2 * math.pi)
    f1 = f0 + cfg.amplitude * bump_psi(np.sqrt(dist2) / cfg.h, cfg.moment_constant)
    low = float(f1.min())
    return [
        CheckResult("density_mass", params_label(cfg), mass, 1e-6, abs(mass - 1.0) <= 1e-6),
        CheckResult("density_min", params_label(cfg), low, -1e-12, low >= -1e-12),
    ]


# -- Fourier side -------------------------------------------------------------

def bump_radon_profile(v: float, c: float, settings=_FINE) -> float:
    """Line integral of ``psi_c(|y|)`` over {y : y_1 = v}."""
    v = abs(v)
    if v >= 1.0:
        return 0.0
    top = math.sqrt(1.0 - v * v)
    return 2.0 * quadrature.integrate(lambda tau: bump_psi(math.hypot(v, tau), c), 0.0, top, settings)


class BumpSpectrum:
    """Radial Fourier transform of ``psi_c(|y|)`` on the plane.

    By the projection identity the 2-D transform at radius rho equals the
    1-D transform of the line-integral profile, ``2 int_0^1 cos(rho v) P(v) dv``.
    The profile is tabulated once on Gauss-Legendre nodes.
    """

    def __init__(self, c: float, nodes: int = 768):
        x, w = np.polynomial.legendre.leggauss(nodes)
        self.c = c
        self.v = 0.5 * (x + 1.0)
        self.w = 0.5 * w * np.array([bump_radon_profile(v, c) for v in self.v])

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        vals = 2.0 * np.cos(np.multiply.outer(rho, self.v)) @ self.w
        return float(vals) if vals.ndim == 0 else vals


@functools.lru_cache(maxsize=8)
def bump_spectrum(c: float) -> BumpSpectrum:
    return BumpSpectrum(c)


def bump_fourier_nested(rho: float, c: float, settings=_FINE) -> float:
    """Same transform by polar quadrature of the defining integral (slow; for checks)."""
    def radial(phi):
        w = rho * math.cos(phi)
        if w == 0.0:
            return bump_moment(c, 2, settings)
        return quadrature.integrate(lambda r: r * bump_psi(r, c), 0.0, 1.0, settings, weight="cos", wvar=w)

    return 4.0 * quadrature.integrate(radial, 0.0, math.pi / 2, settings)


def _radial_energy(integrand, chunk: float = 5.0, order: int = 48, rel_tol: float = 1e-13,
                   max_radius: float = 5e3) -> float:
    """``int_0^inf integrand(r) dr`` by composite Gauss-Legendre until chunks stop contributing."""
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    quiet = 0
    a = 0.0
    while a < max_radius:
        r = a + 0.5 * chunk * (x + 1.0)
        part = 0.5 * chunk * float(np.sum(w * integrand(r)))
        total += part
        quiet = quiet + 1 if abs(part) <= rel_tol * max(abs(total), 1e-300) else 0
        if quiet >= 3:
            return total
        a += chunk
    raise NumericalError(f"weighted Fourier energy did not settle below radius {max_radius}")


def sobolev_integral(target: str, beta: float, cfg: BumpConfig | None = None) -> float:
    """``int (1 + |t|^2)^beta |F[g](t)|^2 dt`` on the plane for g in {f0, psi, f1, zero}.

    ``psi`` is the unscaled bump Psi_{1,0}. ``f1`` is expanded as
    |F f0|^2 + cross term + bump term, each integrated on its own scale.
    Raises NumericalError when the partial integrals do not settle.
    """
    if target == "zero":
        return 0.0
    cfg = cfg or BumpConfig(beta=beta)
    _require_plane(cfg)
    two_pi = 2 * math.pi

    def f0_part(r):
        return two_pi * r * (1 + r * r) ** beta * np.exp(-r * r)

    if target == "f0":
        return _radial_energy(f0_part)
    spec = bump_spectrum(cfg.moment_constant)
    if target == "psi":
        return _radial_energy(lambda r: two_pi * r * (1 + r * r) ** beta * spec(r) ** 2)
    if target != "f1":
        raise DomainError(f"unknown Sobolev target {target!r}")
    h, delta = cfg.h, cfg.delta
    scale = delta * h ** (beta + 1)  # F[f1 - f0](t) = delta h^(beta+1) F[Psi_{1,0}](h t) (up to phase)
    cross = _radial_energy(lambda r: 2 * scale * two_pi * r * (1 + r * r) ** beta
                           * np.exp(-r * r / 2) * spec(h * r))
    bump = delta**2 * _radial_energy(lambda r: two_pi * r * (h * h + r * r) ** beta * spec(r) ** 2)
    return _radial_energy(f0_part) + cross + bump


def sobolev_triangle_check(cfg: BumpConfig) -> CheckResult:
    """``S(f1)^(1/2) <= S(f0)^(1/2) + delta S(Psi_{1,0})^(1/2)`` at smoothness cfg.beta."""
    lhs = math.sqrt(sobolev_integral("f1", cfg.beta, cfg))
    rhs = math.sqrt(sobolev_integral("f0", cfg.beta, cfg)) + cfg.delta * math.sqrt(
        sobolev_integral("psi", cfg.beta, cfg))
    return CheckResult("sobolev_triangle", params_label(cfg), lhs, rhs, lhs <= rhs + 1e-8)


# -- divergence --------------------------------------------------------------

def _psi_scalar(r: float, c: float) -> float:
    if r >= 1.0:
        return 0.0
    r2 = r * r
    return (1.0 - c * r2) * math.exp(-r2 / (1.0 - r2))


def radon_bump(cfg: BumpConfig, s, u: float, settings=_FINE) -> float:
    """``R[Psi_{h,x}](s, u)`` by quadrature along the line (d = 2)."""
    _require_plane(cfg)
    s = np.asarray(s, dtype=float)
    x = np.asarray(cfg.center)
    # points u s + tau s_perp; distance to x is hypot(u - <x, s>, tau - <x, s_perp>)
    gap = u - float(s @ x)
    mid = float(-s[1] * x[0] + s[0] * x[1])
    h, c = cfg.h, cfg.moment_constant

    def along(tau):
        return _psi_scalar(math.hypot(gap, tau - mid) / h, c)

    return quadrature.integrate(along, mid - h, mid + h, settings, points=[mid])


def chi2_constant(d: int = 2) -> float:
    """``(rho_d + (2 pi)^d) (2 pi e)^(-1/2)``."""
    return (rho_d(d) + (2 * math.pi) ** d) * (2 * math.pi * math.e) ** -0.5


def chi2_divergence(cfg: BumpConfig, settings=quadrature.DEFAULT) -> float:
    """Chi-square divergence between the PET laws of f1 and f0.

    ``rho_d^-1 int_S int |R[f1 - f0]|^2 / R[f0] du ds``; R[f0](s, u) is the
    standard normal density at u - <x, s>, and R[f1 - f0](s, .) vanishes
    outside <x, s> +- h.
    """
    _require_plane(cfg)
    if cfg.delta == 0.0:
        return 0.0
    x = np.asarray(cfg.center)
    amp = cfg.amplitude

    def inner(th):
        s = np.array([math.cos(th), math.sin(th)])
        c = float(s @ x)

        def integrand(u):
            diff = amp * radon_bump(cfg, s, u, settings)
            return diff * diff / (math.exp(-0.5 * (u - c) ** 2) / math.sqrt(2 * math.pi))

        return quadrature.integrate(integrand, c - cfg.h, c + cfg.h, settings, points=[c])

    return quadrature.integrate(inner, 0.0, 2 * math.pi, settings) / rho_d(2)


def chi2_bound_check(cfg: BumpConfig, settings=quadrature.DEFAULT) -> CheckResult:
    value = chi2_divergence(cfg, settings)
    bound = cfg.delta**2 * cfg.h ** (2 * cfg.beta + cfg.dim - 1) * chi2_constant(cfg.dim)
    return CheckResult("chi2_bound", params_label(cfg), value, bound, value <= bound)


def separation_check(cfg: BumpConfig) -> CheckResult:
    value = separation(cfg)
    expected = cfg.delta**2 * cfg.h ** (2 * cfg.beta - cfg.dim)
    ok = abs(value - expected) <= 4 * np.finfo(float).eps * max(expected, 1e-300)
    return CheckResult("separation", params_label(cfg), value, expected, bool(ok))


# -- rates -------------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundRate:
    h: float
    separation: float
    exponent: Fraction | float
    rate: float


def rate_exponent(beta, d):
    """``(2 beta - d) / (2 beta + d - 1)``; exact when beta is int or Fraction."""
    if not isinstance(d, int) or d < 1:
        raise DomainError("d must be a positive integer")
    if not beta > Fraction(d, 2):
        raise DomainError("beta must exceed d/2")
    if isinstance(beta, (int, Fraction)):
        beta = Fraction(beta)
    return (2 * beta - d) / (2 * beta + d - 1)


def lower_bound_rate(beta, d: int, n: int, delta: float = 1.0, log: bool = False) -> LowerBoundRate:
    """Bandwidth, squared separation and rate for the two-point construction.

    With ``log`` set, ``beta`` plays the role of the smaller smoothness beta'
    and the bandwidth is ``(n / log n)^(-1/(2 beta' + d - 1))``.
    """
    if not beta > Fraction(d, 2):
        raise DomainError("beta must exceed d/2")
    if n < 2:
        raise DomainError("n must be at least 2")
    b = float(beta)
    eff = n / math.log(n) if log else float(n)
    h = eff ** (-1.0 / (2 * b + d - 1))
    expo = rate_exponent(beta, d)
    return LowerBoundRate(h, delta**2 * h ** (2 * b - d), expo, eff ** (-float(expo)))
