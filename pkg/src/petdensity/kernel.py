"""Spectral cut-off kernel.

    K_m(u) = rho_d (2 pi)^(-d) int_0^m r^(d-1) cos(u r) dr
           = rho_d (2 pi)^(-d) m^d  int_0^1 r^(d-1) cos(u m r) dr

The second form gives the scaling identity K_m(u) = m^d K_1(u m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate

from petdensity.errors import DomainError
from petdensity.models import rho_d

DEFAULT_TAYLOR_THRESHOLD = 1e-3
_TAYLOR_TERMS = 4


@dataclass(frozen=True)
class KernelSpec:
    dim: int
    m: float
    taylor_threshold: float = DEFAULT_TAYLOR_THRESHOLD

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("dim must be at least 2")
        if not self.m > 0:
            raise DomainError("cut-off m must be positive")
        if not 0 < self.taylor_threshold <= 1:
            raise DomainError("taylor_threshold must lie in (0, 1]")


def kernel_constant(d: int) -> float:
    return rho_d(d) / (2 * math.pi) ** d


def kernel_bound(d: int, m: float) -> float:
    """``K_m(0) = sup |K_m|``."""
    return kernel_constant(d) * m**d / d


def _profile_series(a: np.ndarray, d: int) -> np.ndarray:
    # int_0^1 r^(d-1) cos(a r) dr = sum_k (-1)^k a^(2k) / ((2k)! (2k + d))
    a2 = a * a
    out = np.zeros_like(a)
    term = np.ones_like(a)
    for k in range(_TAYLOR_TERMS):
        out += term / (2 * k + d)
        term = -term * a2 / ((2 * k + 1) * (2 * k + 2))
    return out


def _profile_d2(a: np.ndarray) -> np.ndarray:
    # sin(a)/a + (cos(a) - 1)/a^2, with cos(a) - 1 = -2 sin^2(a/2) to avoid cancellation
    half = np.sin(a / 2) / a
    return np.sin(a) / a - 2.0 * half * half


def _profile_quad(a: float, d: int) -> float:
    if a == 0.0:
        return 1.0 / d
    val = _integrate.quad(lambda r: r ** (d - 1), 0.0, 1.0, weight="cos", wvar=a,
                          epsabs=1e-13, epsrel=1e-13, limit=400)[0]
    return val


def kernel_profile(a, d: int, taylor_threshold: float = DEFAULT_TAYLOR_THRESHOLD) -> np.ndarray:
    """``int_0^1 r^(d-1) cos(a r) dr`` for an array of arguments a."""
    a = np.abs(np.asarray(a, dtype=float))
    out = np.empty_like(a)
    small = a < taylor_threshold
    out[small] = _profile_series(a[small], d)
    big = ~small
    if d == 2:
        out[big] = _profile_d2(a[big])
    else:
        out[big] = [_profile_quad(v, d) for v in a[big]]
    return out


def kernel_values(d: int, m: float, u, taylor_threshold: float = DEFAULT_TAYLOR_THRESHOLD) -> np.ndarray:
    """Vectorised ``K_m(u)``."""
    u = np.asarray(u, dtype=float)
    return kernel_constant(d) * m**d * kernel_profile(u * m, d, taylor_threshold)


def kernel_eval(spec: KernelSpec, u):
    """``K_m(u)`` for a scalar or array ``u``."""
    vals = kernel_values(spec.dim, spec.m, u, spec.taylor_threshold)
    return float(vals) if np.ndim(vals) == 0 else vals


def kernel_scaling_check(d: int, m: float, u: float) -> tuple[float, float]:
    """``(K_m(u), m^d K_1(u m))``, computed independently."""
    if not m > 0:
        raise DomainError("cut-off m must be positive")
    lhs = kernel_eval(KernelSpec(d, m), u)
    rhs = m**d * kernel_eval(KernelSpec(d, 1.0), u * m)
    return lhs, rhs


def kernel_l2_norm_sq(d: int) -> float:
    """``||K_1||_2^2 = rho_d^2 / ((2 pi)^(2d-1) 2 (2d - 1))``."""
    if d < 2:
        raise DomainError("dim must be at least 2")
    return rho_d(d) ** 2 / ((2 * math.pi) ** (2 * d - 1) * 2 * (2 * d - 1))
