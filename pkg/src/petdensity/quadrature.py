"""Adaptive 1-D quadrature shared by the oracles.

Backed by QUADPACK (``scipy.integrate.quad``, adaptive Gauss-Kronrod 21).
Nested integrals are built by composing :func:`integrate` calls.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _integrate

from petdensity.errors import NumericalError


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-10
    max_depth: int = 40
    truncation_floor: float = 1e-16

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")
        if not 0 < self.truncation_floor < 1:
            raise ValueError("truncation_floor must lie in (0, 1)")

    @property
    def limit(self) -> int:
        # subinterval budget for QUADPACK
        return 10 * self.max_depth

    def gaussian_half_width(self) -> float:
        """Half-width (in standard deviations) beyond which a Gaussian is below the floor."""
        return math.sqrt(2.0 * math.log(1.0 / self.truncation_floor))


DEFAULT = QuadratureSettings()


def integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    settings: QuadratureSettings = DEFAULT,
    points: Sequence[float] | None = None,
    weight: str | None = None,
    wvar: float | None = None,
) -> float:
    """Integrate ``func`` over [a, b] to ``settings.abs_tol``.

    Raises NumericalError when QUADPACK reports an error estimate well above
    the requested tolerance.
    """
    if a == b:
        return 0.0
    kwargs = dict(epsabs=settings.abs_tol, epsrel=1e-13, limit=settings.limit)
    if points is not None:
        inner = sorted(p for p in points if a < p < b)
        if inner:
            kwargs["points"] = inner
    if weight is not None:
        kwargs["weight"] = weight
        kwargs["wvar"] = wvar
        kwargs.pop("points", None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        value, err = _integrate.quad(func, a, b, **kwargs)[:2]
    if not math.isfinite(value) or err > max(1e3 * settings.abs_tol, 1e-9 * abs(value)):
        raise NumericalError(
            f"quadrature on [{a}, {b}] did not converge: value={value}, error estimate={err}"
        )
    return value
