"""Pointwise spectral cut-off estimator and Goldenshluger-Lepski cut-off selection.

For a query point x and a sample (S_i, U_i), i = 1..n:

    f_hat_m(x) = mean_i K_m(<S_i, x> - U_i)
    mu_hat_m   = mean_i m K_1(m (<S_i, x> - U_i))^2
    V_hat(m)   = 2 chi (1 + mu_hat_m) m^(2d-1) log(n) / n
    A_hat(m)   = max_{m'} (|f_hat_{min(m, m')} - f_hat_{m'}|^2 - V_hat(m'))_+
    m_hat      = argmin_m A_hat(m) + V_hat(m)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from petdensity.errors import DomainError
from petdensity.kernel import DEFAULT_TAYLOR_THRESHOLD, kernel_constant, kernel_profile
from petdensity.models import Sample

THEORY = "theory"
FRACTIONAL = "frac"

DEFAULT_CHI = 0.003
# chi >= 24 is the range covered by the oracle inequality for the selected estimator
THEORY_CHI = 24.0


@dataclass(frozen=True)
class CutoffGrid:
    values: tuple[float, ...]
    rule: str = FRACTIONAL
    step: float | None = None
    cap: float = math.inf

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise DomainError("cut-off grid is empty")
        if values[0] <= 0 or any(b <= a for a, b in zip(values, values[1:])):
            raise DomainError("cut-off grid must be positive and strictly increasing")
        if values[-1] > self.cap:
            raise DomainError("cut-off grid exceeds its cap")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)

    @classmethod
    def of(cls, values) -> "CutoffGrid":
        values = tuple(float(v) for v in values)
        return cls(values, rule="custom", cap=max(values) if values else math.inf)


@dataclass(frozen=True)
class SelectionConfig:
    chi: float
    grid: CutoffGrid

    def __post_init__(self):
        if not self.chi > 0:
            raise DomainError("chi must be positive")


@dataclass(frozen=True)
class TraceRecord:
    m: float
    f_hat: float
    mu_hat: float
    v_hat: float
    a_hat: float

    @property
    def objective(self) -> float:
        return self.a_hat + self.v_hat


@dataclass(frozen=True)
class SelectionTrace:
    x: tuple[float, ...]
    per_m: tuple[TraceRecord, ...]
    m_hat: float
    f_hat: float
    chi: float
    n: int
    seed: int | None = None
    index: int = field(default=0, repr=False)

    def summary(self) -> dict:
        return {"x": list(self.x), "m_hat": self.m_hat, "f_hat": self.f_hat,
                "chi": self.chi, "n": self.n, "seed": self.seed}


def integer_root_floor(n: int, k: int) -> int:
    """Largest integer j with j**k <= n, in exact integer arithmetic."""
    if n < 1:
        return 0
    j = int(round(n ** (1.0 / k)))
    while j**k > n:
        j -= 1
    while (j + 1) ** k <= n:
        j += 1
    return j


def default_cap(n: int, d: int) -> float:
    """``n^(1/(2d-1))``, exact when n is a perfect power."""
    k = 2 * d - 1
    j = integer_root_floor(n, k)
    return float(j) if j**k == n else n ** (1.0 / k)


def grid_default(n: int, d: int = 2, rule: str = FRACTIONAL, step: float = 0.1,
                 cap_override: float | None = None) -> CutoffGrid:
    """Candidate cut-offs.

    ``theory``: the integers 1, ..., floor(n^(1/(2d-1))).
    ``frac``: multiples of ``step`` up to the cap (default n^(1/(2d-1))).
    """
    if n < 2:
        raise DomainError("grid construction needs n >= 2")
    if rule == THEORY:
        top = integer_root_floor(n, 2 * d - 1)
        if cap_override is not None:
            top = int(math.floor(cap_override))
        if top < 1:
            raise DomainError("theory grid is empty")
        return CutoffGrid(tuple(float(k) for k in range(1, top + 1)), THEORY, None, float(top))
    if rule != FRACTIONAL:
        raise DomainError(f"unknown grid rule {rule!r}")
    if not step > 0:
        raise DomainError("grid step must be positive")
    cap = default_cap(n, d) if cap_override is None else float(cap_override)
    kmax = int(math.floor(cap / step))
    slack = cap * (1 + 1e-12)
    while (kmax + 1) * step <= slack:
        kmax += 1
    while kmax > 0 and kmax * step > slack:
        kmax -= 1
    if kmax < 1:
        raise DomainError(f"fractional grid is empty (cap {cap} < step {step})")
    values = tuple(min(round(k * step, 12), cap) for k in range(1, kmax + 1))
    return CutoffGrid(values, FRACTIONAL, step, cap)


def _require_nonempty(sample: Sample):
    if len(sample) == 0:
        raise DomainError("the sample is empty")


def _kernel_terms(z: np.ndarray, d: int, m: float) -> np.ndarray:
    """``m^d K_1(m z) / m^d`` style helper: returns K_1(m z) for residuals z."""
    return kernel_constant(d) * kernel_profile(z * m, d, DEFAULT_TAYLOR_THRESHOLD)


def estimate_point(sample: Sample, x, m: float) -> float:
    """``f_hat_m(x)``, the sample mean of ``K_m(<S_i, x> - U_i)``."""
    _require_nonempty(sample)
    if not m > 0:
        raise DomainError("cut-off m must be positive")
    d = sample.model.dim
    z = sample.residuals(x)
    return float(m**d * np.mean(_kernel_terms(z, d, m)))


def empirical_mu(sample: Sample, x, m: float) -> float:
    """``mu_hat_m``, the sample mean of ``m K_1(m (<S_i, x> - U_i))^2``."""
    _require_nonempty(sample)
    if not m > 0:
        raise DomainError("cut-off m must be positive")
    z = sample.residuals(x)
    k1 = _kernel_terms(z, sample.model.dim, m)
    return float(m * np.mean(k1 * k1))


def grid_estimates(sample: Sample, x, grid) -> tuple[np.ndarray, np.ndarray]:
    """``(f_hat_m(x), mu_hat_m)`` for every m of the grid, sharing the residuals."""
    _require_nonempty(sample)
    d = sample.model.dim
    z = sample.residuals(x)
    ms = np.asarray(list(grid), dtype=float)
    f_hat = np.empty(ms.shape[0])
    mu_hat = np.empty(ms.shape[0])
    for j, m in enumerate(ms):
        k1 = _kernel_terms(z, d, m)
        f_hat[j] = m**d * np.mean(k1)
        mu_hat[j] = m * np.mean(k1 * k1)
    return f_hat, mu_hat


def v_hat(m, n: int, chi: float, mu_hat, d: int = 2):
    """``2 chi (1 + mu_hat) m^(2d-1) log(n) / n``; vectorises over m and mu_hat."""
    if n < 2:
        raise DomainError("the penalty needs n >= 2")
    m = np.asarray(m, dtype=float)
    val = 2.0 * chi * (1.0 + np.asarray(mu_hat, dtype=float)) * m ** (2 * d - 1) * math.log(n) / n
    return float(val) if np.ndim(val) == 0 else val


def a_hat_values(f_hat: np.ndarray, penalty: np.ndarray) -> np.ndarray:
    """Comparison term on an increasing grid.

    For m' <= m the difference f_hat_{m' ^ m} - f_hat_{m'} vanishes, so only
    larger cut-offs contribute; their terms are (f_m - f_m')^2 - V(m').
    """
    f_hat = np.asarray(f_hat, dtype=float)
    penalty = np.asarray(penalty, dtype=float)
    diff = (f_hat[:, None] - f_hat[None, :]) ** 2 - penalty[None, :]
    upper = np.triu(np.ones_like(diff, dtype=bool), k=1)
    diff = np.where(upper, diff, 0.0)
    return np.maximum(diff.max(axis=1), 0.0)


def select_from_values(f_hat, penalty) -> tuple[int, np.ndarray]:
    """Index of the minimiser of A_hat + V_hat (first one on ties) and the A_hat vector."""
    a = a_hat_values(f_hat, penalty)
    return int(np.argmin(a + np.asarray(penalty))), a


def a_hat(sample: Sample, x, config: SelectionConfig) -> list[tuple[float, float]]:
    n = len(sample)
    f_hat, mu = grid_estimates(sample, x, config.grid)
    pen = v_hat(config.grid.as_array(), n, config.chi, mu, sample.model.dim)
    return list(zip(config.grid.values, a_hat_values(f_hat, pen).tolist()))


def select_m(sample: Sample, x, config: SelectionConfig) -> SelectionTrace:
    """Data-driven cut-off ``m_hat`` with the full per-m trace."""
    n = len(sample)
    if n < 2:
        raise DomainError("cut-off selection needs n >= 2")
    d = sample.model.dim
    ms = config.grid.as_array()
    f_hat, mu = grid_estimates(sample, x, ms)
    pen = v_hat(ms, n, config.chi, mu, d)
    j, a = select_from_values(f_hat, pen)
    records = tuple(
        TraceRecord(float(m), float(f), float(u), float(v), float(av))
        for m, f, u, v, av in zip(ms, f_hat, mu, np.atleast_1d(pen), a)
    )
    x = tuple(float(v) for v in np.asarray(x, dtype=float).reshape(-1))
    return SelectionTrace(x, records, float(ms[j]), float(f_hat[j]), config.chi, n, sample.seed, j)
