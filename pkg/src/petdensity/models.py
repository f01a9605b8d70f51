"""Reference densities, their Radon and Fourier data, and the PET sampler.

The PET observation model: pairs (S, U) on the sphere times the real line
with joint density ``R[f](s, u) / rho_d``. Since every projection
``u -> R[f](s, u)`` integrates to one, S is uniform on the sphere and, given
S = s, U is distributed as ``<s, X>`` for X ~ f. :func:`sample_pet` draws
exactly that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import special

from petdensity import quadrature, seeding
from petdensity.errors import AssumptionViolated, DomainError

GAUSSIAN = "gaussian"
DISK = "disk"


def rho_d(d: int) -> float:
    """Surface area of the unit sphere in R^d, ``2 pi^(d/2) / Gamma(d/2)``."""
    if d < 1:
        raise DomainError(f"dimension must be at least 1, got {d}")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class DensityModel:
    """A density on R^d with known Radon and Fourier data.

    ``kind`` is ``"gaussian"`` (isotropic normal with ``mean`` and ``sigma``)
    or ``"disk"`` (uniform on the closed disk of ``radius`` centred at the
    origin, d = 2 only).
    """

    kind: str
    dim: int = 2
    mean: tuple[float, ...] | None = None
    sigma: float = 1.0
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, DISK):
            raise DomainError(f"unknown model kind {self.kind!r}")
        if self.dim < 2:
            raise DomainError("dim must be at least 2")
        if self.kind == GAUSSIAN:
            mean = (0.0,) * self.dim if self.mean is None else tuple(float(v) for v in self.mean)
            if len(mean) != self.dim:
                raise DomainError(f"mean has length {len(mean)}, expected {self.dim}")
            object.__setattr__(self, "mean", mean)
            if not self.sigma > 0:
                raise DomainError("sigma must be positive")
        else:
            if self.dim != 2:
                raise DomainError("the uniform disk model is only defined for dim = 2")
            if not self.radius > 0:
                raise DomainError("radius must be positive")
            object.__setattr__(self, "mean", None)

    @classmethod
    def gaussian(cls, dim: int = 2, mean: Sequence[float] | None = None, sigma: float = 1.0):
        return cls(GAUSSIAN, dim=dim, mean=None if mean is None else tuple(mean), sigma=sigma)

    @classmethod
    def disk(cls, radius: float = 1.0):
        return cls(DISK, dim=2, radius=radius)

    @property
    def is_gaussian(self) -> bool:
        return self.kind == GAUSSIAN

    def to_dict(self) -> dict:
        if self.is_gaussian:
            return {"kind": self.kind, "dim": self.dim, "mean": list(self.mean), "sigma": self.sigma}
        return {"kind": self.kind, "dim": self.dim, "radius": self.radius}

    @classmethod
    def from_dict(cls, data: dict) -> "DensityModel":
        kind = data["kind"]
        if kind == GAUSSIAN:
            return cls.gaussian(dim=int(data.get("dim", 2)), mean=data.get("mean"),
                                sigma=float(data.get("sigma", 1.0)))
        if kind == DISK:
            return cls.disk(radius=float(data.get("radius", 1.0)))
        raise DomainError(f"unknown model kind {kind!r}")


@dataclass(frozen=True)
class Observation:
    s: tuple[float, ...]
    u: float

    def __post_init__(self):
        norm = math.sqrt(sum(v * v for v in self.s))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"direction must be a unit vector, |s| = {norm!r}")


@dataclass(frozen=True, eq=False)
class Sample:
    """An ordered PET sample. Arrays are read-only after construction."""

    directions: np.ndarray
    offsets: np.ndarray
    seed: int
    model: DensityModel = field(repr=False)

    def __post_init__(self):
        directions = np.array(self.directions, dtype=float).reshape(-1, self.model.dim)
        offsets = np.array(self.offsets, dtype=float).reshape(-1)
        if directions.shape[0] != offsets.shape[0]:
            raise DomainError("directions and offsets differ in length")
        if directions.size:
            norms = np.linalg.norm(directions, axis=1)
            if np.max(np.abs(norms - 1.0)) > 1e-12:
                raise DomainError("every direction must be a unit vector")
        directions.flags.writeable = False
        offsets.flags.writeable = False
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "seed", seeding.check_seed(self.seed))

    def __len__(self) -> int:
        return self.offsets.shape[0]

    def __iter__(self) -> Iterator[Observation]:
        for s, u in zip(self.directions, self.offsets):
            yield Observation(tuple(float(v) for v in s), float(u))

    def __getitem__(self, i: int) -> Observation:
        return Observation(tuple(float(v) for v in self.directions[i]), float(self.offsets[i]))

    @property
    def n(self) -> int:
        return len(self)

    def residuals(self, x) -> np.ndarray:
        """``<S_i, x> - U_i`` for every observation."""
        x = _as_point(x, self.model.dim)
        return self.directions @ x - self.offsets

    def permuted(self, order) -> "Sample":
        order = np.asarray(order)
        return Sample(self.directions[order], self.offsets[order], self.seed, self.model)

    def __eq__(self, other):
        if not isinstance(other, Sample):
            return NotImplemented
        return (self.seed == other.seed and self.model == other.model
                and np.array_equal(self.directions, other.directions)
                and np.array_equal(self.offsets, other.offsets))


def _as_point(y, dim: int) -> np.ndarray:
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.shape[0] != dim:
        raise DomainError(f"point has dimension {y.shape[0]}, model has dimension {dim}")
    return y


def _unit(s, dim: int) -> np.ndarray:
    s = _as_point(s, dim)
    if abs(np.linalg.norm(s) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")
    return s


def density_eval(model: DensityModel, y) -> float:
    y = _as_point(y, model.dim)
    if model.is_gaussian:
        r2 = float(np.sum((y - np.asarray(model.mean)) ** 2))
        return (2 * math.pi * model.sigma**2) ** (-model.dim / 2) * math.exp(-r2 / (2 * model.sigma**2))
    if float(np.dot(y, y)) <= model.radius**2:
        return 1.0 / (math.pi * model.radius**2)
    return 0.0


def radon_eval(model: DensityModel, s, u: float) -> float:
    s = _unit(s, model.dim)
    if model.is_gaussian:
        c = float(np.dot(model.mean, s))
        return math.exp(-((u - c) ** 2) / (2 * model.sigma**2)) / math.sqrt(2 * math.pi * model.sigma**2)
    r = model.radius
    if abs(u) > r:
        return 0.0
    return 2.0 * math.sqrt(r * r - u * u) / (math.pi * r * r)


def radon_support(model: DensityModel, s, settings=quadrature.DEFAULT) -> tuple[float, float]:
    """Interval carrying ``u -> R[f](s, u)``; Gaussian tails are cut at the truncation floor."""
    s = _unit(s, model.dim)
    if model.is_gaussian:
        c = float(np.dot(model.mean, s))
        w = model.sigma * settings.gaussian_half_width()
        return c - w, c + w
    return -model.radius, model.radius


def _draw_points(model: DensityModel, rng: np.random.Generator, count: int) -> np.ndarray:
    if model.is_gaussian:
        return np.asarray(model.mean) + model.sigma * rng.standard_normal((count, model.dim))
    # rejection from the bounding square, acceptance pi/4
    r = model.radius
    accepted = []
    have = 0
    while have < count:
        batch = int(math.ceil((count - have) * 1.3)) + 16
        pts = rng.uniform(-r, r, size=(batch, 2))
        pts = pts[np.einsum("ij,ij->i", pts, pts) <= r * r]
        accepted.append(pts)
        have += pts.shape[0]
    return np.concatenate(accepted)[:count]


def sample_pet(model: DensityModel, n: int, seed: int) -> Sample:
    """Draw n i.i.d. PET observations (S, U) with S uniform and U = <S, X>, X ~ f."""
    if n < 0:
        raise DomainError("n must be non-negative")
    seed = seeding.check_seed(seed)
    d = model.dim
    directions = np.empty((n, d))
    offsets = np.empty(n)
    for block, start in enumerate(range(0, n, seeding.BLOCK_SIZE)):
        count = min(seeding.BLOCK_SIZE, n - start)
        rng = seeding.block_generator(seed, block)
        s = rng.standard_normal((count, d))
        s /= np.linalg.norm(s, axis=1, keepdims=True)
        x = _draw_points(model, rng, count)
        directions[start:start + count] = s
        offsets[start:start + count] = np.einsum("ij,ij->i", s, x)
    return Sample(directions, offsets, seed, model)


def fourier_transform(model: DensityModel, t, settings=quadrature.DEFAULT) -> complex:
    """``F[f](t) = int exp(i <t, y>) f(y) dy``."""
    t = _as_point(t, model.dim)
    if model.is_gaussian:
        phase = float(np.dot(t, model.mean))
        return complex(np.exp(1j * phase)) * math.exp(-model.sigma**2 * float(np.dot(t, t)) / 2)
    return complex(disk_fourier_radial(float(np.linalg.norm(t)), model.radius, settings))


def disk_fourier_radial(rho: float, radius: float = 1.0, settings=quadrature.DEFAULT) -> float:
    """Fourier transform of the uniform disk density at frequency radius ``rho``.

    Polar quadrature of the defining integral: the imaginary part cancels by
    symmetry, and the angle is folded onto [0, pi/2].
    """
    if rho == 0.0:
        return 1.0

    def radial(phi):
        w = rho * math.cos(phi)
        if w == 0.0:
            return radius * radius / 2.0
        return quadrature.integrate(lambda r: r, 0.0, radius, settings, weight="cos", wvar=w)

    angular = quadrature.integrate(radial, 0.0, math.pi / 2, settings)
    return 4.0 * angular / (math.pi * radius * radius)


def fourier_modulus(model: DensityModel, t, settings=quadrature.DEFAULT) -> float:
    return abs(fourier_transform(model, t, settings))


def fourier_l1_tail(model: DensityModel, m: float) -> float:
    """``int_{|t| > m} |F[f](t)| dt`` (Gaussian only)."""
    if not m > 0:
        raise DomainError("cut-off must be positive")
    if not model.is_gaussian:
        raise AssumptionViolated(
            "the uniform disk has a non-integrable Fourier transform; the L1 tail is infinite"
        )
    d, sig = model.dim, model.sigma
    # rho_d * int_m^inf r^(d-1) exp(-sig^2 r^2 / 2) dr
    a = d / 2.0
    return rho_d(d) * 2 ** (a - 1) * sig ** (-d) * math.gamma(a) * special.gammaincc(a, sig**2 * m**2 / 2)


def fourier_l1_tail_quadrature(model: DensityModel, m: float, settings=quadrature.DEFAULT) -> float:
    """Radial-quadrature cross-check of :func:`fourier_l1_tail` (Gaussian only)."""
    if not model.is_gaussian:
        raise AssumptionViolated("Fourier transform of the disk is not integrable")
    d, sig = model.dim, model.sigma
    upper = max(m, 0.0) + settings.gaussian_half_width() / sig
    val = quadrature.integrate(lambda r: r ** (d - 1) * math.exp(-sig**2 * r * r / 2), m, upper, settings)
    return rho_d(d) * val
