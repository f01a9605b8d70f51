"""Monte Carlo drivers: risk versus sample size, density cuts, lower-bound checks, fixtures.

Seeding: replication r at sample size n uses the sample seed
``derive_seed(master_seed, n, r)``. Replications are independent and may run
in a process pool; results are always aggregated in replication order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from petdensity import io, oracle, svg
from petdensity.errors import DomainError
from petdensity.estimator import (
    DEFAULT_CHI,
    FRACTIONAL,
    SelectionConfig,
    grid_default,
    select_m,
)
from petdensity.minimax_lab import (
    BumpConfig,
    CheckResult,
    params_label,
    bump_integral,
    bump_moment_gauss_legendre,
    bump_sup_norm,
    chi2_bound_check,
    lemma_density_check,
    radon_bump,
    separation_check,
    sobolev_triangle_check,
)
from petdensity.models import DensityModel, density_eval, sample_pet
from petdensity.seeding import derive_seed


@dataclass(frozen=True)
class ExperimentConfig:
    model: DensityModel = field(default_factory=DensityModel.gaussian)
    x_list: tuple[tuple[float, ...], ...] = ((0.0, 0.0),)
    n_list: tuple[int, ...] = (500, 1500, 2500, 3500)
    replications: int = 200
    chi: float = DEFAULT_CHI
    grid_rule: str = FRACTIONAL
    step: float = 0.1
    cap: float | None = None
    master_seed: int = 20240101
    output_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        n_list = tuple(int(n) for n in self.n_list)
        if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
            raise DomainError("n_list must be non-empty and strictly ascending")
        if min(n_list) < 2:
            raise DomainError("every sample size must be at least 2")
        x_list = tuple(tuple(float(v) for v in x) for x in self.x_list)
        if not x_list:
            raise DomainError("x_list must be non-empty")
        if any(len(x) != self.model.dim for x in x_list):
            raise DomainError("query points must match the model dimension")
        if not self.chi > 0:
            raise DomainError("chi must be positive")
        object.__setattr__(self, "n_list", n_list)
        object.__setattr__(self, "x_list", x_list)

    def selection(self, n: int) -> SelectionConfig:
        grid = grid_default(n, self.model.dim, self.grid_rule, self.step, self.cap)
        return SelectionConfig(self.chi, grid)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["model"] = self.model.to_dict()
        out["x_list"] = [list(x) for x in self.x_list]
        out["n_list"] = list(self.n_list)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "model" in data and isinstance(data["model"], dict):
            data["model"] = DensityModel.from_dict(data["model"])
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        if "x_list" in data:
            data["x_list"] = tuple(tuple(x) for x in data["x_list"])
        if "n_list" in data:
            data["n_list"] = tuple(data["n_list"])
        return cls(**data)

    def updated(self, **changes) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _replicate(args):
    model, n, seed, xs, selection = args
    sample = sample_pet(model, n, seed)
    out = []
    for x in xs:
        trace = select_m(sample, x, selection)
        out.append((trace.m_hat, trace.f_hat))
    return out


def _run_replications(cfg: ExperimentConfig, n: int, xs) -> list[list[tuple[float, float]]]:
    selection = cfg.selection(n)
    jobs = [(cfg.model, n, derive_seed(cfg.master_seed, n, r), xs, selection)
            for r in range(cfg.replications)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return list(pool.map(_replicate, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    return [_replicate(job) for job in jobs]


# -- risk versus n ------------------------------------------------------------

@dataclass(frozen=True)
class RiskResult:
    n: int
    x: tuple[float, ...]
    m_hat: tuple[float, ...]
    f_hat: tuple[float, ...]
    truth: float
    mse: float
    se: float


def summarize_risk(n: int, x, m_hat, f_hat, truth: float) -> RiskResult:
    f_hat = np.asarray(f_hat, dtype=float)
    sq = (f_hat - truth) ** 2
    mse = float(np.mean(sq))
    se = float(np.std(sq, ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else 0.0
    return RiskResult(n, tuple(x), tuple(float(v) for v in m_hat), tuple(f_hat.tolist()), truth, mse, se)


def loglog_slope(ns, mses) -> float | None:
    if len(ns) < 2:
        return None
    return float(np.polyfit(np.log(np.asarray(ns, float)), np.log(np.asarray(mses, float)), 1)[0])


def run_rate(cfg: ExperimentConfig, write: bool = True) -> tuple[list[RiskResult], float | None]:
    """Empirical MSE of the data-driven estimator at ``cfg.x_list[0]`` for each n."""
    x = cfg.x_list[0]
    truth = density_eval(cfg.model, x)
    results = []
    for n in cfg.n_list:
        reps = _run_replications(cfg, n, [x])
        m_hat = [r[0][0] for r in reps]
        f_hat = [r[0][1] for r in reps]
        results.append(summarize_risk(n, x, m_hat, f_hat, truth))
    slope = loglog_slope([r.n for r in results], [r.mse for r in results])
    if write:
        write_rate(cfg, results, slope)
    return results, slope


def rate_summary(cfg: ExperimentConfig, results: list[RiskResult], slope) -> dict:
    return {
        "config": cfg.to_dict(),
        "x": list(results[0].x),
        "truth": results[0].truth,
        "rows": [{"n": r.n, "mse": r.mse, "se": r.se} for r in results],
        "slope": slope,
    }


def write_rate(cfg: ExperimentConfig, results: list[RiskResult], slope) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_rows(out / "rate_replications.csv", ["n", "replication", "m_hat", "f_hat"],
                  ([r.n, k, m, f] for r in results for k, (m, f) in enumerate(zip(r.m_hat, r.f_hat))))
    io.write_rows(out / "rate.csv", ["n", *(f"x_{k + 1}" for k in range(len(results[0].x))), "mse", "se"],
                  ([r.n, *r.x, r.mse, r.se] for r in results))
    io.write_json(out / "rate.json", rate_summary(cfg, results, slope))
    chart = svg.Chart(f"Pointwise risk at x = {tuple(results[0].x)} ({cfg.model.kind})",
                      "sample size n", "empirical MSE", log_x=True, log_y=True)
    ns = [r.n for r in results]
    chart.series.append(svg.Series(ns, [r.mse for r in results], "MSE", markers=True))
    if slope is not None and all(r.mse > 0 for r in results):
        b = np.polyfit(np.log(ns), np.log([r.mse for r in results]), 1)
        chart.series.append(svg.Series(ns, [math.exp(b[1]) * n ** b[0] for n in ns],
                                       f"fit slope {slope:.3f}", dashed=True))
    chart.save(out / "rate.svg")
    return out


def reaggregate_rate(output_dir) -> dict:
    """Recompute the rate summary from ``rate_replications.csv``."""
    out = Path(output_dir)
    summary = io.read_json(out / "rate.json")
    cfg = ExperimentConfig.from_dict(summary["config"])
    rows = io.read_rows(out / "rate_replications.csv")
    truth = summary["truth"]
    results = []
    for n in cfg.n_list:
        sel = [r for r in rows if int(r["n"]) == n]
        sel.sort(key=lambda r: int(r["replication"]))
        results.append(summarize_risk(n, cfg.x_list[0], [float(r["m_hat"]) for r in sel],
                                      [float(r["f_hat"]) for r in sel], truth))
    slope = loglog_slope([r.n for r in results], [r.mse for r in results])
    return rate_summary(cfg, results, slope)


# -- cuts ---------------------------------------------------------------------

@dataclass(frozen=True)
class CutPoint:
    cut: str
    t: float
    x: tuple[float, float]
    truth: float
    estimates: tuple[float, ...]
    q05: float
    q50: float
    q95: float


def _quantiles(values) -> tuple[float, float, float]:
    q = np.quantile(np.asarray(values, dtype=float), [0.05, 0.5, 0.95])
    return float(q[0]), float(q[1]), float(q[2])


def cut_points(width: float, points: int) -> list[float]:
    if points < 1 or not width > 0:
        raise DomainError("cuts need points >= 1 and width > 0")
    # rounded so that grid points such as 1.3 are hit exactly
    return [round(float(t), 12) + 0.0 for t in np.linspace(-width, width, points)]


def run_cuts(cfg: ExperimentConfig, ts, write: bool = True) -> list[CutPoint]:
    """Quantile bands of the data-driven estimate along the horizontal and vertical lines.

    Each replication draws one sample of size ``cfg.n_list[0]`` and evaluates
    every point of both cuts on it.
    """
    if cfg.model.dim != 2:
        raise DomainError("cuts are defined for d = 2")
    ts = [float(t) for t in ts]
    xs = [(t, 0.0) for t in ts] + [(0.0, t) for t in ts]
    n = cfg.n_list[0]
    reps = _run_replications(cfg, n, xs)
    points = []
    for j, x in enumerate(xs):
        est = tuple(float(r[j][1]) for r in reps)
        cut = "horizontal" if j < len(ts) else "vertical"
        t = ts[j % len(ts)]
        points.append(CutPoint(cut, t, x, density_eval(cfg.model, x), est, *_quantiles(est)))
    if write:
        write_cuts(cfg, points)
    return points


def cuts_summary(cfg: ExperimentConfig, points: list[CutPoint]) -> dict:
    return {
        "config": cfg.to_dict(),
        "n": cfg.n_list[0],
        "points": [{"cut": p.cut, "t": p.t, "truth": p.truth, "q05": p.q05, "q50": p.q50, "q95": p.q95}
                   for p in points],
    }


def write_cuts(cfg: ExperimentConfig, points: list[CutPoint]) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_rows(out / "cuts_replications.csv", ["cut", "t", "replication", "f_hat"],
                  ([p.cut, p.t, k, f] for p in points for k, f in enumerate(p.estimates)))
    for cut in ("horizontal", "vertical"):
        sel = [p for p in points if p.cut == cut]
        io.write_rows(out / f"cuts_{cut}.csv", ["t", "x_1", "x_2", "truth", "q05", "q50", "q95"],
                      ([p.t, *p.x, p.truth, p.q05, p.q50, p.q95] for p in sel))
        chart = svg.Chart(f"{cut} cut, {cfg.model.kind}, n = {cfg.n_list[0]}", "t", "density")
        chart.bands.append(svg.Band([p.t for p in sel], [p.q05 for p in sel], [p.q95 for p in sel]))
        chart.series.append(svg.Series([p.t for p in sel], [p.truth for p in sel], "true f"))
        chart.series.append(svg.Series([p.t for p in sel], [p.q50 for p in sel], "median estimate", dashed=True))
        chart.save(out / f"cuts_{cut}.svg")
    io.write_json(out / "cuts.json", cuts_summary(cfg, points))
    return out


def reaggregate_cuts(output_dir) -> dict:
    out = Path(output_dir)
    summary = io.read_json(out / "cuts.json")
    cfg = ExperimentConfig.from_dict(summary["config"])
    rows = io.read_rows(out / "cuts_replications.csv")
    points = []
    for p in summary["points"]:
        sel = [r for r in rows if r["cut"] == p["cut"] and float(r["t"]) == p["t"]]
        sel.sort(key=lambda r: int(r["replication"]))
        est = tuple(float(r["f_hat"]) for r in sel)
        x = (p["t"], 0.0) if p["cut"] == "horizontal" else (0.0, p["t"])
        points.append(CutPoint(p["cut"], p["t"], x, density_eval(cfg.model, x), est, *_quantiles(est)))
    return cuts_summary(cfg, points)


# -- lower bound --------------------------------------------------------------

def run_lowerbound(deltas, hs, betas, center=(0.0, 0.0)) -> list[CheckResult]:
    """Density, separation, chi-square, Sobolev and support checks over a parameter grid."""
    rows = []
    for beta in betas:
        for delta in deltas:
            for h in hs:
                cfg = BumpConfig(dim=2, beta=beta, delta=delta, h=h, center=tuple(center))
                rows += lemma_density_check(cfg)
                rows.append(separation_check(cfg))
                rows.append(chi2_bound_check(cfg))
                rows.append(sobolev_triangle_check(cfg))
                mass = bump_integral(cfg)
                rows.append(CheckResult("bump_mass", params_label(cfg), mass, 1e-8, abs(mass) <= 1e-8))
                rows.append(radon_support_check(cfg))
    return rows


def radon_support_check(cfg: BumpConfig, directions: int = 8) -> CheckResult:
    """Largest ``|R[Psi_{h,x}](s, u)|`` over |u - <x, s>| in (h, h + 1]."""
    worst = 0.0
    x = np.asarray(cfg.center)
    for k in range(directions):
        th = 2 * math.pi * k / directions
        s = np.array([math.cos(th), math.sin(th)])
        c = float(s @ x)
        for gap in np.linspace(cfg.h * 1.0001, cfg.h + 1.0, 9):
            for sign in (-1.0, 1.0):
                worst = max(worst, abs(radon_bump(cfg, s, c + sign * gap)))
    return CheckResult("radon_support", params_label(cfg), worst, 0.0, worst == 0.0)


def write_lowerbound(rows: list[CheckResult], path) -> None:
    io.write_rows(path, ["check", "params", "value", "bound", "pass"],
                  ([r.check, r.params, float(r.value), float(r.bound), str(r.passed).lower()] for r in rows))


# -- fixtures -----------------------------------------------------------------

FIXTURE_FILE = "golden.csv"


def generate_fixtures(out_dir) -> Path:
    """Golden values from independent code paths.

    * f_m(x) for the standard Gaussian by plain polar Riemann sums (2000 x 2000);
    * the bump constant c (d = 2) as the ratio of two Gauss-Legendre moments,
      since the moment is affine in c: A - c B.
    """
    rows = []
    for x, m in (((0.0, 0.0), 2.0), ((1.0, 0.0), 2.0), ((0.5, 0.5), 4.0)):
        val = oracle.f_m_riemann((0.0, 0.0), 1.0, x, m)
        rows.append(("f_m", {"model": "gaussian", "sigma": 1.0, "x1": x[0], "x2": x[1], "m": m}, val, 1e-6))
    a = bump_moment_gauss_legendre(0.0, 2)
    b = bump_moment_gauss_legendre(0.0, 2) - bump_moment_gauss_legendre(1.0, 2)
    c = a / b
    rows.append(("bump_c", {"d": 2}, c, 1e-9))
    rows.append(("bump_sup_norm", {"d": 2}, bump_sup_norm(c), 1e-12))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_fixtures(out / FIXTURE_FILE, rows)
    return out / FIXTURE_FILE


__all__ = [
    "CutPoint",
    "ExperimentConfig",
    "RiskResult",
    "cut_points",
    "generate_fixtures",
    "reaggregate_cuts",
    "reaggregate_rate",
    "run_cuts",
    "run_lowerbound",
    "run_rate",
    "write_lowerbound",
]
