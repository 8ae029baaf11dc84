"""Finite-time versus limit-law comparisons: KS distance, overlays, error-rate fits."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .initial_state import (
    DEFAULT_GRID_SIZE,
    DEFAULT_TAIL_TOL,
    InitCoin,
    WeightSpec,
    synthesize_initial,
)
from .limit_laws import TiltedDensity, TwoPointLaw, cdf_grid
from .moments import empirical_moment, xspace_moment
from .walk import ProbabilityDistribution, distribution, evolve

__all__ = [
    "ConvergenceReport",
    "RateFit",
    "Overlay",
    "ks_distance",
    "atom_distance",
    "parity_classes",
    "site_density",
    "density_overlay",
    "fit_power_law",
    "rate_fit",
    "convergence_report",
]

PARITY_THRESHOLD = 1e-6


def ks_distance(dist: ProbabilityDistribution, density: TiltedDensity) -> float:
    """sup_x |F_t(x) - F(x)| with F_t the CDF of X_t/t.

    F_t is a step function, so the supremum is attained at a lattice point,
    either on the step (right value) or just before it (left limit); both are
    checked.
    """
    if dist.time < 1:
        raise ValueError("KS distance needs t >= 1")
    limit = cdf_grid(density, dist.positions / dist.time)
    right = np.cumsum(dist.probs)
    left = right - dist.probs
    return float(max(np.max(np.abs(right - limit)), np.max(np.abs(left - limit))))


def atom_distance(dist: ProbabilityDistribution, law: TwoPointLaw) -> float:
    """Largest mass mismatch at x = ±t; atoms are compared directly, not via CDFs."""
    t = dist.time
    pos = dist.positions

    def mass_at(x):
        hit = pos == x
        return float(dist.probs[hit].sum())

    return max(abs(mass_at(-t) - law.p_minus), abs(mass_at(t) - law.p_plus))


def parity_classes(dist: ProbabilityDistribution) -> tuple[float, float]:
    """Mass on even and on odd sites."""
    even = (dist.positions % 2) == 0
    return float(dist.probs[even].sum()), float(dist.probs[~even].sum())


def site_density(dist: ProbabilityDistribution) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Per-site density estimate of X_t/t at the occupied sites.

    If one parity class is (numerically) empty, occupied sites are 2/t apart
    and probabilities are scaled by t/2; otherwise by t.
    """
    even, odd = parity_classes(dist)
    pos = dist.positions
    if min(even, odd) < PARITY_THRESHOLD:
        keep = (pos % 2 == 0) if even >= odd else (pos % 2 != 0)
        return pos[keep] / dist.time, dist.probs[keep] * dist.time / 2
    return pos / dist.time, dist.probs * dist.time


@dataclass(frozen=True, eq=False)
class Overlay:
    x: NDArray[np.float64]
    simulated: NDArray[np.float64]
    limit: NDArray[np.float64]
    bin_width: float


def density_overlay(
    dist: ProbabilityDistribution,
    density: TiltedDensity,
    bin_width: float,
    x_range: tuple[float, float] | None = None,
) -> Overlay:
    """Histogram of X_t/t next to the bin-averaged limit density.

    Bin edges start half a lattice spacing below the leftmost site, so with
    bin_width = 2/t each bin holds exactly one site of each parity pair.
    ``limit`` is (F(b) - F(a)) / bin_width over each bin [a, b).
    """
    t = dist.time
    if bin_width < 2 / t - 1e-15:
        raise ValueError(f"bin_width must be >= 2/t = {2 / t}")
    y = dist.positions / t
    start = (dist.positions[0] - 0.5) / t
    idx = np.floor((y - start) / bin_width).astype(np.int64)
    nbins = int(idx[-1]) + 1
    mass = np.bincount(idx, weights=dist.probs, minlength=nbins)
    edges = start + bin_width * np.arange(nbins + 1)
    if x_range is not None:
        lo, hi = x_range
        keep = (edges[:-1] >= lo) & (edges[1:] <= hi)
        first = np.flatnonzero(keep)
        mass = mass[keep]
        edges = edges[first[0] : first[-1] + 2] if first.size else edges[:1]
    cdf = cdf_grid(density, edges)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Overlay(centers, mass / bin_width, np.diff(cdf) / bin_width, bin_width)


@dataclass(frozen=True)
class RateFit:
    """log(error) ≈ slope·log(t) + intercept; ``degenerate`` when a fit was impossible."""

    slope: float
    intercept: float
    residual: float
    degenerate: bool = False


def fit_power_law(t_values: Sequence[float], errors: Sequence[float]) -> RateFit:
    t = np.asarray(t_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    if t.size < 3:
        raise ValueError("rate fit needs at least 3 t values")
    if np.any(e <= 0) or not np.all(np.isfinite(e)):
        return RateFit(math.nan, math.nan, math.nan, degenerate=True)
    lt, le = np.log(t), np.log(e)
    coef, res, *_ = np.polyfit(lt, le, 1, full=True)
    residual = float(math.sqrt(res[0] / t.size)) if res.size else 0.0
    return RateFit(float(coef[0]), float(coef[1]), residual)


@dataclass
class ConvergenceReport:
    t_values: list[int]
    orders: list[int]
    ks: list[float]
    # moment_errors[i][j] = |empirical - limit| at t_values[i], orders[j]
    moment_errors: list[list[float]]
    rate: RateFit | None = None
    meta: dict = field(default_factory=dict)

    def errors_for(self, r: int) -> list[float]:
        j = self.orders.index(r)
        return [row[j] for row in self.moment_errors]

    def to_dict(self) -> dict:
        return {
            "t_values": self.t_values,
            "orders": self.orders,
            "ks": self.ks,
            "moment_errors": self.moment_errors,
            "rate": None if self.rate is None else self.rate.__dict__,
            "meta": self.meta,
        }


def rate_fit(report: ConvergenceReport, r: int = 2) -> RateFit:
    """Slope of log |moment error| against log t for order r."""
    return fit_power_law(report.t_values, report.errors_for(r))


def convergence_report(
    w: WeightSpec,
    coin: InitCoin,
    density: TiltedDensity,
    t_values: Sequence[int],
    orders: Sequence[int] = (1, 2, 3, 4),
    grid_size: int = DEFAULT_GRID_SIZE,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ConvergenceReport:
    """Evolve one walk through ascending ``t_values`` and compare against ``density``."""
    t_values = [int(t) for t in t_values]
    if not t_values or any(b <= a for a, b in zip(t_values, t_values[1:])) or t_values[0] < 1:
        raise ValueError("t_values must be positive and strictly ascending")
    theta = density.context.theta
    state, trunc = synthesize_initial(w, coin, grid_size, tail_tol)
    limits = [xspace_moment(density, r) for r in orders]
    ks, errors = [], []
    for t in t_values:
        state = evolve(state, theta, t - state.time)
        dist = distribution(state)
        ks.append(ks_distance(dist, density))
        errors.append([abs(empirical_moment(dist, r) - m) for r, m in zip(orders, limits)])
    report = ConvergenceReport(
        t_values,
        list(orders),
        ks,
        errors,
        meta={"density": density.describe(), "cutoff": trunc.cutoff, "deficit": trunc.deficit},
    )
    if 2 in report.orders and len(t_values) >= 3:
        report.rate = rate_fit(report)
    return report
