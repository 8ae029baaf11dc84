"""Moments E[(X_t/t)^r] by three routes.

``empirical_moment`` reads them off a simulated distribution, ``xspace_moment``
integrates a limit density, and ``kspace_moment`` integrates the Fourier-side
expression over k in [0, π] built from h(k), v(k) and the initial Fourier
profile.  The last two are the same integral before and after the change of
variables x = h(k), so their agreement checks the density formulas.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy import integrate

from ._quadrature import QuadratureError, composite_converged
from .initial_state import InitCoin, WeightSpec
from .limit_laws import (
    SpectralContext,
    TiltedDensity,
    dispersion_h,
    eigenvector_v,
    normalized_weight,
)
from .walk import ProbabilityDistribution

__all__ = [
    "MomentReport",
    "empirical_moment",
    "xspace_moment",
    "kspace_moment",
    "kspace_moments",
    "moment_report",
]


def empirical_moment(dist: ProbabilityDistribution, r: int) -> float:
    """Σ_x (x/t)^r P(X_t = x)."""
    if r < 0:
        raise ValueError("moment order must be non-negative")
    if dist.time < 1:
        raise ValueError("empirical moments need t >= 1")
    y = dist.positions / dist.time
    return float(np.dot(y**r, dist.probs))


def xspace_moment(density: TiltedDensity, r: int) -> float:
    """∫ x^r density(x) dx, integrated in u with x = |c| sin u."""
    if r < 0:
        raise ValueError("moment order must be non-negative")
    cc = density.context.edge

    def integrand(u):
        arr = np.array([u])
        return float((cc * np.sin(arr[0])) ** r * density.u_integrand(arr)[0])

    points = np.union1d([0.0], density.kinks_u())
    val, err = integrate.quad(
        integrand,
        -np.pi / 2,
        np.pi / 2,
        points=points,
        epsabs=1e-13,
        epsrel=1e-13,
        limit=max(400, 4 * len(points)),
    )
    if err > 1e-10:
        raise QuadratureError(f"x-space moment r={r} did not converge", err)
    return val


def _kspace_breakpoints(w: WeightSpec) -> list[float]:
    if w.kind == "tabulated":
        k = w.table_k
        inner = k[(k > 0) & (k < np.pi)]
        return [0.0, *inner.tolist(), np.pi]
    return [0.0, np.pi / 2, np.pi]


def kspace_moments(
    w: WeightSpec, ctx: SpectralContext, coin: InitCoin, orders: Sequence[int]
) -> NDArray[np.float64]:
    """Limit moments from the Fourier-side integral, one per order.

    (1/2π) ∫_0^π h(k)^r [ |⟨v(k), Ψ(k)⟩|² + |⟨v(-k), Ψ(-k)⟩|²
                          + (-1)^r ( |⟨v̄(π-k), Ψ(k)⟩|² + |⟨v̄(π+k), Ψ(-k)⟩|² ) ] dk

    with Ψ(k) = F(k)·(α, β) and v̄ the componentwise conjugate.
    """
    orders = np.asarray(orders, dtype=int)
    if np.any(orders < 0):
        raise ValueError("moment order must be non-negative")
    F = normalized_weight(w)
    ab = coin.vector

    def overlap(vec, k):
        # ⟨vec, F(k)(α, β)⟩ with vec already conjugated as needed
        return F(k) * (np.conj(vec) @ ab)

    def integrand(k):
        h = dispersion_h(ctx, k)
        same = (
            np.abs(overlap(eigenvector_v(ctx, k), k)) ** 2
            + np.abs(overlap(eigenvector_v(ctx, -k), -k)) ** 2
        )
        mirror = (
            np.abs(overlap(np.conj(eigenvector_v(ctx, np.pi - k)), k)) ** 2
            + np.abs(overlap(np.conj(eigenvector_v(ctx, np.pi + k)), -k)) ** 2
        )
        sign = np.where(orders % 2 == 0, 1.0, -1.0)
        return h[:, None] ** orders[None, :] * (same[:, None] + sign[None, :] * mirror[:, None]) / (
            2 * np.pi
        )

    return composite_converged(integrand, _kspace_breakpoints(w), panels=8, order=12)


def kspace_moment(w: WeightSpec, ctx: SpectralContext, coin: InitCoin, r: int) -> float:
    return float(kspace_moments(w, ctx, coin, [r])[0])


@dataclass(frozen=True)
class MomentReport:
    order: int
    simulated: float
    xspace: float
    kspace: float
    t: int

    @property
    def discrepancies(self) -> dict[str, float]:
        return {
            "sim_x": abs(self.simulated - self.xspace),
            "sim_k": abs(self.simulated - self.kspace),
            "k_x": abs(self.kspace - self.xspace),
        }


def moment_report(
    dist: ProbabilityDistribution,
    density: TiltedDensity,
    w: WeightSpec,
    orders: Sequence[int],
) -> list[MomentReport]:
    ks = kspace_moments(w, density.context, density.coin, orders)
    return [
        MomentReport(int(r), empirical_moment(dist, r), xspace_moment(density, r), float(k), dist.time)
        for r, k in zip(orders, ks)
    ]
