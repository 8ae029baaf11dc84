"""Spectral functions of the walk and its limit densities for X_t / t.

Every density lives on (-|c|, |c|) and has the form

    f1(x)·η1(x) + f2(x)·η2(x),

where η1, η2 are built from the normalized weight F(k) = √(2π/W)·w(k) at
±κ(x), κ(x) - π and π - κ(x).  For the built-in seeds this collapses to a
closed form times the tilt bracket 1 - λx.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from ._quadrature import QuadratureError, composite
from .initial_state import KINKS, InitCoin, WeightSpec, erf, weight_eval, weight_norm

__all__ = [
    "DENSITY_KINDS",
    "SpectralContext",
    "TiltedDensity",
    "TwoPointLaw",
    "EigenvectorError",
    "tilt_coefficient",
    "dispersion_h",
    "kappa",
    "norm_N",
    "eigenvector_v",
    "walk_symbol",
    "normalized_weight",
    "f1",
    "f2",
    "eta1",
    "eta2",
    "theorem1_density",
    "closed_form_density",
    "density_for_weight",
    "corollary_pdf",
    "density_cdf",
    "cdf_grid",
    "boolean_law",
]

DENSITY_KINDS = ("konno", "semicircle", "arcsine", "gaussian", "uniform", "general")
SEED_TO_DENSITY = {
    "unit": "konno",
    "semicircle": "semicircle",
    "arcsine": "arcsine",
    "gaussian": "gaussian",
    "uniform": "uniform",
}

# slack allowed on the arccos argument before clamping
KAPPA_SLACK = 1e-12


class EigenvectorError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectralContext:
    theta: float

    def __post_init__(self) -> None:
        c, s = math.cos(self.theta), math.sin(self.theta)
        if min(abs(c), abs(s)) < 1e-6:
            raise ValueError(
                f"theta={self.theta!r} is (nearly) a multiple of pi/2; the walk is trivial there"
            )

    @property
    def c(self) -> float:
        return math.cos(self.theta)

    @property
    def s(self) -> float:
        return math.sin(self.theta)

    @property
    def edge(self) -> float:
        """|c|, the half-width of the support."""
        return abs(self.c)


def tilt_coefficient(ctx: SpectralContext, coin: InitCoin) -> float:
    """λ = |α|² - |β|² + 2s·Re(α·conj β)/c."""
    a, b = coin.alpha, coin.beta
    return abs(a) ** 2 - abs(b) ** 2 + 2 * ctx.s * (a * b.conjugate()).real / ctx.c


def dispersion_h(ctx: SpectralContext, k: ArrayLike) -> NDArray[np.float64]:
    k = np.asarray(k, dtype=float)
    c = ctx.c
    return c * np.cos(k) / np.sqrt(1 - c * c * np.sin(k) ** 2)


def _kappa(ctx: SpectralContext, x: NDArray[np.float64]) -> NDArray[np.float64]:
    arg = abs(ctx.s) * x / (ctx.c * np.sqrt(1 - x * x))
    return np.arccos(np.clip(arg, -1.0, 1.0))


def kappa(ctx: SpectralContext, x: ArrayLike) -> NDArray[np.float64]:
    """Inverse of ``dispersion_h`` on [0, π]."""
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= ctx.edge):
        raise ValueError("kappa is defined only on the open interval (-|c|, |c|)")
    arg = abs(ctx.s) * x / (ctx.c * np.sqrt(1 - x * x))
    if np.any(np.abs(arg) > 1 + KAPPA_SLACK):
        raise ValueError("arccos argument left [-1, 1]")
    return np.arccos(np.clip(arg, -1.0, 1.0))


def norm_N(ctx: SpectralContext, k: ArrayLike) -> NDArray[np.float64]:
    k = np.asarray(k, dtype=float)
    c, s = ctx.c, ctx.s
    root = np.sqrt(1 - c * c * np.sin(k) ** 2)
    return 1 + s * s + c * c * np.cos(2 * k) + 2 * c * np.cos(k) * root


def eigenvector_v(ctx: SpectralContext, k: ArrayLike) -> NDArray[np.complex128]:
    """Unit eigenvector v(k) of the walk symbol, shape ``k.shape + (2,)``."""
    k = np.asarray(k, dtype=float)
    c, s = ctx.c, ctx.s
    n = norm_N(ctx, k)
    if np.any(n <= 1e-14):
        bad = np.atleast_1d(k)[np.atleast_1d(n) <= 1e-14]
        raise EigenvectorError(f"N(k) underflows at k = {bad[:5].tolist()}")
    root = np.sqrt(n)
    v0 = np.exp(1j * k) * s / root
    v1 = -(c * np.cos(k) + np.sqrt(1 - c * c * np.sin(k) ** 2)) / root
    return np.stack([v0, v1 + 0j], axis=-1)


def walk_symbol(ctx: SpectralContext, k: float) -> NDArray[np.complex128]:
    """Û(k) = diag(e^{ik}, e^{-ik})·U."""
    c, s = ctx.c, ctx.s
    u = np.array([[c, s], [s, -c]], dtype=np.complex128)
    return np.diag([np.exp(1j * k), np.exp(-1j * k)]) @ u


def normalized_weight(w: WeightSpec) -> Callable[[ArrayLike], NDArray[np.float64]]:
    """F(k) = √(2π/W)·w(k), so that ∫ F² dk = 2π."""
    scale = math.sqrt(2 * np.pi / weight_norm(w))

    def F(k):
        return scale * weight_eval(w, k)

    return F


def _check_normalization(F: Callable, tol: float = 1e-6) -> None:
    total = float(composite(lambda k: np.asarray(F(k), dtype=float) ** 2, KINKS, 256))
    if abs(total - 2 * np.pi) > tol * 2 * np.pi:
        raise ValueError(f"weight is not normalized: integral of F^2 is {total!r}, expected 2*pi")


def f1(ctx: SpectralContext, coin: InitCoin, x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    lam = tilt_coefficient(ctx, coin)
    root = np.sqrt((ctx.edge - x) * (ctx.edge + x))
    return abs(ctx.s) / (np.pi * (1 - x * x) * root) * (1 - lam * x)


def f2(ctx: SpectralContext, coin: InitCoin, x: ArrayLike) -> NDArray[np.float64]:
    x = np.asarray(x, dtype=float)
    im = (coin.alpha * coin.beta.conjugate()).imag
    return -ctx.s * im / (ctx.edge * np.pi * (1 - x * x))


def eta1(F: Callable, ctx: SpectralContext, x: ArrayLike) -> NDArray[np.float64]:
    k = _kappa(ctx, np.asarray(x, dtype=float))
    return 0.25 * (F(k) ** 2 + F(-k) ** 2 + F(k - np.pi) ** 2 + F(np.pi - k) ** 2)


def eta2(F: Callable, ctx: SpectralContext, x: ArrayLike) -> NDArray[np.float64]:
    k = _kappa(ctx, np.asarray(x, dtype=float))
    return 0.5 * (F(k) ** 2 - F(-k) ** 2 + F(k - np.pi) ** 2 - F(np.pi - k) ** 2)


@dataclass(frozen=True, eq=False)
class TiltedDensity:
    """Limit density of X_t / t on (-|c|, |c|).

    For every kind but ``general`` the density is base(x)·(1 - λx).  Callers
    integrating near the edges should use ``u_integrand``: it is the density
    in the variable x = |c|·sin u (Jacobian included) and stays bounded where
    the x-space density has 1/√(c² - x²) singularities.
    """

    kind: str
    context: SpectralContext
    coin: InitCoin
    sigma: float | None = None
    weight: WeightSpec | None = None
    F: Callable | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in DENSITY_KINDS:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.kind == "gaussian" and (self.sigma is None or not self.sigma > 0):
            raise ValueError("gaussian density needs sigma > 0")
        if self.kind == "general" and self.F is None:
            raise ValueError("general density needs a normalized weight F")
        if abs(self.lam) * self.context.edge > 1 + 1e-12:
            raise ValueError("tilt too large: density would be negative")

    @property
    def lam(self) -> float:
        return tilt_coefficient(self.context, self.coin)

    @property
    def support(self) -> tuple[float, float]:
        return (-self.context.edge, self.context.edge)

    def _weighted(self, x, root):
        """density(x) · √(c² - x²), written so the product has no 0/0 at the edges."""
        ctx = self.context
        cc, s = ctx.edge, ctx.s
        tilt = 1 - self.lam * x
        if self.kind == "konno":
            return abs(s) / (np.pi * (1 - x * x)) * tilt
        if self.kind == "semicircle":
            return 2 * root * root / (np.pi * cc * cc) * tilt
        if self.kind == "arcsine":
            return np.full_like(x, 1 / np.pi) * tilt
        if self.kind == "uniform":
            return root / (2 * cc) * tilt
        if self.kind == "gaussian":
            sig = self.sigma
            z = math.sqrt(2 * np.pi) * sig * erf(cc / (math.sqrt(2) * sig))
            return np.exp(-x * x / (2 * sig * sig)) / z * root * tilt
        # general: f1·η1 + f2·η2, each multiplied by the root
        e1 = eta1(self.F, ctx, x)
        e2 = eta2(self.F, ctx, x)
        im = (self.coin.alpha * self.coin.beta.conjugate()).imag
        return (abs(s) * tilt * e1 - s * im / cc * root * e2) / (np.pi * (1 - x * x))

    def pdf(self, x: ArrayLike) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=float)
        cc = self.context.edge
        inside = np.abs(x) < cc
        out = np.zeros_like(x)
        xi = x[inside]
        root = np.sqrt((cc - xi) * (cc + xi))
        out[inside] = self._weighted(xi, root) / root
        return out

    __call__ = pdf

    def u_integrand(self, u: ArrayLike) -> NDArray[np.float64]:
        """pdf(|c| sin u)·|c| cos u for u in [-π/2, π/2]."""
        u = np.asarray(u, dtype=float)
        cc = self.context.edge
        return self._weighted(cc * np.sin(u), cc * np.cos(u))

    def cdf(self, x: ArrayLike) -> NDArray[np.float64]:
        return density_cdf(self, x)

    def kinks_u(self) -> NDArray[np.float64]:
        """Interior u where the density is not smooth (images of tabulated nodes)."""
        if self.weight is None or self.weight.kind != "tabulated":
            return np.empty(0)
        xk = dispersion_h(self.context, self.weight.table_k)
        u = np.unique(np.round(np.arcsin(np.clip(xk / self.context.edge, -1, 1)), 14))
        return u[np.abs(u) < np.pi / 2 - 1e-12]

    def describe(self) -> dict:
        out = {"kind": self.kind, "theta": self.context.theta, "lambda": self.lam}
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.weight is not None:
            out["weight"] = self.weight.describe()
        return out


def theorem1_density(
    weight: WeightSpec | Callable, ctx: SpectralContext, coin: InitCoin
) -> TiltedDensity:
    """Density f1·η1 + f2·η2 for an arbitrary weight.

    ``weight`` is either a WeightSpec (normalized here) or an already
    normalized F with ∫ F² dk = 2π; the normalization is checked to 1e-6.
    """
    if isinstance(weight, WeightSpec):
        if weight.kind not in ("unit", "tabulated") and abs(weight.theta - ctx.theta) > 1e-12:
            raise ValueError("weight seed and spectral context use different theta")
        F = normalized_weight(weight)
        spec = weight
    else:
        F, spec = weight, None
    _check_normalization(F)
    return TiltedDensity("general", ctx, coin, weight=spec, F=F)


def closed_form_density(
    kind: str, ctx: SpectralContext, coin: InitCoin, sigma: float | None = None
) -> TiltedDensity:
    if kind == "general":
        raise ValueError("use theorem1_density for general weights")
    return TiltedDensity(kind, ctx, coin, sigma=sigma)


def density_for_weight(w: WeightSpec, ctx: SpectralContext, coin: InitCoin) -> TiltedDensity:
    """Closed form for the built-in seeds, the general density otherwise."""
    if w.kind in SEED_TO_DENSITY:
        if w.kind != "unit" and abs(w.theta - ctx.theta) > 1e-12:
            raise ValueError("weight seed and spectral context use different theta")
        return TiltedDensity(SEED_TO_DENSITY[w.kind], ctx, coin, sigma=w.sigma, weight=w)
    return theorem1_density(w, ctx, coin)


def corollary_pdf(
    w: WeightSpec, ctx: SpectralContext, coin: InitCoin, x: ArrayLike
) -> NDArray[np.float64]:
    """f1(x)·F(κ(x))², valid when |F(k - π)| = |F(-k)| = |F(k)|."""
    x = np.asarray(x, dtype=float)
    F = normalized_weight(w)
    return f1(ctx, coin, x) * F(_kappa(ctx, x)) ** 2


def density_cdf(density: TiltedDensity, x: ArrayLike) -> NDArray[np.float64] | float:
    """P(Y <= x) by adaptive quadrature in u, where y = |c| sin u."""
    cc = density.context.edge
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    kinks = density.kinks_u()
    for i, xv in enumerate(xs):
        if xv <= -cc:
            out[i] = 0.0
        elif xv >= cc:
            out[i] = 1.0
        else:
            upper = math.asin(xv / cc)
            points = kinks[kinks < upper]
            val, err = integrate.quad(
                lambda u: float(density.u_integrand(np.array([u]))[0]),
                -np.pi / 2,
                upper,
                points=points if points.size else None,
                epsabs=1e-13,
                epsrel=1e-12,
                limit=max(200, 4 * points.size),
            )
            if err > 1e-9:
                raise QuadratureError(f"cdf quadrature at x={xv} did not converge", err)
            out[i] = val
    return float(out[0]) if scalar else out


def cdf_grid(density: TiltedDensity, x: ArrayLike, order: int = 8) -> NDArray[np.float64]:
    """Vectorized CDF at many points: cumulative Gauss-Legendre in u between sorted points.

    A fixed 256-panel u grid and the density's kinks are merged in, so every
    step is short and smooth.
    """
    cc = density.context.edge
    x = np.asarray(x, dtype=float)
    u = np.arcsin(np.clip(x, -cc, cc) / cc)
    grid = np.unique(
        np.concatenate([np.linspace(-np.pi / 2, np.pi / 2, 257), density.kinks_u(), u.ravel()])
    )
    left, right = grid[:-1], grid[1:]
    xg, wg = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (right - left)
    nodes = 0.5 * (right + left)[:, None] + half[:, None] * xg[None, :]
    seg = (density.u_integrand(nodes.ravel()).reshape(nodes.shape) * wg).sum(axis=1) * half
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    idx = np.searchsorted(grid, u)
    out = cum[idx]
    out = np.where(x <= -cc, 0.0, out)
    out = np.where(x >= cc, 1.0, out)
    return out


@dataclass(frozen=True)
class TwoPointLaw:
    """Atoms at -1 and +1."""

    p_minus: float
    p_plus: float

    def __post_init__(self) -> None:
        if self.p_minus < 0 or self.p_plus < 0 or abs(self.p_minus + self.p_plus - 1) > 1e-12:
            raise ValueError("two-point law needs non-negative masses summing to 1")


def boolean_law(coin: InitCoin) -> TwoPointLaw:
    """Limit of X_t/t for θ = 0: mass |α|² at -1 and |β|² at +1."""
    return TwoPointLaw(abs(coin.alpha) ** 2, abs(coin.beta) ** 2)
