"""Non-localized initial states synthesized from a 2π-periodic weight w(k).

The scalar profile is

    φ(x) = (1/√(2π W)) ∫_{-π}^{π} w(k) e^{ikx} dk,    W = ∫_{-π}^{π} w(k)² dk,

and the walk starts from ψ_0(x) = φ(x)·(α, β).  With this convention the
Fourier transform Σ_x e^{-ikx} ψ_0(x) equals √(2π/W)·w(k)·(α, β).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ._quadrature import QuadratureError, composite
from .walk import WalkState

__all__ = [
    "WEIGHT_KINDS",
    "InitCoin",
    "WeightSpec",
    "TruncationReport",
    "SynthesisError",
    "DegenerateWeightError",
    "erf",
    "weight_eval",
    "weight_norm",
    "closed_form_norm",
    "fourier_profile",
    "cusp_amplitude",
    "sqrt_sin_coefficients",
    "synthesize_initial",
    "load_tabulated",
]

WEIGHT_KINDS = ("unit", "semicircle", "arcsine", "gaussian", "uniform", "tabulated")

# seeds are smooth on each of these pieces; |sin k| kinks sit at 0 and ±π
KINKS = (-np.pi, -np.pi / 2, 0.0, np.pi / 2, np.pi)

DEFAULT_GRID_SIZE = 1 << 18
DEFAULT_TAIL_TOL = 1e-10


class SynthesisError(RuntimeError):
    def __init__(self, message: str, achievable_deficit: float | None = None):
        super().__init__(message)
        self.achievable_deficit = achievable_deficit


class DegenerateWeightError(ValueError):
    pass


def erf(x: float) -> float:
    return math.erf(x)


@dataclass(frozen=True)
class InitCoin:
    """Initial coin state α|0⟩ + β|1⟩."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|alpha|^2 + |beta|^2 must be 1, got {norm!r}")

    @classmethod
    def normalized(cls, alpha: complex, beta: complex) -> InitCoin:
        n = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        if n == 0:
            raise ValueError("coin vector is zero")
        return cls(complex(alpha) / n, complex(beta) / n)

    @classmethod
    def symmetric(cls) -> InitCoin:
        """α = 1/√2, β = i/√2: the coin that removes the tilt for every θ."""
        r = 1 / math.sqrt(2)
        return cls(r, 1j * r)

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array([self.alpha, self.beta], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """A periodic weight w(k); the built-in seeds depend on θ through c and s."""

    kind: str
    theta: float = 0.0
    sigma: float | None = None
    table_k: NDArray[np.float64] | None = field(default=None, repr=False)
    table_w: NDArray[np.float64] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "gaussian":
            if self.sigma is None or not self.sigma > 0:
                raise ValueError("gaussian weight needs sigma > 0")
        if self.kind in ("semicircle", "arcsine", "gaussian", "uniform"):
            if abs(math.sin(self.theta)) < 1e-6:
                raise ValueError("seed weights are unbounded when sin(theta) = 0")
        if self.kind == "tabulated":
            k = np.asarray(self.table_k, dtype=float)
            w = np.asarray(self.table_w, dtype=float)
            if k.ndim != 1 or k.shape != w.shape:
                raise ValueError("tabulated weight needs matching 1-d k and w arrays")
            if len(k) < 16:
                raise ValueError("tabulated weight needs at least 16 samples")
            expected = -np.pi + 2 * np.pi * np.arange(len(k)) / len(k)
            if np.max(np.abs(k - expected)) > 1e-9:
                raise ValueError("tabulated k must be a uniform grid over [-pi, pi)")
            if not np.all(np.isfinite(w)):
                raise ValueError("tabulated w must be finite")
            object.__setattr__(self, "table_k", expected)
            object.__setattr__(self, "table_w", w)

    @classmethod
    def unit(cls) -> WeightSpec:
        return cls("unit")

    @classmethod
    def semicircle(cls, theta: float) -> WeightSpec:
        return cls("semicircle", theta)

    @classmethod
    def arcsine(cls, theta: float) -> WeightSpec:
        return cls("arcsine", theta)

    @classmethod
    def gaussian(cls, theta: float, sigma: float) -> WeightSpec:
        return cls("gaussian", theta, sigma)

    @classmethod
    def uniform(cls, theta: float) -> WeightSpec:
        return cls("uniform", theta)

    @classmethod
    def tabulated(cls, k: ArrayLike, w: ArrayLike, theta: float = 0.0) -> WeightSpec:
        return cls("tabulated", theta, table_k=np.asarray(k, float), table_w=np.asarray(w, float))

    @property
    def c(self) -> float:
        return math.cos(self.theta)

    @property
    def s(self) -> float:
        return math.sin(self.theta)

    def describe(self) -> dict:
        out: dict = {"kind": self.kind, "theta": self.theta}
        if self.sigma is not None:
            out["sigma"] = self.sigma
        if self.kind == "tabulated":
            out["samples"] = len(self.table_k)
        return out


def load_tabulated(path: str | Path, theta: float = 0.0) -> WeightSpec:
    """Read a two-column CSV (k, w(k)); a non-numeric first row is taken as header."""
    ks, ws = [], []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                k, w = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise ValueError(f"{path}: bad row {i + 1}: {row!r}") from None
            ks.append(k)
            ws.append(w)
    return WeightSpec.tabulated(ks, ws, theta)


def _reduce(k: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.mod(k + np.pi, 2 * np.pi) - np.pi


def weight_eval(w: WeightSpec, k: ArrayLike) -> NDArray[np.float64]:
    """Evaluate w at k (any real k; reduced mod 2π)."""
    k = _reduce(np.asarray(k, dtype=float))
    if w.kind == "unit":
        return np.ones_like(k)
    if w.kind == "tabulated":
        return np.interp(k, w.table_k, w.table_w, period=2 * np.pi)
    c = w.c
    sin = np.sin(k)
    gap = 1.0 - c * c * sin * sin
    if w.kind == "semicircle":
        return sin / gap
    if w.kind == "arcsine":
        return 1.0 / np.sqrt(gap)
    base = np.sqrt(np.abs(sin) / gap**1.5)
    if w.kind == "uniform":
        return base
    cos = np.cos(k)
    return base * np.exp(-(c * c * cos * cos) / (4.0 * w.sigma**2 * gap))


def _check_grid(grid_size: int, minimum: int) -> None:
    if grid_size < minimum or grid_size & (grid_size - 1):
        raise ValueError(f"grid_size must be a power of two >= {minimum}, got {grid_size}")


def weight_norm(w: WeightSpec, grid_size: int = 1024) -> float:
    """W(w) = ∫ w(k)² dk over one period.

    Built-in seeds: composite Gauss-Legendre on uniform panels inside each
    piece between the kinks; the result is checked against the doubled grid.
    Tabulated weights: exact integral of the squared linear interpolant.
    """
    _check_grid(grid_size, 64)
    if w.kind == "unit":
        value = 2 * np.pi
    elif w.kind == "tabulated":
        a = w.table_w
        b = np.roll(a, -1)
        h = 2 * np.pi / len(a)
        value = float(np.sum(h / 3 * (a * a + a * b + b * b)))
    else:
        panels = max(grid_size // 32, 2)

        def sq(k):
            return weight_eval(w, k) ** 2

        coarse = float(composite(sq, KINKS, panels))
        value = float(composite(sq, KINKS, 2 * panels))
        if abs(value - coarse) > 1e-9 * abs(value):
            raise QuadratureError(
                f"W(w) not converged at grid_size={grid_size}", abs(value - coarse)
            )
    if not value > 1e-14:
        raise DegenerateWeightError(f"weight has W(w) = {value!r}")
    return value


def closed_form_norm(w: WeightSpec) -> float:
    """W(w) for the built-in seeds in closed form."""
    c, s = abs(w.c), abs(w.s)
    if w.kind == "unit":
        return 2 * math.pi
    if w.kind == "semicircle":
        return math.pi / s**3
    if w.kind == "arcsine":
        return 2 * math.pi / s
    if w.kind == "uniform":
        return 4 / s**2
    if w.kind == "gaussian":
        sig = w.sigma
        return 2 * math.sqrt(2 * math.pi) * sig / (c * s * s) * erf(c / (math.sqrt(2) * sig))
    raise ValueError(f"no closed form for {w.kind!r} weights")


def cusp_amplitude(w: WeightSpec) -> float:
    """A such that w(k) - A·√|sin k| is smooth to order |k|^{5/2} at k = 0 and k = ±π.

    Zero for weights without √|sin k| cusps.
    """
    if w.kind == "uniform":
        return 1.0
    if w.kind == "gaussian":
        return math.exp(-(w.c**2) / (4.0 * w.sigma**2))
    return 0.0


def sqrt_sin_coefficients(x: ArrayLike) -> NDArray[np.float64]:
    """Exact ∫_{-π}^{π} √|sin k| e^{ikx} dk for integer x.

    Zero for odd x; for x = 2m it is 2·a_|m| with a_0 = √π Γ(3/4)/Γ(5/4)
    and a_{m+1} / a_m = (m - 1/4) / (m + 5/4).
    """
    x = np.asarray(x, dtype=np.int64)
    m = np.abs(x) // 2
    top = int(m.max()) if m.size else 0
    j = np.arange(top, dtype=float)
    a0 = math.sqrt(math.pi) * math.gamma(0.75) / math.gamma(1.25)
    a = a0 * np.concatenate([[1.0], np.cumprod((j - 0.25) / (j + 1.25))])
    return np.where(x % 2 == 0, 2 * a[m], 0.0)


def fourier_profile(
    w: WeightSpec,
    grid_size: int = DEFAULT_GRID_SIZE,
    norm: float | None = None,
    cusp_correction: bool = True,
) -> tuple[NDArray[np.int64], NDArray[np.complex128]]:
    """Scalar profile φ(x) on x = -N/2, ..., N/2 - 1 before truncation.

    The integral over k is the periodic trapezoid rule on k_j = -π + 2πj/N,
    evaluated with one FFT.  N is a multiple of 4, so the kink points 0, ±π/2
    and -π are grid nodes.  The trapezoid rule aliases the slowly decaying
    coefficients of a √|sin k| cusp, leaving an O(N^{-3/2}) error on every
    site; with ``cusp_correction`` the cusp A·√|sin k| is removed before the
    FFT and its exact coefficients are added back.
    """
    _check_grid(grid_size, 256)
    if norm is None:
        norm = weight_norm(w)
    n = grid_size
    x = np.arange(-n // 2, n // 2, dtype=np.int64)
    if w.kind == "unit":
        phi = np.zeros(n, dtype=np.complex128)
        phi[n // 2] = 2 * np.pi / math.sqrt(2 * np.pi * norm)
        return x, phi
    k = -np.pi + 2 * np.pi * np.arange(n) / n
    samples = weight_eval(w, k)
    amp = cusp_amplitude(w) if cusp_correction else 0.0
    if amp:
        samples = samples - amp * np.sqrt(np.abs(np.sin(k)))
    # (2π/N) Σ_j w_j e^{i k_j x} = 2π (-1)^x ifft(w)[x mod N]
    g = 2 * np.pi * np.fft.ifft(samples)
    g = np.fft.fftshift(g)
    g[(x % 2) == 1] *= -1
    if amp:
        g += amp * sqrt_sin_coefficients(x)
    return x, g / math.sqrt(2 * np.pi * norm)


@dataclass(frozen=True)
class TruncationReport:
    cutoff: int
    deficit: float
    grid_size: int
    renormalized: bool
    weight_norm: float


def synthesize_initial(
    w: WeightSpec,
    coin: InitCoin,
    grid_size: int = DEFAULT_GRID_SIZE,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> tuple[WalkState, TruncationReport]:
    """Build ψ_0 on the smallest window [-X0, X0] holding all but ``tail_tol`` of the mass.

    The retained amplitudes are renormalized to unit mass; the discarded mass
    is reported as ``deficit``.
    """
    _check_grid(grid_size, 256)
    if not 0 < tail_tol <= 1e-4:
        raise ValueError(f"tail_tol must lie in (0, 1e-4], got {tail_tol}")
    norm = weight_norm(w)
    if w.kind == "unit":
        amps = np.array([[coin.alpha, coin.beta]], dtype=np.complex128)
        return WalkState(0, 0, amps, 0.0), TruncationReport(0, 0.0, grid_size, False, norm)

    x, phi = fourier_profile(w, grid_size, norm)
    mass = phi.real**2 + phi.imag**2
    # Built-in seeds: the profile carries true coefficients normalized by the
    # exact W, so the full mass is 1 and whatever lies beyond the grid counts
    # as deficit.  Tabulated weights: the FFT profile is the reference.
    total = float(np.sum(mass)) if w.kind == "tabulated" else 1.0
    # mass on |x| <= X for X = 0 .. N/2; x = -N/2 has no partner and is dropped last
    by_radius = np.bincount(np.abs(x), weights=mass)
    outside = np.maximum(total - np.cumsum(by_radius), 0.0) / total
    ok = np.flatnonzero(outside[: grid_size // 2] < tail_tol)
    if ok.size == 0:
        best = float(outside[grid_size // 2 - 1])
        raise SynthesisError(
            f"no window within grid_size/2 reaches tail_tol={tail_tol:g}; "
            f"best deficit {best:.3g}",
            best,
        )
    cutoff = int(ok[0])
    deficit = float(outside[cutoff])
    keep = np.abs(x) <= cutoff
    profile = phi[keep]
    profile = profile / math.sqrt(float(np.sum(profile.real**2 + profile.imag**2)))
    amps = np.outer(profile, coin.vector)
    state = WalkState(0, -cutoff, amps, deficit)
    return state, TruncationReport(cutoff, deficit, grid_size, True, norm)
