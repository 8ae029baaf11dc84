"""Composite Gauss-Legendre rules on uniform panels between breakpoints."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray


class QuadratureError(RuntimeError):
    """A quadrature failed to reach its tolerance."""

    def __init__(self, message: str, error_estimate: float | None = None):
        super().__init__(message)
        self.error_estimate = error_estimate


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.polynomial.legendre.leggauss(order)


def panel_nodes(
    breakpoints: Sequence[float], panels: int, order: int = 8
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights: each breakpoint interval cut into ``panels`` equal panels."""
    bp = np.asarray(breakpoints, dtype=float)
    xg, wg = _legendre(order)
    edges = np.concatenate(
        [np.linspace(a, b, panels + 1)[:-1] for a, b in zip(bp[:-1], bp[1:])] + [bp[-1:]]
    )
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    return nodes, weights


def composite(
    f: Callable[[NDArray[np.float64]], NDArray],
    breakpoints: Sequence[float],
    panels: int,
    order: int = 8,
):
    nodes, weights = panel_nodes(breakpoints, panels, order)
    return np.tensordot(weights, f(nodes), axes=(0, 0))


def composite_converged(
    f: Callable[[NDArray[np.float64]], NDArray],
    breakpoints: Sequence[float],
    panels: int = 16,
    order: int = 10,
    rtol: float = 1e-13,
    atol: float = 1e-15,
    max_panels: int = 1 << 14,
):
    """Double the panel count until two successive results agree."""
    prev = composite(f, breakpoints, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = composite(f, breakpoints, panels, order)
        diff = np.max(np.abs(cur - prev))
        if diff <= atol + rtol * np.max(np.abs(cur)):
            return cur
        prev = cur
    raise QuadratureError(
        f"composite Gauss-Legendre did not converge with {panels} panels", float(diff)
    )
