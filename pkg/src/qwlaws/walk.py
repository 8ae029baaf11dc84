"""Exact amplitude evolution of the two-state walk on a window of the integer line.

Coin component 0 moves one site to the left per step and component 1 one site
to the right, after the coin

    U = [[cos θ,  sin θ],
         [sin θ, -cos θ]]

has been applied on every site.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "WalkState",
    "ProbabilityDistribution",
    "coin_matrix",
    "localized_state",
    "step",
    "evolve",
    "distribution",
    "trim",
]


def coin_matrix(theta: float) -> NDArray[np.complex128]:
    """Return the 2×2 coin [[c, s], [s, -c]] with c = cos θ, s = sin θ."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [s, -c]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class WalkState:
    """Amplitudes on the consecutive sites ``origin_offset, origin_offset + 1, ...``.

    ``amplitudes`` has shape (n, 2); column j holds the coin-|j⟩ component.
    ``deficit`` is the probability mass discarded when the state was built
    (truncation of a non-localized profile); it is 0 for localized starts.
    """

    time: int
    origin_offset: int
    amplitudes: NDArray[np.complex128]
    deficit: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise ValueError(f"amplitudes must have shape (n, 2), got {amps.shape}")
        if self.time < 0:
            raise ValueError("time must be non-negative")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def width(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.origin_offset, self.origin_offset + self.width, dtype=np.int64)

    def total_mass(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    time: int
    origin_offset: int
    probs: NDArray[np.float64]
    deficit: float = 0.0

    @property
    def positions(self) -> NDArray[np.int64]:
        return np.arange(self.origin_offset, self.origin_offset + len(self.probs), dtype=np.int64)

    def total(self) -> float:
        return float(np.sum(self.probs))


def localized_state(alpha: complex, beta: complex, position: int = 0) -> WalkState:
    return WalkState(0, position, np.array([[alpha, beta]], dtype=np.complex128))


def step(state: WalkState, theta: float) -> WalkState:
    """Advance one step: ψ'(x) = P·U·ψ(x+1) + Q·U·ψ(x-1).

    The window grows by one site on each side.
    """
    c, s = np.cos(theta), np.sin(theta)
    up, down = state.amplitudes[:, 0], state.amplitudes[:, 1]
    n = state.width
    out = np.zeros((n + 2, 2), dtype=np.complex128)
    # site x of the old window sits at index x+1 of the new one
    out[0:n, 0] = c * up + s * down
    out[2 : n + 2, 1] = s * up - c * down
    return WalkState(state.time + 1, state.origin_offset - 1, out, state.deficit)


def evolve(state: WalkState, theta: float, steps: int) -> WalkState:
    """Apply ``step`` ``steps`` times.

    Same arithmetic as ``step``, but on two preallocated buffers so long runs do
    not reallocate the window every step.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if steps == 0:
        return state
    c, s = np.cos(theta), np.sin(theta)
    n = state.width
    total = n + 2 * steps
    up = np.zeros(total, dtype=np.complex128)
    down = np.zeros(total, dtype=np.complex128)
    up[steps : steps + n] = state.amplitudes[:, 0]
    down[steps : steps + n] = state.amplitudes[:, 1]
    a = np.empty(total, dtype=np.complex128)
    b = np.empty(total, dtype=np.complex128)
    lo, hi = steps, steps + n
    for _ in range(steps):
        m = hi - lo
        u, d = up[lo:hi], down[lo:hi]
        ta, tb = a[:m], b[:m]
        np.multiply(u, c, out=ta)
        ta += s * d
        np.multiply(u, s, out=tb)
        tb -= c * d
        up[lo - 1 : hi - 1] = ta
        up[hi - 1] = 0.0
        down[lo + 1 : hi + 1] = tb
        down[lo] = 0.0
        lo -= 1
        hi += 1
    amps = np.stack([up, down], axis=1)
    return WalkState(state.time + steps, state.origin_offset - steps, amps, state.deficit)


def distribution(state: WalkState) -> ProbabilityDistribution:
    """Site probabilities |a0|² + |a1|²."""
    amps = state.amplitudes
    probs = amps.real**2 + amps.imag**2
    return ProbabilityDistribution(
        state.time, state.origin_offset, probs.sum(axis=1), state.deficit
    )


def trim(state: WalkState) -> WalkState:
    """Drop margin cells whose amplitudes are exactly zero (no thresholding)."""
    nonzero = np.flatnonzero(np.any(state.amplitudes != 0, axis=1))
    if nonzero.size == 0:
        return WalkState(state.time, state.origin_offset, state.amplitudes[:1] * 0, state.deficit)
    lo, hi = nonzero[0], nonzero[-1] + 1
    return WalkState(
        state.time, state.origin_offset + int(lo), state.amplitudes[lo:hi], state.deficit
    )
