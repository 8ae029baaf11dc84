"""Two-state quantum walk on the line started from Fourier-synthesized states,
and the limit laws of X_t / t it produces."""

from .initial_state import InitCoin, WeightSpec, synthesize_initial, weight_eval, weight_norm
from .limit_laws import (
    SpectralContext,
    TiltedDensity,
    boolean_law,
    closed_form_density,
    density_for_weight,
    theorem1_density,
)
from .moments import empirical_moment, kspace_moment, xspace_moment
from .walk import WalkState, coin_matrix, distribution, evolve, localized_state, step

__version__ = "0.1.0"
