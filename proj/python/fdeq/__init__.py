"""Spectral densities of self-adjoint polynomial matrix models."""

from ._fdeq import (
    FdeqError,
    Model,
    catalan,
    circular_word_moment,
    ks_distance,
    load_config,
    load_config_text,
    mc_spectrum,
    ncp2_count,
    pairings_count,
    scalar_cauchy,
    solve_density,
    __version__,
)

__all__ = [
    "FdeqError",
    "Model",
    "catalan",
    "circular_word_moment",
    "ks_distance",
    "load_config",
    "load_config_text",
    "mc_spectrum",
    "ncp2_count",
    "pairings_count",
    "scalar_cauchy",
    "solve_density",
    "__version__",
]
