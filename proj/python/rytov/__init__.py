"""Inverse Rytov series reconstruction for a radially symmetric 2D disk."""

from ._rytov import (
    ConfigError,
    Config,
    DomainError,
    Experiment,
    NumericalError,
    __version__,
    add_noise,
    bessel_i,
    bessel_k,
    compositions,
    exact_boundary_data,
    fd_oracle,
    g_mode,
    grid_points,
    log_bessel_i,
    log_bessel_k,
    synthesize_data,
    true_profile,
    u0_boundary,
)

__all__ = [
    "Config",
    "ConfigError",
    "DomainError",
    "Experiment",
    "NumericalError",
    "add_noise",
    "bessel_i",
    "bessel_k",
    "compositions",
    "exact_boundary_data",
    "fd_oracle",
    "g_mode",
    "grid_points",
    "log_bessel_i",
    "log_bessel_k",
    "synthesize_data",
    "true_profile",
    "u0_boundary",
]
