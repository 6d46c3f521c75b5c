"""Advection-diffusion-reaction wildfire model: lumped kinetics, WENO finite-volume solver, diagnostics."""

__version__ = "0.1.0"

from .params import ConfigError, Parameters, RunConfig, SchemeConfig, default_parameters  # noqa: E402

__all__ = ["ConfigError", "Parameters", "RunConfig", "SchemeConfig", "default_parameters", "__version__"]
