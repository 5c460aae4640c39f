"""Complex-valued fractional-order Hopfield networks: stability analysis and simulation."""

__version__ = "0.1.0"
