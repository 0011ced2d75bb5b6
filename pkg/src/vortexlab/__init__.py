"""Exact generation and verification of stationary point-vortex configurations."""

__version__ = "0.1.0"
