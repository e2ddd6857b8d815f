"""Softmax temperature, rank collapse and spectral diagnostics for small dense networks."""
__version__ = "0.1.0"
