"""Exact equiprobability and uniform-inequality analysis for MaxEnt and
stochastic Harmonic Grammar tableaux."""

__version__ = "0.1.0"
