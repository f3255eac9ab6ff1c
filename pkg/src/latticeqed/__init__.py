"""Cavity light scattering, continuous measurement, feedback control and
mean-field phases for ultracold lattice gases."""

__version__ = "0.1.0"
