"""Semiclassical flux-qubit / nanomechanical-oscillator dynamics engine."""

__version__ = "0.1.0"
