"""Deterministic haptic virtual laboratories: friction, rotating-frame
deflection, and gyroscopic precession, with bit-exact session replay."""

__version__ = "0.1.0"
