"""Simulation, autonomy and survey planning for a twin-pod survey catamaran."""

__version__ = "0.1.0"
