"""Simulation, statistics and planning for Bell tests with human-driven setting switches."""

__version__ = "0.1.0"
