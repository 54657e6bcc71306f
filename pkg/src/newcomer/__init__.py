"""Simulating a newcomer that builds ties to reach the center of a growing network."""

__version__ = "0.1.0"
