"""Grover search for maximal cliques: oracle circuit, simulation and counting."""

__version__ = "0.1.0"
