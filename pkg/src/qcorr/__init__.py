"""Moment-matrix relaxations for bipartite quantum correlations and Bell inequalities."""

__version__ = "0.1.0"
