"""Gridflow - graph-structured distributed fast decoupled power flow."""

__version__ = "0.1.0"
