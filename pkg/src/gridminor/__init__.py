"""Certificates for the crossbar versus path-of-sets dichotomy on graphs
with terminal sets, and the expander embedding that follows it."""

__version__ = "0.1.0"
