"""Heavy-tail index estimation and diagnostics."""

__version__ = "0.1.0"
