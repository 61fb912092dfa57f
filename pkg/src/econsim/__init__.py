"""Deterministic closed-loop economy simulator and analytics harness."""

__version__ = "0.1.0"
