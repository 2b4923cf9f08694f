"""Desk-scale laboratory for dissipative state preparation with Lindblad dynamics."""

__version__ = "0.1.0"
