"""Floquet engineering of driven coupled-qubit circuits."""

__version__ = "0.1.0"
