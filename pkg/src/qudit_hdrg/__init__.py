"""HDRG fault-tolerant decoding for qubit and qudit surface codes."""

__version__ = "0.1.0"
