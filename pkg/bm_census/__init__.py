"""Finite groupoid census for Bol-Moufang type identities."""

__version__ = "0.1.0"
