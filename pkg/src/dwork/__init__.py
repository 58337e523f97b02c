"""Twisted sectors of the Dwork family: operators, periods, monodromy and mirror checks."""

__version__ = "0.1.0"
