"""Mortal preconditions of linear integer loops via best linear abstractions."""

__version__ = "0.1.0"
