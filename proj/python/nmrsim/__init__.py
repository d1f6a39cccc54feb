"""Deterministic simulator and trace checkers for neighborhood mutual
remainder protocols and their LCM-robot applications."""

from _nmrsim import *  # noqa: F401,F403

__version__ = "0.1.0"
