"""Concentration of the multinomial KL-divergence statistic Z = 2n·D(p̂‖p)."""

from importlib import metadata

__version__ = metadata.version(__name__)
