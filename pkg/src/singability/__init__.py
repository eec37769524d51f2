"""Melody-to-lyric singability toolkit."""

__version__ = "0.1.0"
