"""Agency primitives runtime and productivity benchmark for desk-scale
geospatial human-in-the-loop work."""

__version__ = "0.1.0"
