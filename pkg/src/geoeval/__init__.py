"""Geoparsing evaluation framework.

Gazetteer-backed toponym resolution baselines, the literal/associative
toponym taxonomy, geotagging and geocoding metric suites, and the
significance tests needed to compare systems.
"""

__version__ = "0.1.0"

from .geodesy import Coordinate, great_circle_distance  # noqa: F401
