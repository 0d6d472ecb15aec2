"""
Synthetic planted-community cities with known income structure, written in
the same formats the ingest package reads.
"""

from .files import ACS_PREFIX, BLOCKS_PER_TRACT, od_frame, write_city
from .planted import PlantedCity, PlantedCityConfig, generate, tract_geoids

__all__ = [
    'ACS_PREFIX',
    'BLOCKS_PER_TRACT',
    'PlantedCity',
    'PlantedCityConfig',
    'generate',
    'od_frame',
    'tract_geoids',
    'write_city',
]
