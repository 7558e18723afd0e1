"""
flagcoords
Flag invariants, decorated triangulations and PU(2,1) representations of
punctured-surface groups.
"""

from .errors import FlagCoordsError

__version__ = "1.0.0"

__all__ = ["FlagCoordsError", "__version__"]
