"""Localization of a point in R^n from one-bit paired comparisons.

Thin wrapper over the compiled extension; see the package README for the
underlying model and the CLI counterpart.
"""

from ._pairloc import *  # noqa: F401,F403
from ._pairloc import __version__, cell_count_str


def cell_count(m: int, n: int) -> int:
    """Exact number of cells m hyperplanes in general position cut R^n into."""
    return int(cell_count_str(m, n))
