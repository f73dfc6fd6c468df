"""Orthogonal-polynomial and continuum-limit tools for Penner matrix models."""

__version__ = "0.1.0"

from .errors import PennerError  # noqa: E402
from .model import Potential, preset  # noqa: E402

__all__ = ["PennerError", "Potential", "preset", "__version__"]
