"""Normalized epipolar error and its geometric interpretations."""

from ._epigeom import *  # noqa: F401,F403
from ._epigeom import __version__  # noqa: F401
