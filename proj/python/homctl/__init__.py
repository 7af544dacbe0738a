"""Homogeneous controller synthesis and simulation for switched linear systems."""

from ._core import *  # noqa: F401,F403
from ._core import scenarios  # noqa: F401

__version__ = "0.1.0"
