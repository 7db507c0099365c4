"""Robust Bayesian optimization on finite grids (Python bindings)."""

from ._core import *  # noqa: F401,F403
from ._core import RobustboError, __version__  # noqa: F401
