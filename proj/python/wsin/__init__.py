"""Gradient-descent sinusoid estimation with a complex-exponential surrogate."""

from ._wsin import *  # noqa: F401,F403
from ._wsin import __version__  # noqa: F401
