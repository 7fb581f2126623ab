"""Joint transmit-covariance and movable-antenna position optimization.

Thin package wrapper around the compiled extension; everything public lives
in ``fasisac._core`` and is re-exported here.
"""

from fasisac._core import *  # noqa: F401,F403
from fasisac._core import __version__  # noqa: F401
