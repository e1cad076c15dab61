"""Python face of the tortoise-coordinate NLS laboratory."""

from ._tortoise_nls import *  # noqa: F401,F403
from ._tortoise_nls import __doc__  # noqa: F401
