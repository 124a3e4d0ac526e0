"""
    modgrav
"""

from .version import __version__  # noqa
from .modgrav import ModGrav  # noqa
