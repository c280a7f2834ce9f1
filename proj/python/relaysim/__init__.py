"""Relay gain optimization for two- and three-hop amplify-and-forward
networks with correlated relay noise."""

from relaysim._core import *  # noqa: F401,F403
from relaysim._core import __version__  # noqa: F401
