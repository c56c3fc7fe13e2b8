"""Relativistic EPR correlation functions, Bell inequalities and sampling."""

from ._core import *  # noqa: F401,F403
from ._core import DomainError, UsageError, __doc__  # noqa: F401

__version__ = "0.1.0"
