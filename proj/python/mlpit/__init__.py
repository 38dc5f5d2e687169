"""Multilevel Monte Carlo ensemble forecasts and PIT calibration diagnostics."""

from ._core import *  # noqa: F401,F403
from ._core import MlpitError, __version__  # noqa: F401
