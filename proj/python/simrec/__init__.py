"""Structured-recovery toolkit: norms, measurement ensembles, solvers and bounds."""

from _simrec import *  # noqa: F401,F403
from _simrec import __version__  # noqa: F401
