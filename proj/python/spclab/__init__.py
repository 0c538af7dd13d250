"""Near-critical Dirac bound states, resonances and decay (C++ core)."""

from ._spclab import *  # noqa: F401,F403
from ._spclab import Error, __doc__  # noqa: F401
