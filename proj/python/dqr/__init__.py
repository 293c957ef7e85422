"""Deep quantile and deep composite regression.

Strictly consistent scoring functions for quantiles, expected shortfall and
the composite triplet (lower ES, quantile, upper ES), plus a small
feed-forward regression engine with monotone output heads.
"""

from ._dqr import *  # noqa: F401,F403
from ._dqr import __version__  # noqa: F401
