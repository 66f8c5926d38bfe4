"""Theory oracles, Monte Carlo estimators and reports for the half-line and qTAZRP limits."""

from .estimators import *  # noqa: F401,F403
from .estimators import __all__ as _est
from .report import *  # noqa: F401,F403
from .report import __all__ as _rep
from .theory import *  # noqa: F401,F403
from .theory import __all__ as _th

__all__ = [*_th, *_est, *_rep]
