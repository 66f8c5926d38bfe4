"""Random walks on Coxeter groups driven by stochastic Hecke algebra elements."""

from .coxeter import *  # noqa: F401,F403
from .hecke import *  # noqa: F401,F403
from .mallows import *  # noqa: F401,F403
from .walks import *  # noqa: F401,F403
from .systems import *  # noqa: F401,F403

__version__ = "0.1.0"
