"""Simulation of linear fractional stable motion and estimation of its
parameters (sigma, alpha, H) from high- or low-frequency observations."""

from . import errors
from .errors import *  # noqa: F401,F403
from .estimators import *  # noqa: F401,F403
from .kernel import *  # noqa: F401,F403
from .montecarlo import *  # noqa: F401,F403
from .simulate import *  # noqa: F401,F403
from .stable import *  # noqa: F401,F403
from .statistics import *  # noqa: F401,F403
from . import estimators, kernel, montecarlo, simulate, stable, statistics

__version__ = "0.1.0"

__all__ = (
    errors.__all__
    + estimators.__all__
    + kernel.__all__
    + montecarlo.__all__
    + simulate.__all__
    + stable.__all__
    + statistics.__all__
    + ["__version__"]
)
