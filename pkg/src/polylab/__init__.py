"""polylab: random polytopes from i.i.d. samples in convex bodies, and Monte
Carlo checks of their identities, inequalities and growth rates."""

from . import analysis, geometry, sampling
from .errors import PolylabError
from .rng import RngStream

__version__ = "0.1.0"

__all__ = ["PolylabError", "RngStream", "analysis", "geometry", "sampling", "__version__"]
