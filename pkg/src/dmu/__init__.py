"""
Kernels, capacities and test functions for harmonically weighted
Dirichlet spaces D(mu) on the unit disc.
"""

__version__ = "0.1.0"

from .boundary_set import AdmissibleWeight, ClosedSet
from .errors import DmuError, Inconclusive
from .measure import Density, Measure

__all__ = [
    "AdmissibleWeight",
    "ClosedSet",
    "Density",
    "DmuError",
    "Inconclusive",
    "Measure",
    "__version__",
]
