"""Fundamental cubic form of a smooth surface: characteristic points
(ellipnodes, hyperbonodes, godrons), their local indices by closed formula
and by winding number, and the global Euler-characteristic identities."""

from .jets import Jet2, MapJet2, jet_compose, jet_invert, jet_mul
from .kernel import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "Jet2",
    "MapJet2",
    "jet_mul",
    "jet_compose",
    "jet_invert",
    "KERNEL_BACKEND",
    "__version__",
]
