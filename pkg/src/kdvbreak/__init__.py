"""Numerical toolkit for the break-up of small-dispersion KdV solutions.

Near the point of gradient catastrophe of the dispersionless (Hopf) flow the
KdV solution is described by a special solution of the second member of the
Painleve I hierarchy.  The modules here locate that point, evaluate the
semiclassical phase functions and scattering data, solve for the Painleve
profile, integrate KdV directly and compare the two in double scaling.
"""

from .errors import KdvBreakError
from .profile import (CatastrophePoint, InitialProfile, get_profile,
                      locate_catastrophe)

__version__ = "0.1.0"

__all__ = ["CatastrophePoint", "InitialProfile", "KdvBreakError",
           "get_profile", "locate_catastrophe", "__version__"]
