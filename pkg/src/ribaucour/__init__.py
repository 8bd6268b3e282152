"""Ribaucour transforms of curves and circular nets in the light-cone model.

Modules:

- :mod:`ribaucour.lorentz`: Minkowski linear algebra and point lifts.
- :mod:`ribaucour.incidence`: spheres, circles, intersections, cross ratios.
- :mod:`ribaucour.discrete`: discrete curves and nets and their transforms.
- :mod:`ribaucour.smooth`: sampled curves with normal fields, reductions.
- :mod:`ribaucour.channel`: channel-surface strips between curve pairs.
- :mod:`ribaucour.cli`: the ``ribaucour`` command.
"""

from .errors import GeometryError
from .lorentz import DEFAULT_TOL, inner, lift, unlift

__all__ = ["DEFAULT_TOL", "GeometryError", "inner", "lift", "unlift"]
__version__ = "0.1.0"
