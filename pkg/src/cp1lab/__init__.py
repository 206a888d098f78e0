"""cp1lab: numerics for complex projective structures on a genus-2 surface.

Modules
-------
moebius    Moebius maps, classification, axes, sphere/half-space actions.
fuchsian   The Bolza surface group: words, lengths, enumeration, lifts.
quaddiff   Holomorphic quadratic differentials via truncated Poincare series.
schwarzian Schwarzian derivative and transport of the associated linear ODE.
holonomy   Holonomy representations of projective structures and characters.
bending    Bending deformations, bending cocycles, pleated planes, areas.
scan       Discreteness raster scans, limit sets, image output.
"""

from cp1lab.moebius import (
    ComplexPoint,
    MobiusMap,
    MobiusClass,
    classify,
    fixed_points,
    elliptic_about_axis,
    loxodromic_along_axis,
)
from cp1lab.fuchsian import MarkedGroup, bolza_group

__all__ = [
    "ComplexPoint",
    "MobiusMap",
    "MobiusClass",
    "classify",
    "fixed_points",
    "elliptic_about_axis",
    "loxodromic_along_axis",
    "MarkedGroup",
    "bolza_group",
]

__version__ = "0.1.0"
