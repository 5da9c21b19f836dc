"""Packings, volumes and bounds on unitary, Stiefel and Grassmann manifolds
under the chordal distance."""

from .manifolds import Kind, ManifoldDescriptor, ManifoldPoint
from .packing import Code, DensityReport, analyze
from .volumes import VolumeModel

__all__ = ["Kind", "ManifoldDescriptor", "ManifoldPoint", "Code", "DensityReport", "analyze", "VolumeModel"]
__version__ = "0.1.0"
