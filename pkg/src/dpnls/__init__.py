"""Numerical laboratory for double-power NLS standing waves and blowup."""

from .params import Params, RadialGrid, PeriodicGrid, RadialProfile, ComplexField

__all__ = ["Params", "RadialGrid", "PeriodicGrid", "RadialProfile", "ComplexField"]
