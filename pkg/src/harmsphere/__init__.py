"""Radial expansions, model spaces and heat invariants of harmonic spaces."""

from . import curvio, jets, models, spectra
from .curvio import CurvaturePoint, InvariantReport, invariants, validate
from .models import parse_space, space_form
from .spectra import Bindings, compare, heat_report

__version__ = "0.1.0"

__all__ = [
    "Bindings",
    "CurvaturePoint",
    "InvariantReport",
    "compare",
    "curvio",
    "heat_report",
    "invariants",
    "jets",
    "models",
    "parse_space",
    "space_form",
    "spectra",
    "validate",
]
