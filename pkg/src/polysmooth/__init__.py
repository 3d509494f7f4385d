"""Smoothness certification for polyhedral surfaces."""

from .fixtures import FIXTURES, FixtureSpec, generate
from .mesh import Mesh, load_mesh, read_mesh, vertex_star
from .report import SmoothnessReport, analyze, export_report

__version__ = "0.1.0"

__all__ = [
    "FIXTURES",
    "FixtureSpec",
    "Mesh",
    "SmoothnessReport",
    "analyze",
    "export_report",
    "generate",
    "load_mesh",
    "read_mesh",
    "vertex_star",
]
