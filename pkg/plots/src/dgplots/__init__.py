"""Read-only plotting companion for helmdg run outputs."""

from .figures import plot_convergence, plot_mesh, plot_size_history
from .io import (Estimate, History, MeshData, ParseError, SchemaMismatch,
                 read_estimate, read_history, read_mesh)

__all__ = [
    "Estimate",
    "History",
    "MeshData",
    "ParseError",
    "SchemaMismatch",
    "plot_convergence",
    "plot_mesh",
    "plot_size_history",
    "read_estimate",
    "read_history",
    "read_mesh",
]
