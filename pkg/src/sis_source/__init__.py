"""Infection source estimation under the discrete-time SIS model."""

from ._backend import BACKEND
from .graph import Graph, regular_tree

__all__ = ["BACKEND", "Graph", "regular_tree"]
__version__ = "0.1.0"
