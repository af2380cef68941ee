"""Bend-restricted right-angle-crossing (RAC) drawings: geometry, a validator,
feedback-edge and vertex-cover kernels with drawing lifts, and a search-based
solver."""

from .drawing import BendBudget, Drawing, ValidationReport, Violation, validate
from .graph import Graph, feedback_edge_set, nd_partition, vertex_cover
from .io import Instance, parse_drawing, parse_instance, serialize_drawing, serialize_instance
from .kernel_fen import extract_kernel, lift_drawing
from .kernel_vc import nd_to_vertex_cover, vc_kernelize, vc_lift_drawing
from .solver import SolveOptions, solve

__version__ = "0.1.0"

__all__ = [
    "BendBudget",
    "Drawing",
    "Graph",
    "Instance",
    "SolveOptions",
    "ValidationReport",
    "Violation",
    "extract_kernel",
    "feedback_edge_set",
    "lift_drawing",
    "nd_partition",
    "nd_to_vertex_cover",
    "parse_drawing",
    "parse_instance",
    "serialize_drawing",
    "serialize_instance",
    "solve",
    "validate",
    "vc_kernelize",
    "vc_lift_drawing",
    "vertex_cover",
]
