"""Exact quantum scattering diagrams, broken lines and theta functions in rank 2."""

from .brokenlines import NonGenericPointError, enumerate_broken_lines, structure_constants, theta, transport
from .cluster import Seed, build_cluster_diagram, find_lambda, principal
from .dtwall import extract_dt, kronecker_diagram, kronecker_setup
from .lattice import PlaneChart, QLattice
from .laurent import LaurentPoly, T, quantum_int, quantum_number
from .qtorus import GroupElem, QSeries, ee, psi
from .scattering import ScatDiagram, check_consistent, complete, mutate_diagram, to_ee_form

__all__ = [
    "GroupElem",
    "LaurentPoly",
    "NonGenericPointError",
    "PlaneChart",
    "QLattice",
    "QSeries",
    "ScatDiagram",
    "Seed",
    "T",
    "build_cluster_diagram",
    "check_consistent",
    "complete",
    "ee",
    "enumerate_broken_lines",
    "extract_dt",
    "find_lambda",
    "kronecker_diagram",
    "kronecker_setup",
    "mutate_diagram",
    "principal",
    "psi",
    "quantum_int",
    "quantum_number",
    "structure_constants",
    "theta",
    "to_ee_form",
    "transport",
]
