"""Quantum graphs L(theta): exact and float linear algebra, the algebras they
generate, the finitely presented algebra A_theta, its representations, and
noncommutative confusability graphs of quantum channels."""

from .algebra import MatrixAlgebra, block_decompose, generate_algebra
from .channels import KrausChannel, graph_via_dual, nc_graph
from .fpalgebra import FPPresentation, kernel_of_psi, psi, verify_theorem2
from .graph import build_generators, check_relations, graph_span, is_operator_system
from .linalg import CMatrix, Subspace
from .reptheory import Character, decompose_phi, induce
from .scalars import EXACT, FLOAT, QQi, Theta, parse_theta

__version__ = "0.1.0"

__all__ = [
    "EXACT", "FLOAT", "QQi", "Theta", "parse_theta",
    "CMatrix", "Subspace",
    "build_generators", "check_relations", "graph_span", "is_operator_system",
    "MatrixAlgebra", "generate_algebra", "block_decompose",
    "FPPresentation", "psi", "kernel_of_psi", "verify_theorem2",
    "Character", "induce", "decompose_phi",
    "KrausChannel", "nc_graph", "graph_via_dual",
]
