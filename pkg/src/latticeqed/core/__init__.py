from .fock import BosonFockBasis, CapacityError, FermionFockBasis, build_basis
from .hamiltonian import (ConvergenceError, HamiltonianSpec, build_hamiltonian,
                          ground_state)
from .lattice import (LatticeSpec, LightMode, MeasurementGeometry,
                      WannierParams, classify_values, geometry_coefficients,
                      mode_coupling_pattern, traveling_pair)
from .operators import (SparseComplexOperator, diagonal_op, hop_op,
                        identity_op, number_op, total_number_op,
                        weighted_bond_sum, weighted_number_sum, zero_op)
from .expr import ExpressionError, parse_operator

__all__ = [
    "BosonFockBasis", "FermionFockBasis", "CapacityError", "build_basis",
    "HamiltonianSpec", "build_hamiltonian", "ground_state", "ConvergenceError",
    "LatticeSpec", "LightMode", "WannierParams", "MeasurementGeometry",
    "geometry_coefficients", "traveling_pair", "classify_values",
    "mode_coupling_pattern",
    "SparseComplexOperator", "number_op", "hop_op", "identity_op", "zero_op",
    "diagonal_op", "weighted_number_sum", "weighted_bond_sum",
    "total_number_op", "parse_operator", "ExpressionError",
]
