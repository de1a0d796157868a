"""Symmetry, entanglement and tree-size minimization checks."""

from .minimize import (
    MinimizeResult,
    SloccReport,
    minimize_tree_size,
    skeletons,
    slocc_tree_size_consistency,
)
from .persistency import PersistencyResult, persistency_upper
from .symmetry import (
    GridSymmetryOp,
    ProductExpansionReport,
    all_grid_ops,
    permute_qubits,
    product_expansion_check,
    schmidt_rank,
    symmetry_eigencheck,
)
