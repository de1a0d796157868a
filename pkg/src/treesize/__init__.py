"""Tree-size workbench for multiqubit states."""

from .tree import (
    DenseState,
    InvalidTreeError,
    Leaf,
    Plus,
    StateTree,
    Tensor,
    apply_ilo,
    evaluate,
    leaf_count,
    proportional_distance,
    validate,
)

__version__ = "0.1.0"
