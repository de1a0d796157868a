"""Grid symmetries, Schmidt ranks and the product-expansion witness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Optional

import numpy as np

from ..states import QubitGrid
from ..tree import DenseState

SCHMIDT_TOL = 1e-10
EIGEN_TOL = 1e-9


@dataclass(frozen=True)
class GridSymmetryOp:
    """Row swap, column swap (1-based indices) or transposition of the grid."""

    kind: str
    i: int = 0
    j: int = 0

    def __post_init__(self):
        if self.kind not in ("row_swap", "col_swap", "transpose"):
            raise ValueError(f"unknown symmetry {self.kind!r}")
        if self.kind != "transpose" and self.i == self.j:
            raise ValueError("a swap needs two distinct indices")

    def _map(self, r: int, c: int) -> tuple[int, int]:
        if self.kind == "transpose":
            return c, r
        swap = {self.i: self.j, self.j: self.i}
        if self.kind == "row_swap":
            return swap.get(r, r), c
        return r, swap.get(c, c)

    def qubit_map(self, m: int) -> list[int]:
        """``result[q - 1]`` is where the content of qubit ``q`` ends up."""
        if self.kind != "transpose" and not (1 <= self.i <= m and 1 <= self.j <= m):
            raise ValueError(f"indices ({self.i}, {self.j}) outside 1..{m}")
        grid = QubitGrid(m)
        return [grid.qubit(*self._map(*grid.position(q))) for q in range(1, m * m + 1)]

    def __str__(self):
        if self.kind == "transpose":
            return "T"
        return f"{'R' if self.kind == 'row_swap' else 'C'}{self.i}{self.j}"


def grid_side(n: int) -> int:
    m = math.isqrt(n)
    if m * m != n:
        raise ValueError(f"{n} qubits do not form a square grid")
    return m


def permute_qubits(state: DenseState, qubit_map: list[int]) -> DenseState:
    """Move the content of qubit ``q`` to qubit ``qubit_map[q - 1]``."""
    arr = state.as_tensor()
    # axis qubit_map[q-1]-1 of the result is axis q-1 of the input
    source = [0] * state.n
    for q, dest in enumerate(qubit_map):
        source[dest - 1] = q
    return DenseState(state.n, arr.transpose(source).reshape(-1))


def symmetry_eigencheck(state: DenseState, op: GridSymmetryOp,
                        tol: float = EIGEN_TOL) -> Optional[complex]:
    """Eigenvalue of ``op`` on ``state``, or None when it is not an eigenvector."""
    m = grid_side(state.n)
    moved = permute_qubits(state, op.qubit_map(m)).amplitudes
    v = state.amplitudes
    norm2 = np.vdot(v, v).real
    if norm2 == 0:
        raise ValueError("zero state")
    lam = np.vdot(v, moved) / norm2
    if np.linalg.norm(moved - lam * v) > tol * math.sqrt(norm2) or abs(abs(lam) - 1) > tol:
        return None
    return complex(lam)


def all_grid_ops(m: int) -> list[GridSymmetryOp]:
    ops = []
    for i, j in combinations(range(1, m + 1), 2):
        ops.append(GridSymmetryOp("row_swap", i, j))
        ops.append(GridSymmetryOp("col_swap", i, j))
    ops.append(GridSymmetryOp("transpose"))
    return ops


def _bipartite_matrix(state: DenseState, subset: Iterable[int]) -> np.ndarray:
    subset = sorted(set(subset))
    if not subset or len(subset) >= state.n or not all(1 <= q <= state.n for q in subset):
        raise ValueError(f"subset {subset} is not a nonempty proper subset of 1..{state.n}")
    rest = [q for q in range(1, state.n + 1) if q not in subset]
    arr = state.as_tensor().transpose([q - 1 for q in subset + rest])
    return arr.reshape(2 ** len(subset), -1)


def schmidt_coefficients(state: DenseState, subset: Iterable[int]) -> np.ndarray:
    return np.linalg.svd(_bipartite_matrix(state, subset), compute_uv=False)


def schmidt_rank(state: DenseState, subset: Iterable[int], tol: float = SCHMIDT_TOL) -> int:
    """Rank across ``subset | rest``.

    Singular values count when above ``tol`` times the largest one, so the
    result does not depend on the state's normalization.
    """
    sv = schmidt_coefficients(state, subset)
    if sv[0] == 0:
        raise ValueError("zero state")
    return int(np.count_nonzero(sv > tol * sv[0]))


@dataclass
class ProductExpansionReport:
    m: int
    terms: int
    pairs_checked: int
    pairs_witnessed: int
    witnesses: list
    pair_state_rank: int
    schmidt_measure: float

    @property
    def ok(self) -> bool:
        return self.pairs_witnessed == self.pairs_checked and self.pair_state_rank == 2


def _pair_witness(m, s, t):
    """Qubits (p, q) with |1>|+> in term ``s`` and |+>|1> in term ``t``."""
    grid = QubitGrid(m)
    ones_s = {grid.qubit(r + 1, s[r] + 1) for r in range(m)}
    ones_t = {grid.qubit(r + 1, t[r] + 1) for r in range(m)}
    for p in sorted(ones_s - ones_t):
        for q in sorted(ones_t - ones_s):
            return p, q
    return None


def product_expansion_check(m: int, max_m: int = 4) -> ProductExpansionReport:
    """Check that every two Leibnitz terms differ on a |1>|+> vs |+>|1> pair."""
    if m > max_m:
        raise ValueError(f"m = {m} exceeds the budget of {max_m}")
    perms = list(permutations(range(m)))
    witnesses = []
    checked = found = 0
    for s, t in combinations(perms, 2):
        checked += 1
        w = _pair_witness(m, s, t)
        if w is not None:
            found += 1
            witnesses.append((s, t, w))
    # a|1>|+> + b|+>|1> is entangled for a, b != 0; check the generic pair
    ket1, ketp = np.array([0, 1.0]), np.array([1.0, 1.0])
    pair = DenseState(2, np.kron(ket1, ketp) + 0.37 * np.kron(ketp, ket1))
    return ProductExpansionReport(
        m=m,
        terms=len(perms),
        pairs_checked=checked,
        pairs_witnessed=found,
        witnesses=witnesses,
        pair_state_rank=schmidt_rank(pair, [1]),
        schmidt_measure=math.log2(math.factorial(m)),
    )
