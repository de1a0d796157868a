"""Benchmark states and explicit tree decompositions.

Immanant states live on ``m*m`` qubits arranged row-major on an ``m x m``
grid: entry ``(i, j)`` (1-based) is qubit ``(i - 1) * m + j``. The amplitude
of ``|x>`` is the immanant of the (0,1) matrix spelled out by ``x``.
Unnormalized ``|+> = |0> + |1>`` leaves keep those amplitudes integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as _perms

import numpy as np

from . import matrices
from .matrices import DETERMINANT, PERMANENT, BudgetExceeded, SignFunction
from .mps import cluster_mps, compile_to_tree
from .tree import DenseState, Leaf, Plus, StateTree, Tensor, make_plus, make_tensor

SQRT_HALF = 1 / math.sqrt(2)
LEIBNITZ_MAX_M = 6
DENSE_MAX_QUBITS = 16
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class QubitGrid:
    m: int

    def qubit(self, i: int, j: int) -> int:
        if not (1 <= i <= self.m and 1 <= j <= self.m):
            raise ValueError(f"grid position ({i}, {j}) outside {self.m}x{self.m}")
        return (i - 1) * self.m + j

    def position(self, qubit: int) -> tuple[int, int]:
        if not 1 <= qubit <= self.m * self.m:
            raise ValueError(f"qubit {qubit} outside the {self.m}x{self.m} grid")
        return (qubit - 1) // self.m + 1, (qubit - 1) % self.m + 1


def one(q: int) -> Leaf:
    return Leaf(q, 0, 1)


def zero(q: int) -> Leaf:
    return Leaf(q, 1, 0)


def plus(q: int) -> Leaf:
    return Leaf(q, 1, 1)


# -- named states ---------------------------------------------------------------


def ghz_tree(n: int) -> StateTree:
    qs = range(1, n + 1)
    return StateTree(
        Plus(((SQRT_HALF, Tensor(tuple(zero(q) for q in qs))),
              (SQRT_HALF, Tensor(tuple(one(q) for q in qs))))),
        n,
    )


def ghz_vector(n: int) -> DenseState:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = SQRT_HALF
    return DenseState(n, amps)


def w_tree(n: int) -> StateTree:
    """``W_k = |0> W_{k-1} + |1> |0...0>`` on qubits ``n-k+1 .. n``."""

    def build(first: int):
        if first == n:
            return one(n)
        excited = Tensor((one(first),) + tuple(zero(q) for q in range(first + 1, n + 1)))
        return Plus(((1, make_tensor([zero(first), build(first + 1)])), (1, excited)))

    return StateTree(build(1), n)


def w_vector(n: int) -> DenseState:
    amps = np.zeros(2**n, dtype=complex)
    for q in range(n):
        amps[1 << q] = 1
    return DenseState(n, amps)


def cluster_vector(n: int) -> DenseState:
    """``CZ_{12} CZ_{23} ... |+>^n`` by applying the gates to the amplitudes."""
    amps = np.ones(2**n, dtype=complex) / math.sqrt(2**n)
    idx = np.arange(2**n)
    bits = [(idx >> (n - q)) & 1 for q in range(1, n + 1)]
    for q in range(n - 1):
        amps = np.where(bits[q] & bits[q + 1], -amps, amps)
    return DenseState(n, amps)


NAMED = {
    "ghz": (ghz_tree, ghz_vector),
    "w": (w_tree, w_vector),
    "cluster_chain": (lambda n: compile_to_tree(cluster_mps(n)), cluster_vector),
}


def named_state(kind: str, n: int) -> tuple[StateTree, DenseState]:
    if kind not in NAMED:
        raise ValueError(f"unknown named state {kind!r}; choose from {sorted(NAMED)}")
    if n < 2:
        raise ValueError("named states need n >= 2")
    tree_fn, vec_fn = NAMED[kind]
    return tree_fn(n), vec_fn(n)


# -- generic decompositions -----------------------------------------------------


def _product_term(n: int, index: int):
    bits = format(index, f"0{n}b")
    leaves = [one(q) if b == "1" else zero(q) for q, b in enumerate(bits, start=1)]
    return leaves[0] if n == 1 else Tensor(tuple(leaves))


def basis_expansion_tree(state: DenseState) -> StateTree:
    """One sum over the computational basis states with nonzero amplitude."""
    amps = state.amplitudes
    nz = np.flatnonzero(np.abs(amps) > 0)
    if nz.size == 0:
        raise ValueError("cannot expand the zero state")
    terms = [(complex(amps[k]), _product_term(state.n, int(k))) for k in nz]
    return StateTree(make_plus(terms), state.n)


def split_decomposition_tree(state: DenseState) -> StateTree:
    """Recursive ``|0>|chi_0> + |1>|chi_1>`` split on the leading qubit.

    A branch whose remainder vanishes (norm below ``1e-12`` of the input
    norm) is dropped instead of expanded.
    """
    norm = state.norm
    if norm == 0:
        raise ValueError("cannot decompose the zero state")
    tol = ZERO_TOL * norm

    def build(first: int, amps: np.ndarray):
        if amps.shape[0] == 2:
            return Leaf(first, complex(amps[0]), complex(amps[1]))
        half = amps.shape[0] // 2
        terms = []
        for bit, chunk in ((0, amps[:half]), (1, amps[half:])):
            if np.linalg.norm(chunk) <= tol:
                continue
            head = one(first) if bit else zero(first)
            terms.append((1, make_tensor([head, build(first + 1, chunk)])))
        return make_plus(terms)

    return StateTree(build(1, state.amplitudes), state.n)


def split_bound(n: int) -> int:
    return 3 * 2 ** (n - 1) - 2


# -- immanant states ------------------------------------------------------------


def laplace_size(m: int) -> int:
    """``S_m = m (S_{m-1} + 2m - 1)``, ``S_1 = 1``."""
    size = 1
    for k in range(2, m + 1):
        size = k * (size + 2 * k - 1)
    return size


def laplace_lambda(m: int) -> float:
    """``lambda_m = sum_{k=1}^m (2k - 1)/(k - 1)!`` so that ``S_m = m! lambda_m``."""
    return sum((2 * k - 1) / math.factorial(k - 1) for k in range(1, m + 1))


def immanant_state_laplace_tree(m: int, sign: SignFunction = DETERMINANT) -> StateTree:
    """Expansion by minors along the first remaining row.

    The term for column ``j`` puts ``|1>`` at ``(i, j)``, the minor's state on
    the block without row ``i`` and column ``j``, and ``|+>`` on the other
    ``2k - 2`` qubits of that row and column.
    """
    if sign.kind not in ("determinant", "permanent"):
        raise ValueError("the Laplace construction covers determinant and permanent only")
    if m < 1:
        raise ValueError("m must be positive")
    grid = QubitGrid(m)
    signed = sign.kind == "determinant"

    def build(rows: tuple, cols: tuple):
        r = rows[0]
        if len(rows) == 1:
            return one(grid.qubit(r, cols[0]))
        terms = []
        for pos, c in enumerate(cols):
            minor = build(rows[1:], cols[:pos] + cols[pos + 1:])
            pluses = [plus(grid.qubit(r, cc)) for cc in cols if cc != c]
            pluses += [plus(grid.qubit(rr, c)) for rr in rows[1:]]
            weight = -1 if signed and pos % 2 else 1
            terms.append((weight, Tensor((one(grid.qubit(r, c)), minor, *pluses))))
        return Plus(tuple(terms))

    full = tuple(range(1, m + 1))
    return StateTree(build(full, full), m * m)


def immanant_state_leibnitz_tree(m: int, sign: SignFunction = DETERMINANT,
                                 max_m: int = LEIBNITZ_MAX_M) -> StateTree:
    """Sum of ``m!`` product states, one per permutation (lexicographic order)."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > max_m:
        raise BudgetExceeded(f"m = {m} exceeds the Leibnitz budget of {max_m} (m! terms)")
    sign.check_size(m)
    grid = QubitGrid(m)
    terms = []
    for perm in _perms(range(m)):
        ones = {grid.qubit(i + 1, perm[i] + 1) for i in range(m)}
        leaves = tuple(one(q) if q in ones else plus(q) for q in range(1, m * m + 1))
        node = leaves[0] if m == 1 else Tensor(leaves)
        terms.append((sign(perm), node))
    return StateTree(make_plus(terms), m * m)


def immanant_state_vector(m: int, sign: SignFunction = DETERMINANT) -> DenseState:
    """Amplitudes from the Leibnitz sum over all ``2^(m^2)`` (0,1) matrices."""
    if m < 1:
        raise ValueError("m must be positive")
    if m * m > DENSE_MAX_QUBITS:
        raise BudgetExceeded(f"{m * m} qubits exceeds the dense budget of {DENSE_MAX_QUBITS}")
    mats = matrices.batch_matrices(0, 2 ** (m * m), m)
    return DenseState(m * m, matrices.batch_immanants(mats, sign).astype(complex))


def sign_function(name: str) -> SignFunction:
    names = {"det": DETERMINANT, "determinant": DETERMINANT,
             "per": PERMANENT, "permanent": PERMANENT}
    try:
        return names[name]
    except KeyError:
        raise ValueError(f"unknown sign function {name!r}") from None
