"""Rooted-tree representation of multiqubit states.

A state tree has three node kinds:

* ``Leaf`` -- a single-qubit vector ``amp0|0> + amp1|1>`` on one qubit,
* ``Plus`` -- a weighted sum of children that all act on the same qubits,
* ``Tensor`` -- a tensor product of children acting on disjoint qubits.

Qubits are numbered ``1..n``. Qubit 1 is the most significant bit of a
dense amplitude index, so amplitude ``k`` of an ``n``-qubit vector belongs to
``|x1 x2 ... xn>`` with ``k = sum(x_i * 2**(n - i))``.

Trees describe unnormalized states. The size of a tree is its number of
leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

INVERTIBLE_TOL = 1e-12
PROPORTIONAL_TOL = 1e-9


class InvalidTreeError(ValueError):
    """Raised when an operation receives a tree that fails validation."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("invalid state tree: " + "; ".join(self.violations))


@dataclass(frozen=True)
class Leaf:
    qubit: int
    amp0: complex
    amp1: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp0, self.amp1], dtype=complex)


@dataclass(frozen=True)
class Plus:
    children: tuple  # tuple of (weight, node) pairs

    def __post_init__(self):
        object.__setattr__(
            self, "children", tuple((complex(w), c) for w, c in self.children)
        )


@dataclass(frozen=True)
class Tensor:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


TreeNode = Union[Leaf, Plus, Tensor]


@dataclass(frozen=True)
class StateTree:
    root: TreeNode
    n: int


@dataclass
class DenseState:
    """Amplitude vector of ``n`` qubits, qubit 1 most significant."""

    n: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape[0] != 2**self.n:
            raise ValueError(
                f"expected {2 ** self.n} amplitudes for {self.n} qubits, "
                f"got {self.amplitudes.shape[0]}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "DenseState":
        norm = self.norm
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return DenseState(self.n, self.amplitudes / norm)

    def as_tensor(self) -> np.ndarray:
        """View with one axis per qubit, axis ``i - 1`` for qubit ``i``."""
        return self.amplitudes.reshape((2,) * self.n)

    def nonzero_terms(self, tol: float = 1e-12) -> list[tuple[str, complex]]:
        out = []
        for k in np.flatnonzero(np.abs(self.amplitudes) > tol):
            out.append((format(int(k), f"0{self.n}b"), complex(self.amplitudes[k])))
        return out

    def is_proportional(self, other: "DenseState", tol: float = PROPORTIONAL_TOL) -> bool:
        return proportional_distance(self, other) <= tol


def _vector(state) -> np.ndarray:
    if isinstance(state, DenseState):
        return state.amplitudes
    return np.asarray(state, dtype=complex).reshape(-1)


def proportional_distance(a, b) -> float:
    """Distance between the rays of ``a`` and ``b``.

    Both vectors are normalized and the best global phase is applied, so the
    result is 0 exactly when ``a`` is a nonzero multiple of ``b``. Two zero
    vectors are at distance 0; a zero and a nonzero vector at distance inf.
    """
    va, vb = _vector(a), _vector(b)
    if va.shape != vb.shape:
        raise ValueError(f"shape mismatch: {va.shape} vs {vb.shape}")
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        return 0.0 if na == nb else float("inf")
    ua, ub = va / na, vb / nb
    overlap = np.vdot(ub, ua)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(ua - phase * ub))


# -- traversal ---------------------------------------------------------------


def children_of(node: TreeNode) -> tuple:
    if isinstance(node, Plus):
        return tuple(c for _, c in node.children)
    if isinstance(node, Tensor):
        return node.children
    return ()


def iter_nodes(node: TreeNode) -> Iterator[TreeNode]:
    stack = [node]
    while stack:
        current = stack.pop()
        yield current
        stack.extend(reversed(children_of(current)))


def iter_leaves(node: TreeNode) -> Iterator[Leaf]:
    for item in iter_nodes(node):
        if isinstance(item, Leaf):
            yield item


def support(node: TreeNode) -> frozenset:
    """Set of qubits the node acts on (no validity checks)."""
    return frozenset(leaf.qubit for leaf in iter_leaves(node))


# -- validation --------------------------------------------------------------


def _check(node, path, n, violations) -> frozenset:
    if isinstance(node, Leaf):
        if not isinstance(node.qubit, (int, np.integer)) or not 1 <= node.qubit <= n:
            violations.append(f"{path}: leaf qubit {node.qubit!r} outside 1..{n}")
        if node.amp0 == 0 and node.amp1 == 0:
            violations.append(f"{path}: zero leaf on qubit {node.qubit}")
        return frozenset([node.qubit])

    if isinstance(node, Tensor):
        if len(node.children) < 2:
            violations.append(f"{path}: tensor node with {len(node.children)} child(ren)")
        seen: set = set()
        for k, child in enumerate(node.children):
            sup = _check(child, f"{path}/tensor[{k}]", n, violations)
            if seen & sup:
                violations.append(
                    f"{path}: overlapping support on qubits {sorted(seen & sup)}"
                )
            seen |= sup
        return frozenset(seen)

    if isinstance(node, Plus):
        if not node.children:
            violations.append(f"{path}: empty plus node")
            return frozenset()
        # a single weight-1 child is the canonical fold of a trivial sum
        if len(node.children) == 1 and node.children[0][0] != 1:
            violations.append(f"{path}: plus node with a single weighted child")
        supports = [
            _check(child, f"{path}/plus[{k}]", n, violations)
            for k, (_, child) in enumerate(node.children)
        ]
        first = supports[0]
        for k, sup in enumerate(supports[1:], start=1):
            if sup != first:
                violations.append(
                    f"{path}: mismatched plus support, child 0 acts on "
                    f"{sorted(first)} but child {k} acts on {sorted(sup)}"
                )
        return first

    violations.append(f"{path}: unknown node type {type(node).__name__}")
    return frozenset()


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate(tree: StateTree) -> ValidationReport:
    """Check all structural invariants; never raises."""
    violations: list[str] = []
    if not isinstance(tree.n, (int, np.integer)) or tree.n < 1:
        return ValidationReport([f"qubit count must be a positive integer, got {tree.n!r}"])
    sup = _check(tree.root, "root", tree.n, violations)
    missing = set(range(1, tree.n + 1)) - set(sup)
    if missing:
        violations.append(f"root: qubits {sorted(missing)} not covered")
    return ValidationReport(violations)


def require_valid(tree: StateTree) -> None:
    report = validate(tree)
    if not report.ok:
        raise InvalidTreeError(report.violations)


# -- canonical helpers -------------------------------------------------------


def scale(node: TreeNode, factor: complex) -> TreeNode:
    """Multiply the state of ``node`` by ``factor`` without adding leaves."""
    if factor == 1:
        return node
    if isinstance(node, Leaf):
        return Leaf(node.qubit, node.amp0 * factor, node.amp1 * factor)
    if isinstance(node, Tensor):
        return Tensor((scale(node.children[0], factor),) + node.children[1:])
    return Plus(tuple((w * factor, c) for w, c in node.children))


def make_plus(terms: Sequence[tuple]) -> TreeNode:
    """Build a sum node, folding a single term into its child."""
    terms = list(terms)
    if not terms:
        raise ValueError("a plus node needs at least one term")
    if len(terms) == 1:
        weight, child = terms[0]
        return scale(child, weight)
    return Plus(tuple(terms))


def make_tensor(children: Sequence[TreeNode]) -> TreeNode:
    """Build a product node, flattening nested products."""
    flat: list = []
    for child in children:
        if isinstance(child, Tensor):
            flat.extend(child.children)
        else:
            flat.append(child)
    if len(flat) == 1:
        return flat[0]
    return Tensor(tuple(flat))


def absorb_weights(node: TreeNode) -> TreeNode:
    """Equivalent tree whose plus weights are all 1.

    Every weight is pushed into a leaf of its child, so the leaf count is
    unchanged.
    """
    if isinstance(node, Leaf):
        return node
    if isinstance(node, Tensor):
        return Tensor(tuple(absorb_weights(c) for c in node.children))
    out = []
    for weight, child in node.children:
        child = absorb_weights(child)
        if weight != 1:
            child = _scale_unit(child, weight)
        out.append((1, child))
    return Plus(tuple(out))


def _scale_unit(node, factor):
    # like scale(), but keeps plus weights equal to 1
    if isinstance(node, Leaf):
        return Leaf(node.qubit, node.amp0 * factor, node.amp1 * factor)
    if isinstance(node, Tensor):
        return Tensor((_scale_unit(node.children[0], factor),) + node.children[1:])
    return Plus(tuple((1, _scale_unit(c, factor)) for _, c in node.children))


# -- size and evaluation -----------------------------------------------------


def leaf_count(tree: StateTree) -> int:
    require_valid(tree)
    return sum(1 for _ in iter_leaves(tree.root))


def evaluate_node(node) -> tuple[tuple, np.ndarray]:
    """Return (sorted qubits, array with one axis per qubit in that order)."""
    if isinstance(node, Leaf):
        return (node.qubit,), node.vector

    if isinstance(node, Tensor):
        qubits: tuple = ()
        arr = np.ones((), dtype=complex)
        for child in node.children:
            cq, carr = evaluate_node(child)
            arr = np.multiply.outer(arr, carr)
            qubits = qubits + cq
        order = np.argsort(qubits)
        return tuple(qubits[k] for k in order), arr.transpose(order)

    qubits = None
    total = None
    for weight, child in node.children:
        cq, carr = evaluate_node(child)
        if qubits is None:
            qubits, total = cq, weight * carr
        else:
            total = total + weight * carr
    return qubits, total


def evaluate(tree: StateTree) -> DenseState:
    """Dense amplitudes of the (unnormalized) state described by ``tree``."""
    require_valid(tree)
    _, arr = evaluate_node(tree.root)
    return DenseState(tree.n, np.ascontiguousarray(arr).reshape(-1))


def _map_leaves(node, fn):
    if isinstance(node, Leaf):
        return fn(node)
    if isinstance(node, Tensor):
        return Tensor(tuple(_map_leaves(c, fn) for c in node.children))
    return Plus(tuple((w, _map_leaves(c, fn)) for w, c in node.children))


def apply_ilo(tree: StateTree, ops: Sequence) -> StateTree:
    """Apply invertible local operators, ``ops[i - 1]`` acting on qubit ``i``.

    The skeleton is untouched: only leaf vectors change, so the result has
    the same number of leaves as the input.
    """
    require_valid(tree)
    if len(ops) != tree.n:
        raise ValueError(f"expected {tree.n} operators, got {len(ops)}")
    mats = []
    for k, op in enumerate(ops, start=1):
        mat = np.asarray(op, dtype=complex)
        if mat.shape != (2, 2):
            raise ValueError(f"operator for qubit {k} has shape {mat.shape}")
        if abs(np.linalg.det(mat)) <= INVERTIBLE_TOL:
            raise ValueError(f"operator for qubit {k} is singular")
        mats.append(mat)

    def act(leaf: Leaf) -> Leaf:
        a0, a1 = mats[leaf.qubit - 1] @ leaf.vector
        return Leaf(leaf.qubit, complex(a0), complex(a1))

    return StateTree(_map_leaves(tree.root, act), tree.n)


def apply_local_dense(state: DenseState, ops: Sequence) -> DenseState:
    """Dense ``(A_1 (x) ... (x) A_n) |state>``, one axis contraction per qubit."""
    arr = state.as_tensor()
    for axis, op in enumerate(ops):
        arr = np.moveaxis(np.tensordot(np.asarray(op, dtype=complex), arr, axes=([1], [axis])), 0, axis)
    return DenseState(state.n, arr.reshape(-1))


# -- random instances --------------------------------------------------------


def _random_complex(rng, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_tree(n: int, rng: np.random.Generator, max_depth: int = 3) -> StateTree:
    """Random valid tree on qubits ``1..n`` mixing plus and tensor nodes."""

    def build(qubits: list, depth: int) -> TreeNode:
        if len(qubits) == 1:
            q = qubits[0]
            if depth < max_depth and rng.random() < 0.2:
                return Plus(tuple((_random_complex(rng), _random_leaf(q)) for _ in range(2)))
            return _random_leaf(q)
        if depth >= max_depth or rng.random() < 0.5:
            perm = list(rng.permutation(qubits))
            nblocks = int(rng.integers(2, min(3, len(perm)) + 1))
            cuts = sorted(rng.choice(np.arange(1, len(perm)), size=nblocks - 1, replace=False))
            blocks = np.split(np.array(perm), cuts)
            return Tensor(tuple(build(sorted(int(q) for q in b), depth + 1) for b in blocks))
        nterms = int(rng.integers(2, 4))
        return Plus(tuple((_random_complex(rng), build(qubits, depth + 1)) for _ in range(nterms)))

    def _random_leaf(q):
        a0, a1 = _random_complex(rng, 2)
        return Leaf(q, complex(a0), complex(a1))

    return StateTree(build(list(range(1, n + 1)), 0), n)


def random_invertible(rng: np.random.Generator) -> np.ndarray:
    while True:
        mat = _random_complex(rng, (2, 2))
        if abs(np.linalg.det(mat)) > 1e-3:
            return mat
