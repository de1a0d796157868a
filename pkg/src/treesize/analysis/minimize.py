"""Heuristic tree-size minimization for states of up to four qubits.

Candidate trees are enumerated as *skeletons* (node kinds, qubit labels, no
numbers) in order of increasing leaf count. A skeleton is skipped when a
Schmidt-rank bound proves it cannot reach the target; otherwise its leaf
vectors are fitted by random-restart nonlinear least squares. The first
skeleton that fits gives an upper bound on the tree size.

Reduced skeletons never nest a node inside one of the same kind, never sum
single-qubit leaves, and carry no plus weights. Every tree reduces to one of
these with no more leaves (merge nested sums and products, fold a sum of
leaves on one qubit into a leaf, push weights into leaves), so searching the
reduced grammar in order of size is exhaustive at the skeleton level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import least_squares

from ..tree import (DenseState, Leaf, Plus, StateTree, Tensor, evaluate_node, apply_ilo,
                    apply_local_dense, evaluate, iter_nodes, leaf_count,
                    proportional_distance, validate)

HIT_TOL = 1e-7
MAX_QUBITS = 4
# states such as W are limits of smaller trees whose sums cancel almost
# completely; fits of that kind are not accepted as representations
MAX_CANCELLATION = 1e4

# -- skeleton grammar -----------------------------------------------------------
# ("leaf", q) | ("tensor", children) | ("plus", children)


def set_partitions(items: tuple):
    """Unordered partitions of ``items`` into nonempty blocks."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield ((first,),) + part
        for k in range(len(part)):
            yield part[:k] + ((first,) + part[k],) + part[k + 1:]


def _compositions(total: int, minima: Sequence[int]):
    if len(minima) == 1:
        if total >= minima[0]:
            yield (total,)
        return
    for head in range(minima[0], total - sum(minima[1:]) + 1):
        for tail in _compositions(total - head, minima[1:]):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _nonplus(sup: tuple, k: int, reduced: bool) -> tuple:
    if len(sup) == 1:
        return (("leaf", sup[0]),) if k == 1 else ()
    return _tensor(sup, k, reduced)


@lru_cache(maxsize=None)
def _nontensor(sup: tuple, k: int, reduced: bool) -> tuple:
    out = []
    if len(sup) == 1 and k == 1:
        out.append(("leaf", sup[0]))
    out.extend(_plus(sup, k, reduced))
    return tuple(out)


@lru_cache(maxsize=None)
def _tensor(sup: tuple, k: int, reduced: bool) -> tuple:
    out = []
    for blocks in set_partitions(sup):
        if len(blocks) < 2:
            continue
        blocks = tuple(sorted(tuple(sorted(b)) for b in blocks))
        for sizes in _compositions(k, [len(b) for b in blocks]):
            options = [_nontensor(b, s, reduced) for b, s in zip(blocks, sizes)]
            for combo in _product(options):
                out.append(("tensor", combo))
    return tuple(out)


def _product(options):
    if not options:
        yield ()
        return
    for head in options[0]:
        for tail in _product(options[1:]):
            yield (head,) + tail


@lru_cache(maxsize=None)
def _plus(sup: tuple, k: int, reduced: bool) -> tuple:
    if reduced and len(sup) == 1:
        return ()
    low = len(sup)
    items = [sk for size in range(low, k - low + 1) for sk in _nonplus(sup, size, reduced)]
    sizes = {sk: _size(sk) for sk in items}
    out = []

    def choose(start, remaining, chosen):
        if remaining == 0:
            if len(chosen) >= 2:
                out.append(("plus", tuple(chosen)))
            return
        for idx in range(start, len(items)):
            sk = items[idx]
            if sizes[sk] <= remaining:
                choose(idx, remaining - sizes[sk], chosen + [sk])

    choose(0, k, [])
    return tuple(out)


def _size(sk) -> int:
    if sk[0] == "leaf":
        return 1
    return sum(_size(c) for c in sk[1])


def _support(sk) -> frozenset:
    if sk[0] == "leaf":
        return frozenset([sk[1]])
    return frozenset().union(*(_support(c) for c in sk[1]))


def skeletons(n: int, k: int, reduced: bool = True) -> tuple:
    """All skeletons on qubits ``1..n`` with exactly ``k`` leaves."""
    sup = tuple(range(1, n + 1))
    return tuple(_nonplus(sup, k, reduced)) + tuple(_plus(sup, k, reduced))


def skeleton_str(sk) -> str:
    if sk[0] == "leaf":
        return str(sk[1])
    sym = "*" if sk[0] == "tensor" else "+"
    return f"{sym}(" + ",".join(skeleton_str(c) for c in sk[1]) + ")"


# -- Schmidt-rank filter --------------------------------------------------------


def rank_bound(sk, side: frozenset) -> int:
    """Upper bound on the Schmidt rank of any state with this skeleton."""
    sup = _support(sk)
    a, b = sup & side, sup - side
    if not a or not b:
        return 1
    if sk[0] == "tensor":
        bound = math.prod(rank_bound(c, side) for c in sk[1])
    else:
        bound = sum(rank_bound(c, side) for c in sk[1])
    return min(bound, 2 ** len(a), 2 ** len(b))


def _cuts(n: int) -> list[frozenset]:
    qubits = range(2, n + 1)
    cuts = []
    for size in range(0, n - 1):
        for rest in combinations(qubits, size):
            cuts.append(frozenset((1,) + rest))
    return cuts


def _tail_norms(target: np.ndarray, n: int) -> dict:
    """For every cut: cumulative tail norms of the Schmidt spectrum."""
    arr = target.reshape((2,) * n)
    tails = {}
    for cut in _cuts(n):
        left = sorted(cut)
        right = [q for q in range(1, n + 1) if q not in cut]
        mat = arr.transpose([q - 1 for q in left + right]).reshape(2 ** len(left), -1)
        sv = np.linalg.svd(mat, compute_uv=False)
        tails[cut] = np.sqrt(np.cumsum((sv**2)[::-1])[::-1])
    return tails


def rank_certificate(sk, tails: dict, tol: float = HIT_TOL) -> Optional[tuple]:
    """A cut on which the skeleton provably misses the target by > ``tol``."""
    for cut, tail in tails.items():
        r = rank_bound(sk, cut)
        if r < len(tail) and tail[r] > tol:
            return tuple(sorted(cut)), r, float(tail[r])
    return None


# -- fitting --------------------------------------------------------------------


def _index_leaves(sk, counter):
    if sk[0] == "leaf":
        counter[0] += 1
        return ("leaf", sk[1], counter[0] - 1)
    return (sk[0], tuple(_index_leaves(c, counter) for c in sk[1]))


def _eval_batched(node, vecs):
    """vecs: (k, B, 2). Returns (sorted qubits, array (B, 2, ..., 2))."""
    if node[0] == "leaf":
        return (node[1],), vecs[node[2]]
    parts = [_eval_batched(c, vecs) for c in node[1]]
    if node[0] == "plus":
        return parts[0][0], sum(p[1] for p in parts)
    qubits, arr = parts[0]
    batch = arr.shape[0]
    for cq, carr in parts[1:]:
        arr = (arr.reshape(batch, -1, 1) * carr.reshape(batch, 1, -1)).reshape(
            (batch,) + (2,) * (len(qubits) + len(cq)))
        qubits = qubits + cq
    order = np.argsort(qubits)
    return tuple(qubits[i] for i in order), arr.transpose([0] + [1 + i for i in order])


class SkeletonModel:
    """Amplitude map params -> state for one skeleton, with exact Jacobian."""

    def __init__(self, sk, n: int):
        self.skeleton = sk
        self.n = n
        counter = [0]
        self.indexed = _index_leaves(sk, counter)
        self.k = counter[0]
        self.nparams = 4 * self.k

    def leaf_vectors(self, theta: np.ndarray) -> np.ndarray:
        t = theta.reshape(self.k, 4)
        return np.stack([t[:, 0] + 1j * t[:, 1], t[:, 2] + 1j * t[:, 3]], axis=1)

    def value_and_derivs(self, theta):
        """State and its derivatives w.r.t. each leaf amplitude (2k rows).

        The state is affine in any single leaf vector u (sibling sums do not
        depend on it), so d/du_c = v(u = e_c) - v(u = 0).
        """
        leaves = self.leaf_vectors(theta)
        batch = 1 + 3 * self.k
        vecs = np.repeat(leaves[:, None, :], batch, axis=1)
        for l in range(self.k):
            base = 1 + 3 * l
            vecs[l, base:base + 3] = 0
            vecs[l, base, 0] = 1
            vecs[l, base + 1, 1] = 1
        _, arr = _eval_batched(self.indexed, vecs)
        flat = arr.reshape(batch, -1)
        grouped = flat[1:].reshape(self.k, 3, -1)
        derivs = grouped[:, :2, :] - grouped[:, 2:3, :]
        return flat[0], derivs.reshape(2 * self.k, -1)

    def value(self, theta) -> np.ndarray:
        leaves = self.leaf_vectors(theta)[:, None, :]
        _, arr = _eval_batched(self.indexed, leaves)
        return arr.reshape(-1)

    def to_tree(self, theta) -> StateTree:
        leaves = self.leaf_vectors(theta)

        def build(node):
            if node[0] == "leaf":
                a0, a1 = leaves[node[2]]
                return Leaf(node[1], complex(a0), complex(a1))
            children = tuple(build(c) for c in node[1])
            if node[0] == "tensor":
                return Tensor(children)
            return Plus(tuple((1, c) for c in children))

        return StateTree(build(self.indexed), self.n)


def cancellation(tree: StateTree) -> float:
    """Largest ratio sum_i |term_i| / |sum_i term_i| over the plus nodes."""
    worst = 1.0
    for node in iter_nodes(tree.root):
        if isinstance(node, Plus):
            terms = [w * evaluate_node(c)[1] for w, c in node.children]
            norm = np.linalg.norm(sum(terms))
            spread = sum(np.linalg.norm(t) for t in terms)
            worst = max(worst, math.inf if norm == 0 else spread / norm)
    return worst


def fit_skeleton(model: SkeletonModel, target: np.ndarray, rng: np.random.Generator,
                 restarts: int, tol: float = HIT_TOL, max_nfev: int = 400):
    """Best (distance, params) over random restarts; stops at the first hit."""
    dim = target.shape[0]
    rows = 2 * dim
    pad = max(0, model.nparams - rows)

    def residual(theta):
        diff = model.value(theta) - target
        return np.concatenate([diff.real, diff.imag, np.zeros(pad)])

    def jac(theta):
        _, d = model.value_and_derivs(theta)  # (2k, dim): d v / d amp
        cols = np.empty((rows + pad, model.nparams))
        dk = d.reshape(model.k, 2, dim)
        for l in range(model.k):
            for c in range(2):
                col = 4 * l + 2 * c
                cols[:rows, col] = np.concatenate([dk[l, c].real, dk[l, c].imag])
                cols[:rows, col + 1] = np.concatenate([-dk[l, c].imag, dk[l, c].real])
        cols[rows:] = 0
        return cols

    best = (math.inf, None)
    for _ in range(restarts):
        x0 = rng.normal(size=model.nparams)
        sol = least_squares(residual, x0, jac=jac, method="lm",
                            ftol=1e-15, xtol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        dist = proportional_distance(model.value(sol.x), target)
        if dist < best[0]:
            best = (dist, sol.x)
        if dist < tol:
            break
    return best


# -- search ---------------------------------------------------------------------


@dataclass
class Attempt:
    size: int
    skeleton: str
    status: str  # "rank-rejected", "fit-failed", "degenerate" or "hit"
    distance: float
    detail: str = ""


@dataclass
class MinimizeResult:
    n: int
    size_budget: int
    tree: Optional[StateTree]
    distance: float
    attempts: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.tree is not None

    @property
    def size(self) -> Optional[int]:
        return leaf_count(self.tree) if self.tree is not None else None

    @property
    def message(self) -> str:
        if self.found:
            return f"representation with {self.size} leaves (distance {self.distance:.3e})"
        return f"no representation found <= {self.size_budget} leaves"

    def rejected_up_to(self, size: int) -> list:
        return [a for a in self.attempts if a.size <= size]


def minimize_tree_size(state: DenseState, size_budget: int, restarts: int = 4,
                       seed: int = 0, reduced: bool = True, min_size: Optional[int] = None,
                       tol: float = HIT_TOL) -> MinimizeResult:
    """Smallest-leaf tree found for ``state`` within ``size_budget`` leaves.

    The outcome is a deterministic function of ``(seed, size_budget,
    restarts, reduced)``. A returned tree is an upper bound on the tree size;
    sizes whose every skeleton was rank-rejected are certified impossible.
    """
    n = state.n
    if n > MAX_QUBITS:
        raise ValueError(f"minimization is limited to {MAX_QUBITS} qubits")
    if state.norm == 0:
        raise ValueError("zero state")
    target = state.normalized().amplitudes
    tails = _tail_norms(target, n) if n > 1 else {}
    result = MinimizeResult(n, size_budget, None, math.inf)
    for k in range(min_size or n, size_budget + 1):
        for idx, sk in enumerate(skeletons(n, k, reduced)):
            label = skeleton_str(sk)
            cert = rank_certificate(sk, tails, tol)
            if cert is not None:
                cut, r, tail = cert
                result.attempts.append(Attempt(k, label, "rank-rejected", tail,
                                               f"cut {list(cut)}: rank <= {r}"))
                continue
            model = SkeletonModel(sk, n)
            rng = np.random.default_rng([seed, k, idx])
            dist, theta = fit_skeleton(model, target, rng, restarts, tol)
            if dist < tol:
                tree = model.to_tree(theta)
                ratio = cancellation(tree)
                if validate(tree).ok and ratio <= MAX_CANCELLATION:
                    result.attempts.append(Attempt(k, label, "hit", dist))
                    result.tree, result.distance = tree, dist
                    return result
                result.attempts.append(Attempt(k, label, "degenerate", dist,
                                               f"cancellation {ratio:.3g}"))
                continue
            result.attempts.append(Attempt(k, label, "fit-failed", dist))
    return result


# -- SLOCC consistency ----------------------------------------------------------


@dataclass
class SloccReport:
    size_state: Optional[int]
    size_image: Optional[int]
    transported_size: Optional[int]
    transported_distance: float

    @property
    def ok(self) -> bool:
        return (self.size_state is not None and self.size_state == self.size_image
                and self.transported_size == self.size_state
                and self.transported_distance < HIT_TOL)


def slocc_tree_size_consistency(state: DenseState, ops: Sequence, seed: int = 0,
                                size_budget: int = 8, restarts: int = 4) -> SloccReport:
    """Minimize a state and its ILO image with matched budgets.

    Also carries the tree found for the state through ``apply_ilo`` and
    checks that it represents the image with the same number of leaves.
    """
    if state.n > 3:
        raise ValueError("SLOCC consistency runs on at most 3 qubits")
    image = apply_local_dense(state, ops)
    first = minimize_tree_size(state, size_budget, restarts, seed)
    second = minimize_tree_size(image, size_budget, restarts, seed)
    moved_size, moved_dist = None, math.inf
    if first.found:
        moved = apply_ilo(first.tree, ops)
        moved_size = leaf_count(moved)
        moved_dist = proportional_distance(evaluate(moved), image)
    return SloccReport(first.size, second.size, moved_size, moved_dist)
