"""Upper bounds on entanglement persistency by measurement search.

A candidate is a set of ``k`` qubits, each measured projectively in the basis

    |u_0> = cos(t/2)|0> + e^{ip} sin(t/2)|1>,   |u_1> = -e^{-ip} sin(t/2)|0> + cos(t/2)|1>.

It disentangles the state when every outcome branch with nonzero probability
leaves the unmeasured qubits in a fully product state. Bases are searched on
an angular grid (``t`` in steps of pi/4, ``p`` in steps of pi/2), then by
random starts, each followed by a Nelder-Mead refinement of the best points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from ..tree import DenseState

THETA_GRID = np.arange(0, 5) * math.pi / 4
PHI_GRID = np.arange(0, 4) * math.pi / 2
BRANCH_TOL = 1e-12
HIT_TOL = 1e-10
MAX_QUBITS = 6


def basis(theta: float, phi: float) -> np.ndarray:
    """Rows are <u_0| and <u_1| (already conjugated)."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u0 = np.array([c, np.exp(1j * phi) * s])
    u1 = np.array([-np.exp(-1j * phi) * s, c])
    return np.stack([u0.conj(), u1.conj()])


def product_defect(arr: np.ndarray) -> float:
    """Zero iff the normalized tensor ``arr`` is a product over its axes.

    Sums ``1 - s_max^2`` over the single-qubit cuts.
    """
    n = arr.ndim
    total = 0.0
    for axis in range(n):
        mat = np.moveaxis(arr, axis, 0).reshape(2, -1)
        sv = np.linalg.svd(mat, compute_uv=False)
        total += 1.0 - sv[0] ** 2
    return total


def disentangling_defect(state: np.ndarray, qubits: tuple, angles: np.ndarray) -> float:
    """Worst product defect over outcome branches (state normalized, n axes)."""
    n = state.ndim
    if n - len(qubits) <= 1:
        return 0.0
    bases = [basis(angles[2 * j], angles[2 * j + 1]) for j in range(len(qubits))]
    worst = 0.0
    for outcome in itertools.product((0, 1), repeat=len(qubits)):
        branch = state
        # contract from the highest axis down so lower axis numbers stay valid
        for j in sorted(range(len(qubits)), key=lambda j: -qubits[j]):
            branch = np.tensordot(bases[j][outcome[j]], branch, axes=([0], [qubits[j] - 1]))
        prob = float(np.vdot(branch, branch).real)
        if prob < BRANCH_TOL:
            continue
        worst = max(worst, product_defect(branch / math.sqrt(prob)))
    return worst


@dataclass
class PersistencyResult:
    n: int
    k: int
    qubits: tuple
    angles: list
    evaluations: int
    log: list = field(default_factory=list)

    @property
    def witness(self) -> list:
        return [(q, self.angles[2 * j], self.angles[2 * j + 1]) for j, q in enumerate(self.qubits)]


def _search_k(state, k, trials, rng, log) -> tuple[Optional[tuple], int]:
    n = state.ndim
    evals = 0
    for qubits in itertools.combinations(range(1, n + 1), k):
        def f(x):
            return disentangling_defect(state, qubits, x)

        scored = []
        for grid in itertools.product(*([THETA_GRID, PHI_GRID] * k)):
            x = np.array(grid)
            val = f(x)
            evals += 1
            if val < HIT_TOL:
                return (qubits, x), evals
            scored.append((val, x))
        for _ in range(trials):
            x = rng.uniform(0, 2 * math.pi, size=2 * k)
            scored.append((f(x), x))
            evals += 1
        scored.sort(key=lambda item: item[0])
        for val, x in scored[:3]:
            sol = minimize(f, x, method="Nelder-Mead",
                           options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 400 * k})
            evals += sol.nfev
            if sol.fun < HIT_TOL:
                return (qubits, sol.x), evals
        log.append((k, qubits, float(scored[0][0])))
    return None, evals


def persistency_upper(state: DenseState, trials: int = 20, seed: int = 0) -> PersistencyResult:
    """Smallest number of single-qubit measurements found to disentangle ``state``.

    Always at most ``n - 1``: after that many measurements one qubit is left.
    A result below ``n - 1`` comes with a witness; the failed searches for
    smaller ``k`` are logged with their best defect, not certified.
    """
    n = state.n
    if n > MAX_QUBITS:
        raise ValueError(f"persistency search is limited to {MAX_QUBITS} qubits")
    arr = state.normalized().as_tensor()
    log: list = []
    if n == 1 or product_defect(arr) < HIT_TOL:
        return PersistencyResult(n, 0, (), [], 1, log)
    rng = np.random.default_rng(seed)
    total = 1
    for k in range(1, n - 1):
        found, evals = _search_k(arr, k, trials, rng, log)
        total += evals
        if found is not None:
            qubits, x = found
            return PersistencyResult(n, k, qubits, [float(a) for a in x], total, log)
    qubits = tuple(range(1, n))
    return PersistencyResult(n, n - 1, qubits, [0.0] * (2 * (n - 1)), total, log)
