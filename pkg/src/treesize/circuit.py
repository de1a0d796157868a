"""State-vector simulation of the ancilla-assisted immanant-state preparation.

Register layout: ``s`` ancilla qubits (most significant) followed by the
``m*m`` grid qubits. Ancilla basis state ``|i>`` (``i = 0..2^s - 1``) controls
the preparation of the ``i``-th Leibnitz product state, with permutations in
lexicographic order; indices ``i >= m!`` leave the main register in
``|0...0>``. Measuring every ancilla in the ``{+, -}`` basis with outcome bits
``o`` leaves the main register in

    sum_{i < m!} c(i) |Phi_i> + (sum_{i >= m!} c(i)) |0...0>,
    c(i) = (-1)^(popcount(i & o)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import permutations

import numpy as np

from .matrices import BudgetExceeded, SignFunction
from .states import QubitGrid, immanant_state_vector
from .tree import DenseState, proportional_distance

MAX_M = 3
TOL = 1e-9

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
I2 = np.eye(2, dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)


def ancilla_count(m: int) -> int:
    """Smallest ``s`` with ``2^s >= m!``."""
    return (math.factorial(m) - 1).bit_length()


@dataclass
class ProtocolInstance:
    m: int
    s: int = field(init=False)
    perms: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        self.s = ancilla_count(self.m)
        self.perms = list(permutations(range(self.m)))
        assert 2**self.s >= len(self.perms)

    @property
    def N(self) -> int:
        return 2**self.s

    @property
    def qubits(self) -> int:
        return self.m * self.m

    def ones(self, i: int) -> set:
        """Grid qubits set to |1> in product state ``i`` (empty for |0...0>)."""
        if i >= len(self.perms):
            return set()
        grid = QubitGrid(self.m)
        return {grid.qubit(r + 1, c + 1) for r, c in enumerate(self.perms[i])}

    def local_gates(self, i: int) -> list:
        """Single-qubit gates preparing product state ``i`` from |0...0>."""
        if i >= len(self.perms):
            return [I2] * self.qubits
        ones = self.ones(i)
        return [X if q in ones else H for q in range(1, self.qubits + 1)]

    def product_state(self, i: int) -> np.ndarray:
        """Normalized ``|Phi_i>`` built directly as a Kronecker product."""
        if i >= len(self.perms):
            vecs = [KET0] * self.qubits
        else:
            ones = self.ones(i)
            vecs = [KET1 if q in ones else KET_PLUS for q in range(1, self.qubits + 1)]
        return reduce(np.kron, vecs)


def _apply_single(block: np.ndarray, gate: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(gate, block, axes=([1], [axis])), 0, axis)


def prepare_superposition(m: int) -> DenseState:
    """Joint ancilla + grid state after the controlled preparation layer."""
    if m > MAX_M:
        raise BudgetExceeded(f"m = {m} exceeds the circuit budget of {MAX_M}")
    inst = ProtocolInstance(m)
    n_main = inst.qubits
    # |+>^s on the ancillas, |0...0> on the main register
    joint = np.zeros((inst.N,) + (2,) * n_main, dtype=complex)
    joint[(slice(None),) + (0,) * n_main] = 1 / math.sqrt(inst.N)
    for i in range(inst.N):
        block = joint[i]
        for axis, gate in enumerate(inst.local_gates(i)):
            if gate is not I2:
                block = _apply_single(block, gate, axis)
        joint[i] = block
    return DenseState(inst.s + n_main, joint.reshape(-1))


def outcome_signs(s: int, outcome: str) -> np.ndarray:
    """``c(i) = (-1)^(i . o)`` for every ancilla index ``i``."""
    o = int(outcome, 2) if outcome else 0
    return np.array([(-1) ** bin(i & o).count("1") for i in range(2**s)])


def _check_outcome(s, outcome):
    if len(outcome) != s or set(outcome) - {"0", "1"}:
        raise ValueError(f"outcome must be a {s}-bit string, got {outcome!r}")


def measure_ancillas(joint: DenseState, m: int, outcome: str) -> tuple[DenseState, float]:
    """Project the ancillas onto ``(|0> + (-1)^o_k |1>)/sqrt 2``.

    Bit ``o_k = 0`` is the ``+`` outcome. Returns the normalized main-register
    state and the outcome probability.
    """
    inst = ProtocolInstance(m)
    _check_outcome(inst.s, outcome)
    # each bra contracts the leading remaining ancilla axis
    shaped = joint.amplitudes.reshape((2,) * inst.s + (-1,))
    for bit in outcome:
        bra = np.array([1, -1 if bit == "1" else 1], dtype=complex) / math.sqrt(2)
        shaped = np.tensordot(bra, shaped, axes=([0], [0]))
    main = np.asarray(shaped).reshape(-1)
    prob = float(np.vdot(main, main).real)
    assert prob > 1e-15, "zero-probability outcome"
    return DenseState(inst.qubits, main / math.sqrt(prob)), prob


def predicted_state(m: int, outcome: str) -> DenseState:
    """Outcome state assembled from the sign rule and Kronecker products."""
    inst = ProtocolInstance(m)
    signs = outcome_signs(inst.s, outcome)
    vec = sum(signs[i] * inst.product_state(i) for i in range(inst.N))
    return DenseState(inst.qubits, vec)


def immanant_part(m: int, outcome: str) -> DenseState:
    """Grid-register amplitudes of the first sum as an immanant state."""
    inst = ProtocolInstance(m)
    signs = outcome_signs(inst.s, outcome)
    sign = SignFunction.custom({p: int(signs[i]) for i, p in enumerate(inst.perms)})
    return immanant_state_vector(m, sign)


@dataclass
class OutcomeCheck:
    outcome: str
    signs: list
    residual: int
    probability: float
    distance: float
    immanant_distance: float

    @property
    def ok(self) -> bool:
        return self.distance <= TOL and self.immanant_distance <= TOL


@dataclass
class CircuitReport:
    m: int
    s: int
    outcomes: list

    @property
    def passed(self) -> int:
        return sum(o.ok for o in self.outcomes)

    @property
    def total_probability(self) -> float:
        return sum(o.probability for o in self.outcomes)

    @property
    def ok(self) -> bool:
        return self.passed == len(self.outcomes)


def all_outcomes(s: int) -> list[str]:
    return [format(k, f"0{s}b") if s else "" for k in range(2**s)]


def verify_all_outcomes(m: int) -> CircuitReport:
    """Simulate, then check every measurement branch against the prediction."""
    inst = ProtocolInstance(m)
    joint = prepare_superposition(m)
    rows = []
    for outcome in all_outcomes(inst.s):
        if inst.s == 0:
            state, prob = DenseState(inst.qubits, joint.amplitudes), 1.0
        else:
            state, prob = measure_ancillas(joint, m, outcome)
        signs = outcome_signs(inst.s, outcome)
        nperm = len(inst.perms)
        # the first sum, alone, must be an immanant state with these signs
        first = sum(signs[i] * inst.product_state(i) for i in range(nperm))
        rows.append(OutcomeCheck(
            outcome=outcome,
            signs=[int(c) for c in signs[:nperm]],
            residual=int(signs[nperm:].sum()),
            probability=prob,
            distance=proportional_distance(state, predicted_state(m, outcome)),
            immanant_distance=proportional_distance(first, immanant_part(m, outcome)),
        ))
    return CircuitReport(m, inst.s, rows)
