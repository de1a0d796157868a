import math

import numpy as np
import pytest

from treesize.circuit import (
    ProtocolInstance,
    ancilla_count,
    measure_ancillas,
    outcome_signs,
    prepare_superposition,
    verify_all_outcomes,
)
from treesize.matrices import PERMANENT, permutations
from treesize.states import QubitGrid, immanant_state_vector
from treesize.tree import proportional_distance


def phi(m, perm):
    """Normalized product state, |1> on the permutation's cells and |+> elsewhere."""
    grid = QubitGrid(m)
    ones = {grid.qubit(r + 1, c + 1) for r, c in enumerate(perm)}
    out = np.array([1.0])
    for q in range(1, m * m + 1):
        out = np.kron(out, [0, 1] if q in ones else [1 / math.sqrt(2)] * 2)
    return out


def test_ancilla_counts():
    assert [ancilla_count(m) for m in (1, 2, 3)] == [0, 1, 3]
    with pytest.raises(ValueError):
        prepare_superposition(4)


def test_m2_joint_state():
    joint = prepare_superposition(2)
    expected = np.concatenate([phi(2, (0, 1)), phi(2, (1, 0))])
    assert joint.n == 5
    assert proportional_distance(joint, expected) < 1e-12


def test_m1_degenerate():
    joint = prepare_superposition(1)
    np.testing.assert_allclose(joint.amplitudes, [0, 1])


def test_m3_has_two_residual_terms():
    inst = ProtocolInstance(3)
    assert inst.s == 3 and inst.N == 8
    assert inst.N - len(inst.perms) == 2


def test_m2_outcomes():
    joint = prepare_superposition(2)
    plus, p0 = measure_ancillas(joint, 2, "0")
    minus, p1 = measure_ancillas(joint, 2, "1")
    assert proportional_distance(plus, immanant_state_vector(2, PERMANENT)) < 1e-12
    assert proportional_distance(minus, immanant_state_vector(2)) < 1e-12
    assert p0 + p1 == pytest.approx(1, abs=1e-12)


def test_m3_outcomes_independent_reconstruction():
    joint = prepare_superposition(3)
    perms = permutations(3)
    total = 0.0
    for k in range(8):
        outcome = format(k, "03b")
        signs = outcome_signs(3, outcome)
        expected = sum(signs[i] * phi(3, p) for i, p in enumerate(perms))
        # the two residual branches leave the grid in |0...0>
        expected = expected + (signs[6] + signs[7]) * np.eye(2**9)[0]
        state, prob = measure_ancillas(joint, 3, outcome)
        total += prob
        assert proportional_distance(state, expected) < 1e-9
    assert total == pytest.approx(1, abs=1e-12)


def test_sign_rule():
    np.testing.assert_array_equal(outcome_signs(2, "10"), [1, 1, -1, -1])
    np.testing.assert_array_equal(outcome_signs(2, "11"), [1, -1, -1, 1])


@pytest.mark.parametrize("m, count", [(1, 1), (2, 2), (3, 8)])
def test_verify_all(m, count):
    report = verify_all_outcomes(m)
    assert len(report.outcomes) == count and report.passed == count
    assert report.total_probability == pytest.approx(1, abs=1e-12)
    for row in report.outcomes:
        assert all(abs(c) == 1 for c in row.signs)


def test_bad_outcome():
    joint = prepare_superposition(2)
    with pytest.raises(ValueError):
        measure_ancillas(joint, 2, "01")
    with pytest.raises(ValueError):
        measure_ancillas(joint, 2, "x")
