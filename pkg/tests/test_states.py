import math

import numpy as np
import pytest

from conftest import brute_vector
from treesize.matrices import DETERMINANT, PERMANENT, BudgetExceeded, SignFunction
from treesize.states import (
    QubitGrid,
    basis_expansion_tree,
    cluster_vector,
    ghz_tree,
    immanant_state_laplace_tree,
    immanant_state_leibnitz_tree,
    immanant_state_vector,
    laplace_lambda,
    laplace_size,
    named_state,
    split_bound,
    split_decomposition_tree,
    w_tree,
)
from treesize.tree import DenseState, evaluate, leaf_count, proportional_distance, validate

CZ = np.diag([1, 1, 1, -1])


def cz_chain_oracle(n):
    """CZ_{12} CZ_{23} ... applied to |+>^n, built from explicit matrices."""
    state = np.ones(2**n) / 2 ** (n / 2)
    for i in range(n - 1):
        op = np.kron(np.kron(np.eye(2**i), CZ), np.eye(2 ** (n - i - 2)))
        state = op @ state
    return state


def random_dense(n, rng):
    return DenseState(n, rng.normal(size=2**n) + 1j * rng.normal(size=2**n))


def test_grid_bijection():
    grid = QubitGrid(3)
    qubits = [grid.qubit(i, j) for i in range(1, 4) for j in range(1, 4)]
    assert qubits == list(range(1, 10))
    assert all(grid.qubit(*grid.position(q)) == q for q in qubits)


def test_named_ghz():
    tree, dense = named_state("ghz", 3)
    assert leaf_count(tree) == 6
    assert [b for b, _ in dense.nonzero_terms()] == ["000", "111"]
    assert proportional_distance(evaluate(tree), dense) < 1e-12


def test_named_w_sizes():
    tree, dense = named_state("w", 3)
    assert leaf_count(tree) == 8
    assert [b for b, _ in dense.nonzero_terms()] == ["001", "010", "100"]
    sizes = [leaf_count(w_tree(n)) for n in range(1, 7)]
    expected = [1]
    for n in range(2, 7):
        expected.append(expected[-1] + n + 1)
    assert sizes == expected


def test_named_cluster():
    tree, dense = named_state("cluster_chain", 4)
    assert proportional_distance(dense, cluster_vector(4)) < 1e-12
    np.testing.assert_allclose(cluster_vector(4).amplitudes, cz_chain_oracle(4), atol=1e-12)
    assert proportional_distance(evaluate(tree), cz_chain_oracle(4)) < 1e-12


def test_named_unknown():
    with pytest.raises(ValueError):
        named_state("dicke", 3)


def test_ghz_size_is_2n():
    for n in range(2, 8):
        assert leaf_count(ghz_tree(n)) == 2 * n


def test_basis_expansion_det2():
    tree = basis_expansion_tree(immanant_state_vector(2))
    assert leaf_count(tree) == 24
    assert proportional_distance(evaluate(tree), immanant_state_vector(2)) < 1e-12


def test_basis_expansion_small_cases():
    single = DenseState(4, np.eye(16)[int("0110", 2)])
    assert leaf_count(basis_expansion_tree(single)) == 4
    uniform = DenseState(2, np.ones(4))
    assert leaf_count(basis_expansion_tree(uniform)) == 8


def test_split_bound_values():
    assert [split_bound(n) for n in range(1, 6)] == [1, 4, 10, 22, 46]


def test_split_generic_three_qubits(rng):
    state = random_dense(3, rng)
    tree = split_decomposition_tree(state)
    assert leaf_count(tree) == 10
    assert proportional_distance(evaluate(tree), state) < 1e-9


def test_split_single_qubit():
    assert leaf_count(split_decomposition_tree(DenseState(1, [0.3, 1j]))) == 1


def test_split_prunes_ghz4():
    tree = split_decomposition_tree(DenseState(4, np.eye(16)[0] + np.eye(16)[15]))
    assert leaf_count(tree) == 8


def test_split_and_basis_reproduce_up_to_ten(rng):
    for n in (5, 8, 10):
        state = random_dense(n, rng)
        assert proportional_distance(evaluate(split_decomposition_tree(state)), state) < 1e-9
    state = random_dense(6, rng)
    assert proportional_distance(evaluate(basis_expansion_tree(state)), state) < 1e-9


def test_laplace_det2_structure():
    tree = immanant_state_laplace_tree(2)
    assert validate(tree).ok and leaf_count(tree) == 8
    plus = np.array([1, 1])
    one = np.array([0, 1])
    expected = np.kron(np.kron(np.kron(one, plus), plus), one) - np.kron(
        np.kron(np.kron(plus, one), one), plus
    )
    np.testing.assert_array_equal(evaluate(tree).amplitudes, expected)


def test_laplace_sizes():
    assert [laplace_size(m) for m in range(1, 5)] == [1, 8, 39, 184]
    assert [leaf_count(immanant_state_laplace_tree(m)) for m in range(1, 5)] == [1, 8, 39, 184]


def test_laplace_lambda_converges_to_3e():
    lams = [laplace_lambda(m) for m in range(1, 12)]
    assert all(a < b for a, b in zip(lams, lams[1:]))
    assert abs(lams[3] - 3 * math.e) / (3 * math.e) < 0.06
    assert abs(lams[-1] - 3 * math.e) < 1e-5


def test_laplace_m3_transposition_sign():
    # sigma = (2,1,3): ones at (1,2), (2,1), (3,3)
    grid = QubitGrid(3)
    bits = ["0"] * 9
    for i, j in [(1, 2), (2, 1), (3, 3)]:
        bits[grid.qubit(i, j) - 1] = "1"
    amps = evaluate(immanant_state_laplace_tree(3)).amplitudes
    assert amps[int("".join(bits), 2)] == -1


def test_leibnitz_trees():
    det2 = immanant_state_leibnitz_tree(2)
    assert leaf_count(det2) == 8
    np.testing.assert_array_equal(
        evaluate(det2).amplitudes, evaluate(immanant_state_laplace_tree(2)).amplitudes
    )
    assert leaf_count(immanant_state_leibnitz_tree(3)) == 6 * 9
    single = immanant_state_leibnitz_tree(1)
    assert leaf_count(single) == 1
    np.testing.assert_array_equal(evaluate(single).amplitudes, [0, 1])


def test_per2_amplitudes():
    amps = evaluate(immanant_state_leibnitz_tree(2, PERMANENT)).amplitudes
    expected = np.zeros(16)
    for bits in ("1001", "0110", "1011", "1101", "0111", "1110"):
        expected[int(bits, 2)] = 1
    expected[15] = 2
    np.testing.assert_array_equal(amps, expected)


def test_leibnitz_budget():
    with pytest.raises(BudgetExceeded):
        immanant_state_leibnitz_tree(7)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("sign", [DETERMINANT, PERMANENT])
def test_three_constructions_agree(m, sign):
    oracle = immanant_state_vector(m, sign)
    laplace = immanant_state_laplace_tree(m, sign)
    leibnitz = immanant_state_leibnitz_tree(m, sign)
    np.testing.assert_array_equal(evaluate(laplace).amplitudes, oracle.amplitudes)
    np.testing.assert_array_equal(brute_vector(leibnitz), oracle.amplitudes)


def test_vector_small_cases():
    np.testing.assert_array_equal(immanant_state_vector(1).amplitudes, [0, 1])
    custom = SignFunction.custom([1, 1])
    np.testing.assert_array_equal(
        immanant_state_vector(2, custom).amplitudes, immanant_state_vector(2, PERMANENT).amplitudes
    )
