import numpy as np

from treesize.analysis import persistency_upper
from treesize.analysis.persistency import basis, disentangling_defect
from treesize.states import cluster_vector, ghz_vector, immanant_state_vector, w_vector
from treesize.tree import DenseState


def test_basis_is_orthonormal():
    for theta, phi in [(0, 0), (0.3, 1.1), (np.pi / 2, np.pi)]:
        b = basis(theta, phi)
        np.testing.assert_allclose(b @ b.conj().T, np.eye(2), atol=1e-12)


def test_product_state():
    assert persistency_upper(DenseState(3, np.ones(8))).k == 0


def test_ghz3_one_measurement():
    res = persistency_upper(ghz_vector(3))
    assert res.k == 1
    (q, theta, phi), = res.witness
    state = ghz_vector(3).normalized().as_tensor()
    assert disentangling_defect(state, (q,), np.array([theta, phi])) < 1e-10


def test_ghz3_x_basis_leaves_bell_pairs():
    state = ghz_vector(3).normalized().as_tensor()
    assert disentangling_defect(state, (1,), np.array([np.pi / 2, 0])) > 0.1


def test_w3_and_cluster4():
    assert persistency_upper(w_vector(3)).k == 2
    assert persistency_upper(cluster_vector(4)).k == 2


def test_det2_reports_n_minus_one():
    res = persistency_upper(immanant_state_vector(2), trials=20, seed=0)
    assert res.k == 3
    logged_k = {k for k, _, _ in res.log}
    assert logged_k == {1, 2}
    assert all(defect > 1e-6 for _, _, defect in res.log)
