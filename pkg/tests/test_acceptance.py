"""Acceptance gate: ten criteria, each at its stated tolerance and time limit.

Every criterion prints one ``PASS``/``FAIL`` line; the lines are collected and
repeated in the pytest terminal summary. The module also runs as a script:
``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from treesize.analysis import minimize_tree_size, symmetry_eigencheck
from treesize.analysis.symmetry import GridSymmetryOp
from treesize.circuit import verify_all_outcomes
from treesize.formula import evaluate_formula, from_tree
from treesize.matrices import (
    DETERMINANT,
    PERMANENT,
    census,
    hadamard_bound,
    hadamard_matrix_exists,
)
from treesize.mps import cluster_mps, compile_to_tree, contract, leaf_bound, random_mps
from treesize.states import (
    ghz_tree,
    ghz_vector,
    immanant_state_laplace_tree,
    immanant_state_leibnitz_tree,
    immanant_state_vector,
    laplace_lambda,
    split_bound,
    split_decomposition_tree,
    w_tree,
)
from treesize.tree import (
    DenseState,
    apply_ilo,
    apply_local_dense,
    evaluate,
    leaf_count,
    proportional_distance,
    random_invertible,
    random_tree,
)

TOL = 1e-9
RESULTS: list[str] = []


def record(number, title, limit, body):
    """Run ``body`` (returns a list of failure strings) and log one line."""
    start = time.perf_counter()
    failures = body()
    elapsed = time.perf_counter() - start
    if elapsed >= limit:
        failures.append(f"runtime {elapsed:.2f} s exceeds {limit} s")
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] {number:>2}. {title} ({elapsed:.2f} s / {limit} s)"
    if failures:
        line += ": " + "; ".join(failures[:3])
    RESULTS.append(line)
    print(line)
    assert not failures, line


def _c1():
    bad = []
    for m in (1, 2, 3):
        for sign in (DETERMINANT, PERMANENT):
            oracle = immanant_state_vector(m, sign)
            for name, tree in (
                ("laplace", immanant_state_laplace_tree(m, sign)),
                ("leibnitz", immanant_state_leibnitz_tree(m, sign)),
            ):
                d = proportional_distance(evaluate(tree), oracle)
                if not d <= TOL:
                    bad.append(f"{sign.kind} m={m} {name} distance {d:.2e}")
    return bad


def _c2():
    bad = []
    counts = [leaf_count(immanant_state_laplace_tree(m)) for m in range(1, 5)]
    if counts != [1, 8, 39, 184]:
        bad.append(f"leaf counts {counts}")
    s = [1]
    for m in range(2, 5):
        s.append(m * (s[-1] + 2 * m - 1))
    if counts != s:
        bad.append(f"recursion gives {s}")
    lams = [counts[m - 1] / math.factorial(m) for m in range(1, 5)]
    if any(abs(a - laplace_lambda(m)) > 1e-12 for m, a in zip(range(1, 5), lams)):
        bad.append("S_m != m! * lambda_m")
    longer = [laplace_lambda(m) for m in range(1, 16)]
    if not all(a < b < 3 * math.e for a, b in zip(longer, longer[1:])):
        bad.append("lambda_m not increasing towards 3e")
    if abs(lams[3] - 3 * math.e) / (3 * math.e) >= 0.06:
        bad.append(f"lambda_4 = {lams[3]:.4f} not within 6% of 3e")
    return bad


def _c3():
    bad = []
    rng = np.random.default_rng(3)
    for n in range(2, 7):
        for _ in range(20):
            state = DenseState(n, rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
            tree = split_decomposition_tree(state)
            d = proportional_distance(evaluate(tree), state)
            size = leaf_count(tree)
            if not d <= TOL:
                bad.append(f"n={n} distance {d:.2e}")
            if size != split_bound(n) or split_bound(n) != 3 * 2 ** (n - 1) - 2:
                bad.append(f"n={n} generic size {size} != {3 * 2 ** (n - 1) - 2}")
    return bad


def _c4():
    bad = []
    rng = np.random.default_rng(4)
    for t in range(50):
        n = 1 + t % 6
        tree = random_tree(n, rng)
        f = from_tree(tree)
        amps = evaluate(tree).amplitudes
        for k in range(2**n):
            value = evaluate_formula(f, format(k, f"0{n}b"))
            if abs(value - amps[k]) > TOL * max(1.0, abs(amps[k])):
                bad.append(f"tree {t} x={k:0{n}b}: {value} vs {amps[k]}")
                break
    return bad


def _c5():
    bad = []
    seed = 0
    for d in (1, 2, 3):
        for n in (3, 4, 5, 8, 16):
            seed += 1
            model = random_mps(n, d, seed)
            tree = compile_to_tree(model)
            dist = proportional_distance(evaluate(tree), contract(model))
            if not dist <= TOL:
                bad.append(f"D={d} n={n} distance {dist:.2e}")
            if leaf_count(tree) > leaf_bound(n, d):
                bad.append(f"D={d} n={n} {leaf_count(tree)} leaves > {leaf_bound(n, d)}")
    counts = [leaf_count(compile_to_tree(cluster_mps(n))) for n in (4, 8, 16)]
    if counts != [16, 64, 256]:
        bad.append(f"cluster counts {counts}")
    return bad


def _c6():
    bad = []
    two = verify_all_outcomes(2)
    if (two.passed, len(two.outcomes)) != (2, 2):
        bad.append(f"m=2 {two.passed}/{len(two.outcomes)}")
    per, det = immanant_state_vector(2, PERMANENT), immanant_state_vector(2)
    from treesize.circuit import measure_ancillas, prepare_superposition

    joint = prepare_superposition(2)
    if proportional_distance(measure_ancillas(joint, 2, "0")[0], per) > TOL:
        bad.append("m=2 outcome + is not the permanent state")
    if proportional_distance(measure_ancillas(joint, 2, "1")[0], det) > TOL:
        bad.append("m=2 outcome - is not the determinant state")
    three = verify_all_outcomes(3)
    if (three.passed, len(three.outcomes)) != (8, 8):
        bad.append(f"m=3 {three.passed}/{len(three.outcomes)}")
    return bad


def _c7():
    bad = []
    maxima = []
    for m in range(1, 5):
        res = census(m)
        maxima.append(res.max_abs_det)
        if res.total != 2 ** (m * m):
            bad.append(f"m={m} not exhaustive")
        if m >= 2 and not res.fraction > 0.3:
            bad.append(f"m={m} fraction {res.fraction}")
        bound = hadamard_bound(m)
        if res.max_abs_det > bound + 1e-9:
            bad.append(f"m={m} max {res.max_abs_det} exceeds bound {bound}")
        tight = abs(res.max_abs_det - bound) < 1e-9
        if tight != hadamard_matrix_exists(m + 1):
            bad.append(f"m={m} tightness {tight} disagrees with Hadamard existence")
    if maxima != [1, 1, 2, 3]:
        bad.append(f"max|det| {maxima}")
    if not abs(census(3).max_abs_det - hadamard_bound(3)) < 1e-9:
        bad.append("bound not tight at m=3")
    return bad


def _c8():
    bad = []
    ops = [GridSymmetryOp(kind, i, j) for i, j in ((1, 2), (1, 3), (2, 3))
           for kind in ("row_swap", "col_swap")]
    assert len(ops) == math.comb(3, 2) * 2
    for name, sign, swap_value in (("det3", DETERMINANT, -1), ("per3", PERMANENT, 1)):
        state = immanant_state_vector(3, sign)
        for op, expected in [(op, swap_value) for op in ops] + [(GridSymmetryOp("transpose"), 1)]:
            lam = symmetry_eigencheck(state, op, tol=TOL)
            if lam is None or abs(lam - expected) > TOL:
                bad.append(f"{name} {op}: {lam}")
    return bad


def _bell_tree():
    from conftest import make_bell_tree

    return make_bell_tree()


def _c9():
    bad = []
    rng = np.random.default_rng(9)
    cases = [("bell", _bell_tree(), 4), ("ghz3", ghz_tree(3), 6), ("w3", w_tree(3), 8)]
    for name, tree, budget in cases:
        state = evaluate(tree)
        for trial in range(10):
            ops = [random_invertible(rng) for _ in range(tree.n)]
            moved = apply_ilo(tree, ops)
            if leaf_count(moved) != leaf_count(tree):
                bad.append(f"{name} #{trial} leaf count changed")
            image = apply_local_dense(state, ops)
            err = np.linalg.norm(evaluate(moved).amplitudes - image.amplitudes)
            if err > TOL * np.linalg.norm(image.amplitudes):
                bad.append(f"{name} #{trial} evaluation error {err:.2e}")
            a = minimize_tree_size(state, budget, seed=trial)
            b = minimize_tree_size(image, budget, seed=trial)
            if a.size is None or a.size != b.size:
                bad.append(f"{name} #{trial} sizes {a.size} vs {b.size}")
    return bad


def _c10():
    bad = []
    product = minimize_tree_size(DenseState(2, np.ones(4)), 4)
    if product.size != 2:
        bad.append(f"product -> {product.size}")
    bell = DenseState(2, [1, 0, 0, 1])
    found = minimize_tree_size(bell, 4)
    if found.size != 4:
        bad.append(f"bell -> {found.size}")
    low = minimize_tree_size(bell, 3, reduced=False)
    if low.found or not low.attempts or any(a.status != "rank-rejected" for a in low.attempts):
        bad.append("bell: some <= 3-leaf skeleton was not rejected")
    if sorted({a.size for a in low.attempts}) != [2, 3]:
        bad.append(f"bell: rejected sizes {sorted({a.size for a in low.attempts})}")
    ghz = minimize_tree_size(ghz_vector(3), 6)
    if ghz.size is None or ghz.size > 6:
        bad.append(f"ghz3 -> {ghz.size}")
    return bad


CRITERIA = [
    (1, "determinant/permanent construction equivalence", 5, _c1),
    (2, "Laplace size recursion and 3e limit", 1, _c2),
    (3, "generic split bound", 10, _c3),
    (4, "formula correctness", 30, _c4),
    (5, "MPS compilation and leaf bound", 60, _c5),
    (6, "circuit protocol outcomes", 30, _c6),
    (7, "(0,1)-matrix census and Hadamard bound", 120, _c7),
    (8, "grid symmetry eigenvalues", 5, _c8),
    (9, "ILO invariance of tree size", 120, _c9),
    (10, "minimizer ground truths", 120, _c10),
]


@pytest.mark.parametrize("number, title, limit, body", CRITERIA, ids=[f"c{c[0]}" for c in CRITERIA])
def test_criterion(number, title, limit, body):
    record(number, title, limit, body)


if __name__ == "__main__":
    import sys

    sys.path.insert(0, __file__.rsplit("/", 1)[0])
    failed = 0
    for number, title, limit, body in CRITERIA:
        try:
            record(number, title, limit, body)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
