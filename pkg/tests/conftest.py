import math

import numpy as np
import pytest

from treesize.tree import Leaf, Plus, StateTree, Tensor

R = 1 / math.sqrt(2)


def brute_amplitude(node, bits):
    """Amplitude <bits|node> computed node by node, one bit string at a time."""
    if isinstance(node, Leaf):
        return node.amp1 if bits[node.qubit - 1] else node.amp0
    if isinstance(node, Tensor):
        return math.prod(brute_amplitude(c, bits) for c in node.children)
    return sum(w * brute_amplitude(c, bits) for w, c in node.children)


def brute_vector(tree):
    n = tree.n
    out = []
    for k in range(2**n):
        bits = [(k >> (n - 1 - i)) & 1 for i in range(n)]
        out.append(brute_amplitude(tree.root, bits))
    return np.array(out, dtype=complex)


def kron_all(vectors):
    out = np.array([1.0 + 0j])
    for v in vectors:
        out = np.kron(out, v)
    return out


def make_bell_tree(sign=1):
    return StateTree(
        Plus((
            (R, Tensor((Leaf(1, 1, 0), Leaf(2, 1, 0)))),
            (sign * R, Tensor((Leaf(1, 0, 1), Leaf(2, 0, 1)))),
        )),
        2,
    )


@pytest.fixture
def bell_tree():
    return make_bell_tree()


@pytest.fixture
def rng():
    return np.random.default_rng(20241015)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
