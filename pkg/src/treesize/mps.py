"""Open-boundary matrix product states and their compilation to trees.

Site ``i`` carries a pair of matrices ``A_0^(i), A_1^(i)`` of shape
``D_i x D_{i+1}``, stored as one array of shape ``(2, D_i, D_{i+1})``, with
``D_1 = D_{n+1} = 1``. The amplitude of ``|x_1 ... x_n>`` is the scalar
``A_{x_1}^(1) ... A_{x_n}^(n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .tree import DenseState, Leaf, StateTree, make_plus, make_tensor

DENSE_MAX_N = 20
PRUNE_TOL = 1e-12
MPS_HEADER = "treesize-mps 1"


class MpsError(ValueError):
    pass


@dataclass
class Mps:
    tensors: list

    def __post_init__(self):
        self.tensors = [np.asarray(t, dtype=complex) for t in self.tensors]
        problems = check_shapes(self.tensors)
        if problems:
            raise MpsError("; ".join(problems))

    @property
    def n(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> list[int]:
        """``D_1 .. D_{n+1}``."""
        return [t.shape[1] for t in self.tensors] + [self.tensors[-1].shape[2]]

    @property
    def max_bond(self) -> int:
        return max(self.bond_dims)


def check_shapes(tensors) -> list[str]:
    problems = []
    if not tensors:
        return ["an MPS needs at least one site"]
    for i, t in enumerate(tensors, start=1):
        if t.ndim != 3 or t.shape[0] != 2:
            problems.append(f"site {i}: expected shape (2, Dl, Dr), got {t.shape}")
    if problems:
        return problems
    if tensors[0].shape[1] != 1:
        problems.append(f"site 1: left bond must be 1, got {tensors[0].shape[1]}")
    if tensors[-1].shape[2] != 1:
        problems.append(f"site {len(tensors)}: right bond must be 1, got {tensors[-1].shape[2]}")
    for i in range(len(tensors) - 1):
        if tensors[i].shape[2] != tensors[i + 1].shape[1]:
            problems.append(
                f"bond {i + 1}-{i + 2}: {tensors[i].shape[2]} != {tensors[i + 1].shape[1]}"
            )
    return problems


def contract(mps: Mps) -> DenseState:
    """Sweep left to right, keeping a (2^k, D) block of partial amplitudes."""
    if mps.n > DENSE_MAX_N:
        raise MpsError(f"{mps.n} sites exceeds the dense budget of {DENSE_MAX_N}")
    block = np.ones((1, 1), dtype=complex)
    for t in mps.tensors:
        # new index = old index * 2 + bit, i.e. the new site is less significant
        block = np.einsum("ka,xab->kxb", block, t).reshape(-1, t.shape[2])
    return DenseState(mps.n, block[:, 0])


def amplitude(mps: Mps, bits: Sequence[int]) -> complex:
    """Single amplitude as an explicit matrix product."""
    vec = np.ones((1, 1), dtype=complex)
    for t, b in zip(mps.tensors, bits):
        vec = vec @ t[int(b)]
    return complex(vec[0, 0])


def split_point(length: int) -> int:
    """Sites kept on the left when a block of ``length`` sites is halved."""
    low = 1 << (length.bit_length() - 1)
    return length // 2 if low == length else low


def leaf_bound(n: int, d: int) -> int:
    return (2 * d) ** (int(math.floor(math.log2(n))) + 1)


def compile_to_tree(mps: Mps) -> StateTree:
    """Recursively insert ``I = sum_s e_s e_s^T`` at the split bond.

    Each block is compiled with a left boundary row vector and a right
    boundary column vector. Single sites become leaves; terms containing a
    vanishing leaf are dropped.
    """
    tensors = mps.tensors

    def build(lo: int, hi: int, left: np.ndarray, right: np.ndarray) -> Optional[object]:
        if hi - lo == 1:
            t = tensors[lo]
            a0 = complex(left @ t[0] @ right)
            a1 = complex(left @ t[1] @ right)
            if math.hypot(abs(a0), abs(a1)) < PRUNE_TOL:
                return None
            return Leaf(lo + 1, a0, a1)
        mid = lo + split_point(hi - lo)
        dim = tensors[mid].shape[1]
        terms = []
        for s in range(dim):
            unit = np.zeros(dim, dtype=complex)
            unit[s] = 1
            lhs = build(lo, mid, left, unit)
            if lhs is None:
                continue
            rhs = build(mid, hi, unit, right)
            if rhs is None:
                continue
            terms.append((1, make_tensor([lhs, rhs])))
        if not terms:
            return None
        return make_plus(terms)

    root = build(0, mps.n, np.ones(1, dtype=complex), np.ones(1, dtype=complex))
    if root is None:
        raise MpsError("MPS contracts to the zero vector")
    return StateTree(root, mps.n)


def unpruned_leaf_count(bond_dims: Sequence[int]) -> int:
    """Leaf count of ``compile_to_tree`` when no term is pruned."""

    def count(lo, hi):
        if hi - lo == 1:
            return 1
        mid = lo + split_point(hi - lo)
        return bond_dims[mid] * (count(lo, mid) + count(mid, hi))

    return count(0, len(bond_dims) - 1)


def cluster_mps(n: int) -> Mps:
    """Bond-2 MPS of the linear cluster state ``prod CZ_{i,i+1} |+>^n``.

    The bond index carries the previous site's bit ``a``. Site tensors are
    ``A_x[a, b] = (-1)^(a x) [b == x]``; the first site has no incoming bond
    and the last has no outgoing one. The amplitudes are
    ``(-1)^(sum x_i x_{i+1})`` without normalization.
    """
    if n < 2:
        raise ValueError("cluster state needs n >= 2")
    tensors = []
    for i in range(n):
        dl = 1 if i == 0 else 2
        dr = 1 if i == n - 1 else 2
        t = np.zeros((2, dl, dr), dtype=complex)
        for x in range(2):
            for a in range(dl):
                phase = (-1) ** (a * x)
                if dr == 1:
                    t[x, a, 0] = phase
                else:
                    t[x, a, x] = phase
        tensors.append(t)
    return Mps(tensors)


def random_mps(n: int, d: int, seed: int, bond_dims: Optional[Sequence[int]] = None) -> Mps:
    """Entries i.i.d. ``(N(0,1) + i N(0,1)) / sqrt(2)`` from ``default_rng(seed)``.

    Internal bonds all have dimension ``d`` unless ``bond_dims`` (length
    ``n - 1``) gives them explicitly.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    rng = np.random.default_rng(seed)
    inner = [d] * (n - 1) if bond_dims is None else list(bond_dims)
    if len(inner) != n - 1:
        raise ValueError(f"expected {n - 1} internal bond dimensions")
    dims = [1] + inner + [1]
    tensors = []
    for i in range(n):
        shape = (2, dims[i], dims[i + 1])
        tensors.append((rng.normal(size=shape) + 1j * rng.normal(size=shape)) / math.sqrt(2))
    return Mps(tensors)


# -- text format ---------------------------------------------------------------


def _c(z: complex) -> str:
    return f"{repr(float(z.real))},{repr(float(z.imag))}"


def dumps(mps: Mps) -> str:
    """Site-major text format.

    ::

        treesize-mps 1
        n <sites>
        site <i> <Dl> <Dr>
        A0 <Dl rows of Dr entries "re,im">
        A1 ...
    """
    lines = [MPS_HEADER, f"n {mps.n}"]
    for i, t in enumerate(mps.tensors, start=1):
        lines.append(f"site {i} {t.shape[1]} {t.shape[2]}")
        for x in range(2):
            lines.append(f"A{x}")
            for row in t[x]:
                lines.append(" ".join(_c(z) for z in row))
    return "\n".join(lines) + "\n"


def loads(text: str) -> Mps:
    rows = [
        (k, line.split())
        for k, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    pos = 0

    def take(expect=None):
        nonlocal pos
        if pos >= len(rows):
            raise MpsError("unexpected end of MPS document")
        lineno, tokens = rows[pos]
        pos += 1
        if expect is not None and (not tokens or tokens[0] != expect):
            raise MpsError(f"line {lineno}: expected {expect!r}")
        return lineno, tokens

    lineno, tokens = take()
    if " ".join(tokens) != MPS_HEADER:
        raise MpsError(f"line {lineno}: expected header {MPS_HEADER!r}")
    lineno, tokens = take("n")
    try:
        n = int(tokens[1])
        tensors = []
        for i in range(1, n + 1):
            lineno, tokens = take("site")
            if int(tokens[1]) != i:
                raise MpsError(f"line {lineno}: expected site {i}")
            dl, dr = int(tokens[2]), int(tokens[3])
            t = np.zeros((2, dl, dr), dtype=complex)
            for x in range(2):
                take(f"A{x}")
                for a in range(dl):
                    lineno, tokens = take()
                    if len(tokens) != dr:
                        raise MpsError(f"line {lineno}: expected {dr} entries")
                    for b, tok in enumerate(tokens):
                        re, im = tok.split(",")
                        t[x, a, b] = complex(float(re), float(im))
            tensors.append(t)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, MpsError):
            raise
        raise MpsError(f"line {lineno}: {exc}") from None
    if pos != len(rows):
        raise MpsError(f"line {rows[pos][0]}: trailing content")
    return Mps(tensors)
