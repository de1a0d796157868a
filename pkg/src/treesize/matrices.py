"""Exhaustive (0,1)-matrix oracles.

An ``m x m`` (0,1) matrix is identified with the integer whose ``m*m`` bits,
read row-major with entry (1,1) most significant, are its entries. This is
the same ordering as the qubit grid, so matrix index ``k`` is the amplitude
index of basis state ``|k>`` of an ``m*m``-qubit register.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

LEIBNITZ_MAX_M = 8
CENSUS_MAX_M = 4
CENSUS_LONG_MAX_M = 5
CHUNK_BITS = 20


class BudgetExceeded(ValueError):
    pass


# -- permutations and sign functions -----------------------------------------


def permutations(m: int) -> list[tuple[int, ...]]:
    """Permutations of ``0..m-1`` in lexicographic order."""
    return list(itertools.permutations(range(m)))


def permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = perm[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class SignFunction:
    """Coefficient map ``c(sigma)`` over permutations.

    ``kind`` is ``"determinant"`` (``c = sgn``), ``"permanent"`` (``c = 1``)
    or ``"custom"``. Custom coefficients are keyed by 0-based permutation
    tuples and must all be nonzero.
    """

    kind: str
    coefficients: Mapping = None

    def __post_init__(self):
        if self.kind not in ("determinant", "permanent", "custom"):
            raise ValueError(f"unknown sign function kind {self.kind!r}")
        if self.kind == "custom":
            if not self.coefficients:
                raise ValueError("custom sign function needs coefficients")
            coeffs = {tuple(p): complex(c) for p, c in dict(self.coefficients).items()}
            if any(c == 0 for c in coeffs.values()):
                raise ValueError("immanant coefficients must be nonzero")
            object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def custom(cls, coefficients) -> "SignFunction":
        """From a mapping, or a sequence in lexicographic permutation order."""
        if isinstance(coefficients, Mapping):
            return cls("custom", coefficients)
        coefficients = list(coefficients)
        m = 1
        while math.factorial(m) < len(coefficients):
            m += 1
        if math.factorial(m) != len(coefficients):
            raise ValueError(f"{len(coefficients)} coefficients is not m! for any m")
        return cls("custom", dict(zip(permutations(m), coefficients)))

    def __call__(self, perm: Sequence[int]) -> complex:
        if self.kind == "determinant":
            return permutation_sign(perm)
        if self.kind == "permanent":
            return 1
        try:
            return self.coefficients[tuple(perm)]
        except KeyError:
            raise ValueError(f"no coefficient for permutation {tuple(perm)}") from None

    def check_size(self, m: int) -> None:
        if self.kind == "custom":
            expected = set(permutations(m))
            if set(self.coefficients) != expected:
                raise ValueError(f"custom coefficients do not cover the {m}! permutations")


DETERMINANT = SignFunction("determinant")
PERMANENT = SignFunction("permanent")


# -- index <-> matrix ---------------------------------------------------------


def index_to_matrix(index: int, m: int) -> np.ndarray:
    n = m * m
    if not 0 <= index < 2**n:
        raise ValueError(f"index {index} out of range for {m}x{m} matrices")
    bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
    return np.array(bits, dtype=np.int64).reshape(m, m)


def matrix_to_index(matrix) -> int:
    flat = np.asarray(matrix).reshape(-1)
    if set(np.unique(flat).tolist()) - {0, 1}:
        raise ValueError("matrix entries must be 0 or 1")
    index = 0
    for bit in flat:
        index = (index << 1) | int(bit)
    return index


def batch_matrices(start: int, stop: int, m: int) -> np.ndarray:
    """Matrices with indices ``start..stop-1`` as an int64 array (k, m, m)."""
    n = m * m
    idx = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts) & 1).reshape(-1, m, m)


# -- scalar oracles -----------------------------------------------------------


def det_bareiss(matrix) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [[int(v) for v in row] for row in np.asarray(matrix)]
    m = len(a)
    if m == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(m - 1):
        if a[k][k] == 0:
            for r in range(k + 1, m):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[m - 1][m - 1]


def immanant01(matrix, sign: SignFunction = DETERMINANT):
    """``sum_sigma c(sigma) prod_i M[i, sigma(i)]`` by direct expansion.

    Determinants of matrices larger than the expansion budget fall back to
    exact elimination.
    """
    mat = np.asarray(matrix)
    m = mat.shape[0]
    if mat.shape != (m, m):
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if m > LEIBNITZ_MAX_M:
        if sign.kind == "determinant":
            return det_bareiss(mat)
        raise BudgetExceeded(f"m = {m} exceeds the m! expansion budget of {LEIBNITZ_MAX_M}")
    sign.check_size(m)
    total = 0
    for perm in itertools.permutations(range(m)):
        prod = 1
        for i, j in enumerate(perm):
            prod *= int(mat[i, j])
            if prod == 0:
                break
        if prod:
            total += sign(perm) * prod
    return total


def permanent_ryser(matrix) -> int:
    """Permanent by Ryser's inclusion-exclusion formula (exact integers)."""
    mat = np.asarray(matrix, dtype=np.int64)
    m = mat.shape[0]
    total = 0
    for mask in range(1, 2**m):
        cols = [j for j in range(m) if mask >> j & 1]
        prod = 1
        for i in range(m):
            prod *= int(mat[i, cols].sum())
        total += (-1) ** len(cols) * prod
    return (-1) ** m * total


# -- batched oracles ----------------------------------------------------------


def batch_minor_expansion(mats: np.ndarray, signed: bool = True) -> np.ndarray:
    """Determinants (or permanents if ``signed`` is False) of a batch.

    Expands by minors from the bottom row up, keeping one integer array per
    column subset, so the cost is ``O(m 2^m)`` vector operations.
    """
    k, m, _ = mats.shape
    minors = {1 << c: mats[:, m - 1, c].astype(np.int64) for c in range(m)}
    for row in range(m - 2, -1, -1):
        size = m - row
        nxt = {}
        for cols in itertools.combinations(range(m), size):
            mask = sum(1 << c for c in cols)
            acc = np.zeros(k, dtype=np.int64)
            for pos, c in enumerate(cols):
                term = mats[:, row, c] * minors[mask & ~(1 << c)]
                if signed and pos % 2:
                    acc -= term
                else:
                    acc += term
            nxt[mask] = acc
        minors = nxt
    return minors[(1 << m) - 1]


def batch_immanants(mats: np.ndarray, sign: SignFunction) -> np.ndarray:
    """Leibnitz sum over permutations, vectorized across the batch."""
    k, m, _ = mats.shape
    sign.check_size(m)
    exact = sign.kind != "custom"
    out = np.zeros(k, dtype=np.int64 if exact else complex)
    rows = np.arange(m)
    for perm in permutations(m):
        prod = np.prod(mats[:, rows, list(perm)], axis=1)
        out += sign(perm) * prod
    return out


# -- census -------------------------------------------------------------------


def hadamard_bound(m: int) -> float:
    """Largest possible determinant of an m x m (0,1) matrix."""
    return 2.0**-m * math.sqrt((m + 1) ** (m + 1))


def hadamard_matrix_exists(order: int) -> bool:
    """Existence of a Hadamard matrix of the given order, for orders <= 4."""
    if order in (1, 2, 4):
        return True
    if order % 4 != 0:
        return False
    raise ValueError(f"order {order} beyond the small-order table")


@dataclass
class CensusResult:
    m: int
    total: int
    nonsingular: int
    max_abs_det: int
    witness: np.ndarray

    @property
    def fraction(self) -> float:
        return self.nonsingular / self.total

    @property
    def bound(self) -> float:
        return hadamard_bound(self.m)


def _check_budget(m: int, long: bool) -> None:
    if m < 1:
        raise ValueError("m must be positive")
    limit = CENSUS_LONG_MAX_M if long else CENSUS_MAX_M
    if m > limit:
        hint = "" if long else " (pass long=True / --long for m = 5)"
        raise BudgetExceeded(f"m = {m} exceeds the census budget of {limit}{hint}")


def census(m: int, long: bool = False, workers: int = 1) -> CensusResult:
    """Exhaustive pass over all 2^(m^2) (0,1) matrices.

    Chunks are independent and combined by exact integer reduction, so the
    result does not depend on ``workers``.
    """
    _check_budget(m, long)
    total = 2 ** (m * m)
    chunk = 2 ** min(CHUNK_BITS, m * m)
    starts = list(range(0, total, chunk))

    def run(start):
        dets = batch_minor_expansion(batch_matrices(start, start + chunk, m))
        absd = np.abs(dets)
        pos = int(np.argmax(absd))
        return int(np.count_nonzero(dets)), int(absd[pos]), start + pos

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]

    nonsingular = sum(p[0] for p in parts)
    best = max(p[1] for p in parts)
    witness_index = min(p[2] for p in parts if p[1] == best)
    return CensusResult(m, total, nonsingular, best, index_to_matrix(witness_index, m))


def nonsingular_fraction(m: int, long: bool = False, workers: int = 1) -> tuple[int, float]:
    result = census(m, long=long, workers=workers)
    return result.nonsingular, result.fraction


def max_abs_determinant(m: int, long: bool = False, workers: int = 1) -> tuple[int, np.ndarray]:
    result = census(m, long=long, workers=workers)
    return result.max_abs_det, result.witness
