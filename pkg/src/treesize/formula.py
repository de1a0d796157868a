"""Multilinear formulas computing the coefficient function of a state.

A formula is a binary tree whose leaves are variables ``x_i`` or complex
constants and whose internal nodes are ``+`` or ``*``. ``from_tree`` turns a
state tree into a formula ``f`` with ``f(x) = <x|state>`` for every bit
string ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Union

from .tree import Leaf, Plus, StateTree, Tensor, absorb_weights, require_valid


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Add:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Mul:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Const, Add, Mul]


def _add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def literal(qubit: int, amp0: complex, amp1: complex) -> Formula:
    """Formula for ``amp0 * (1 - x) + amp1 * x`` with constants folded."""
    slope = amp1 - amp0
    if slope == 0:
        return Const(amp0)
    term = Var(qubit) if slope == 1 else Mul(Const(slope), Var(qubit))
    if amp0 == 0:
        return term
    return Add(Const(amp0), term)


def _convert(node) -> Formula:
    if isinstance(node, Leaf):
        return literal(node.qubit, complex(node.amp0), complex(node.amp1))
    if isinstance(node, Tensor):
        return reduce(_mul, (_convert(c) for c in node.children))
    return reduce(_add, (_convert(c) for _, c in node.children))


def from_tree(tree: StateTree) -> Formula:
    """Replace |0>_i by 1 - x_i, |1>_i by x_i, tensor gates by binary products.

    Plus weights are pushed into leaves first (see ``absorb_weights``), so
    each state-tree leaf turns into at most three formula leaves.
    """
    require_valid(tree)
    return _convert(absorb_weights(tree.root))


def _bits(x) -> list[int]:
    if isinstance(x, str):
        if set(x) - {"0", "1"}:
            raise ValueError(f"bit string may only contain 0/1, got {x!r}")
        return [int(c) for c in x]
    return [int(b) for b in x]


def evaluate_formula(f: Formula, x: Union[str, Sequence[int]]) -> complex:
    bits = _bits(x)

    def ev(node):
        if isinstance(node, Const):
            return complex(node.value)
        if isinstance(node, Var):
            if not 1 <= node.index <= len(bits):
                raise IndexError(
                    f"variable x_{node.index} out of range for {len(bits)}-bit input"
                )
            return complex(bits[node.index - 1])
        if isinstance(node, Add):
            return ev(node.left) + ev(node.right)
        return ev(node.left) * ev(node.right)

    return ev(f)


def formula_size(f: Formula, count_constants: bool = True) -> int:
    """Number of leaf vertices.

    With ``count_constants=False`` only variable occurrences are counted,
    which is the convention under which ``[(1-x1)(1-x2) - x1 x2]/sqrt(2)``
    has size 4.
    """
    if isinstance(f, Var):
        return 1
    if isinstance(f, Const):
        return 1 if count_constants else 0
    return formula_size(f.left, count_constants) + formula_size(f.right, count_constants)


def variables(f: Formula) -> frozenset:
    if isinstance(f, Var):
        return frozenset([f.index])
    if isinstance(f, Const):
        return frozenset()
    return variables(f.left) | variables(f.right)


def is_multilinear(f: Formula) -> bool:
    """True when no product multiplies two subformulas sharing a variable."""

    def walk(node):
        if isinstance(node, Var):
            return frozenset([node.index]), True
        if isinstance(node, Const):
            return frozenset(), True
        lv, lok = walk(node.left)
        rv, rok = walk(node.right)
        ok = lok and rok
        if isinstance(node, Mul) and lv & rv:
            ok = False
        return lv | rv, ok

    return walk(f)[1]


def _fmt(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"({z.real:.6g}{z.imag:+.6g}j)"


def to_infix(f: Formula) -> str:
    if isinstance(f, Var):
        return f"x{f.index}"
    if isinstance(f, Const):
        return _fmt(f.value)
    if isinstance(f, Add):
        return f"({to_infix(f.left)} + {to_infix(f.right)})"
    return f"{to_infix(f.left)}*{to_infix(f.right)}"
