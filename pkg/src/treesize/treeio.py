"""Text document format and DOT export for state trees.

Document format (version 1), one token group per line, pre-order::

    treesize-tree 1
    n <qubits>
    plus <k>              followed by k pairs of lines:
      weight <re> <im>      the edge weight
      <child>               the child node
    tensor <k>            followed by k child nodes
    leaf <qubit> <re0> <im0> <re1> <im1>

Leading whitespace is ignored, so nested nodes may be indented. Blank lines
and everything after a ``#`` are skipped. Floats are written with ``repr``
and read back exactly.
"""

from __future__ import annotations

from .tree import Leaf, Plus, StateTree, Tensor, require_valid

HEADER = "treesize-tree 1"


class TreeParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _num(x: float) -> str:
    return repr(float(x))


def serialize(tree: StateTree) -> str:
    require_valid(tree)
    lines = [HEADER, f"n {tree.n}"]

    def emit(node, depth):
        pad = "  " * depth
        if isinstance(node, Leaf):
            a0, a1 = complex(node.amp0), complex(node.amp1)
            lines.append(
                f"{pad}leaf {node.qubit} {_num(a0.real)} {_num(a0.imag)} "
                f"{_num(a1.real)} {_num(a1.imag)}"
            )
        elif isinstance(node, Tensor):
            lines.append(f"{pad}tensor {len(node.children)}")
            for child in node.children:
                emit(child, depth + 1)
        else:
            lines.append(f"{pad}plus {len(node.children)}")
            for weight, child in node.children:
                lines.append(f"{pad}  weight {_num(weight.real)} {_num(weight.imag)}")
                emit(child, depth + 1)

    emit(tree.root, 0)
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> StateTree:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split("#", 1)[0].split()
        if tokens:
            rows.append((lineno, tokens))
    if not rows:
        raise TreeParseError(1, "empty document")
    lineno, tokens = rows[0]
    if " ".join(tokens) != HEADER:
        raise TreeParseError(lineno, f"expected header {HEADER!r}")
    if len(rows) < 2:
        raise TreeParseError(lineno, "missing qubit count line")
    lineno, tokens = rows[1]
    if len(tokens) != 2 or tokens[0] != "n":
        raise TreeParseError(lineno, "expected 'n <qubits>'")
    n = _int(tokens[1], lineno)

    pos = 2

    def next_row():
        nonlocal pos
        if pos >= len(rows):
            last = rows[-1][0]
            raise TreeParseError(last + 1, "unexpected end of document")
        row = rows[pos]
        pos += 1
        return row

    def parse_node():
        lineno, tokens = next_row()
        kind = tokens[0]
        if kind == "leaf":
            if len(tokens) != 6:
                raise TreeParseError(lineno, "leaf needs qubit and four floats")
            qubit = _int(tokens[1], lineno)
            re0, im0, re1, im1 = (_float(t, lineno) for t in tokens[2:])
            return Leaf(qubit, complex(re0, im0), complex(re1, im1))
        if kind == "tensor":
            k = _count(tokens, lineno)
            return Tensor(tuple(parse_node() for _ in range(k)))
        if kind == "plus":
            k = _count(tokens, lineno)
            terms = []
            for _ in range(k):
                wline, wtokens = next_row()
                if wtokens[0] != "weight" or len(wtokens) != 3:
                    raise TreeParseError(wline, "expected 'weight <re> <im>'")
                weight = complex(_float(wtokens[1], wline), _float(wtokens[2], wline))
                terms.append((weight, parse_node()))
            return Plus(tuple(terms))
        raise TreeParseError(lineno, f"unknown node kind {kind!r}")

    root = parse_node()
    if pos != len(rows):
        raise TreeParseError(rows[pos][0], "trailing content after root node")
    return StateTree(root, n)


def _int(token, lineno):
    try:
        return int(token)
    except ValueError:
        raise TreeParseError(lineno, f"expected integer, got {token!r}") from None


def _float(token, lineno):
    try:
        return float(token)
    except ValueError:
        raise TreeParseError(lineno, f"expected number, got {token!r}") from None


def _count(tokens, lineno):
    if len(tokens) != 2:
        raise TreeParseError(lineno, f"{tokens[0]} needs a child count")
    k = _int(tokens[1], lineno)
    if k < 1:
        raise TreeParseError(lineno, f"child count must be positive, got {k}")
    return k


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.4g}"
    if z.real == 0:
        return f"{z.imag:.4g}i"
    return f"{z.real:.4g}{z.imag:+.4g}i"


def to_dot(tree: StateTree, name: str = "tree") -> str:
    """Graphviz digraph; plus weights are edge labels, leaves are boxes."""
    require_valid(tree)
    out = [f"digraph {name} {{", "  node [fontname=\"Helvetica\"];"]
    counter = 0

    def emit(node):
        nonlocal counter
        ident = f"n{counter}"
        counter += 1
        if isinstance(node, Leaf):
            label = f"q{node.qubit}: {_fmt_complex(node.amp0)}|0> + {_fmt_complex(node.amp1)}|1>"
            out.append(f'  {ident} [label="{label}", shape=box];')
        elif isinstance(node, Tensor):
            out.append(f'  {ident} [label="⊗", shape=circle];')
            for child in node.children:
                out.append(f"  {ident} -> {emit(child)};")
        else:
            out.append(f'  {ident} [label="+", shape=circle];')
            for weight, child in node.children:
                out.append(f'  {ident} -> {emit(child)} [label="{_fmt_complex(weight)}"];')
        return ident

    emit(tree.root)
    out.append("}")
    return "\n".join(out) + "\n"
