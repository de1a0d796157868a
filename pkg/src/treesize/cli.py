"""Command-line entry point: ``treesize <subcommand> ...``.

Every report starts with a ``# treesize <command> seed=<seed>`` header line.
Floats are printed with 15 significant digits. Exit codes: 0 success,
2 usage error, 3 malformed input, 4 budget exceeded, 5 invalid tree or MPS.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import circuit, formula, matrices, mps, states, treeio
from .analysis import minimize as minimize_mod
from .analysis import persistency as persistency_mod
from .analysis import symmetry as symmetry_mod
from .tree import (DenseState, InvalidTreeError, evaluate, leaf_count, proportional_distance,
                   random_invertible)

log = logging.getLogger("treesize")

EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_INVALID = 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, message, code=EXIT_USAGE):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return f"{x:.15g}"


def fmt_complex(z: complex) -> str:
    return f"{fmt(z.real)} {fmt(z.imag)}"


# -- state resolution --------------------------------------------------------------

STATE_NAMES = ("product", "bell", "ghz", "w", "cluster", "det", "per", "random")


def resolve_state(name: str, n: int, m: int, seed: int) -> DenseState:
    if name == "product":
        return DenseState(n, np.ones(2**n))
    if name == "bell":
        return DenseState(2, [1, 0, 0, 1])
    if name == "ghz":
        return states.ghz_vector(n)
    if name == "w":
        return states.w_vector(n)
    if name == "cluster":
        return states.cluster_vector(n)
    if name in ("det", "per"):
        return states.immanant_state_vector(m, states.sign_function(name))
    if name == "random":
        rng = np.random.default_rng(seed)
        return DenseState(n, rng.normal(size=2**n) + 1j * rng.normal(size=2**n))
    raise CliError(f"unknown state {name!r}")


def load_tree(path: str):
    try:
        with open(path) as fh:
            return treeio.deserialize(fh.read())
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from None
    except treeio.TreeParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_INPUT) from None


def state_from_args(args) -> DenseState:
    if getattr(args, "tree", None):
        return evaluate(load_tree(args.tree))
    return resolve_state(args.state, args.n, args.m, args.seed)


def emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------------


def cmd_build(args, out):
    kind = args.state
    if kind == "ghz":
        tree = states.ghz_tree(args.n)
    elif kind == "w":
        tree = states.w_tree(args.n)
    elif kind == "cluster":
        tree = states.named_state("cluster_chain", args.n)[0]
    elif kind in ("det", "per"):
        sign = states.sign_function(kind)
        if args.expansion == "laplace":
            tree = states.immanant_state_laplace_tree(args.m, sign)
        else:
            tree = states.immanant_state_leibnitz_tree(args.m, sign)
    elif kind in ("split", "basis"):
        source = resolve_state(args.source, args.n, args.m, args.seed)
        build = states.split_decomposition_tree if kind == "split" else states.basis_expansion_tree
        tree = build(source)
    else:
        raise CliError(f"unknown state {kind!r}")
    text = treeio.to_dot(tree) if args.format == "dot" else treeio.serialize(tree)
    if args.out:
        emit(args, text)
        out.write(f"qubits {tree.n}\nleaves {leaf_count(tree)}\nwritten {args.out}\n")
    else:
        out.write(text)


def cmd_eval(args, out):
    tree = load_tree(args.tree)
    state = evaluate(tree)
    out.write(f"qubits {tree.n}\nleaves {leaf_count(tree)}\n")
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["basis", "re", "im"])
        for bits, amp in state.nonzero_terms():
            writer.writerow([bits, fmt(amp.real), fmt(amp.imag)])
    else:
        for bits, amp in state.nonzero_terms():
            out.write(f"|{bits}> {fmt_complex(amp)}\n")


def cmd_formula(args, out):
    tree = load_tree(args.tree)
    f = formula.from_tree(tree)
    out.write(f"tree_leaves {leaf_count(tree)}\n")
    out.write(f"formula_size {formula.formula_size(f)}\n")
    out.write(f"variable_occurrences {formula.formula_size(f, count_constants=False)}\n")
    out.write(f"multilinear {formula.is_multilinear(f)}\n")
    out.write(formula.to_infix(f) + "\n")


def cmd_compile_mps(args, out):
    if args.cluster:
        model = mps.cluster_mps(args.n)
    elif args.input:
        try:
            with open(args.input) as fh:
                model = mps.loads(fh.read())
        except OSError as exc:
            raise CliError(f"cannot read {args.input}: {exc.strerror}", EXIT_INPUT) from None
    else:
        model = mps.random_mps(args.n, args.D, args.seed)
    tree = mps.compile_to_tree(model)
    bound = mps.leaf_bound(model.n, model.max_bond)
    out.write(f"sites {model.n}\nmax_bond {model.max_bond}\n")
    out.write(f"leaves {leaf_count(tree)}\nbound {bound}\n")
    if model.n <= 16:
        dist = proportional_distance(evaluate(tree), mps.contract(model))
        out.write(f"distance {fmt(dist)}\n")
    if args.out:
        emit(args, treeio.serialize(tree))
        out.write(f"written {args.out}\n")


def cmd_survey(args, out):
    limit = matrices.CENSUS_LONG_MAX_M if args.long else matrices.CENSUS_MAX_M
    if args.m > limit:
        hint = "" if args.long else " (pass --long for m = 5)"
        raise matrices.BudgetExceeded(f"m = {args.m} exceeds the census budget of {limit}{hint}")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["m", "matrices", "nonsingular", "fraction", "max_abs_det",
                     "hadamard_bound", "tight"])
    for m in range(1, args.m + 1):
        res = matrices.census(m, long=args.long, workers=args.threads)
        tight = abs(res.max_abs_det - res.bound) < 1e-9
        writer.writerow([m, res.total, res.nonsingular, fmt(res.fraction), res.max_abs_det,
                         fmt(res.bound), tight])


def cmd_circuit(args, out):
    inst = circuit.ProtocolInstance(args.m)
    out.write(f"m {args.m}\nancillas {inst.s}\n")
    if args.outcome is None:
        report = circuit.verify_all_outcomes(args.m)
        for row in report.outcomes:
            out.write(f"outcome '{row.outcome}' p={fmt(row.probability)} signs={row.signs} "
                      f"residual={row.residual} ok={row.ok}\n")
        out.write(f"verified {report.passed}/{len(report.outcomes)}\n")
        if not report.ok:
            raise CliError("some outcomes did not match the prediction", EXIT_INVALID)
        return
    joint = circuit.prepare_superposition(args.m)
    try:
        state, prob = circuit.measure_ancillas(joint, args.m, args.outcome)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    signs = circuit.outcome_signs(inst.s, args.outcome)
    out.write(f"outcome '{args.outcome}' p={fmt(prob)}\n")
    out.write(f"signs {[int(c) for c in signs[:len(inst.perms)]]} "
              f"residual {int(signs[len(inst.perms):].sum())}\n")
    for bits, amp in state.nonzero_terms():
        out.write(f"|{bits}> {fmt_complex(amp)}\n")


def cmd_symmetry(args, out):
    state = state_from_args(args)
    m = symmetry_mod.grid_side(state.n)
    for op in symmetry_mod.all_grid_ops(m):
        lam = symmetry_mod.symmetry_eigencheck(state, op)
        value = "not-an-eigenvector" if lam is None else fmt_complex(lam)
        out.write(f"{op} {value}\n")


def cmd_schmidt(args, out):
    state = state_from_args(args)
    subset = [int(q) for q in args.subset.split(",")]
    try:
        rank = symmetry_mod.schmidt_rank(state, subset)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    out.write(f"subset {subset}\nschmidt_rank {rank}\n")


def cmd_minimize(args, out):
    state = state_from_args(args)
    result = minimize_mod.minimize_tree_size(state, args.budget, args.restarts, args.seed)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["leaves", "skeleton", "status", "distance", "detail"])
    for a in result.attempts:
        writer.writerow([a.size, a.skeleton, a.status, fmt(a.distance), a.detail])
    out.write(f"# {result.message}\n")
    if result.found and args.out:
        emit(args, treeio.serialize(result.tree))


def cmd_persistency(args, out):
    state = state_from_args(args)
    res = persistency_mod.persistency_upper(state, args.trials, args.seed)
    out.write(f"qubits {res.n}\npersistency_upper {res.k}\n")
    for q, theta, phi in res.witness:
        out.write(f"measure q{q} theta={fmt(theta)} phi={fmt(phi)}\n")
    for k, qubits, defect in res.log:
        out.write(f"# no hit k={k} qubits={list(qubits)} best_defect={fmt(defect)}\n")


def cmd_slocc(args, out):
    state = state_from_args(args)
    rng = np.random.default_rng(args.seed)
    ops = [random_invertible(rng) for _ in range(state.n)]
    rep = minimize_mod.slocc_tree_size_consistency(state, ops, args.seed, args.budget,
                                                   args.restarts)
    out.write(f"size_state {rep.size_state}\nsize_image {rep.size_image}\n")
    out.write(f"transported_size {rep.transported_size}\n")
    out.write(f"transported_distance {fmt(rep.transported_distance)}\nconsistent {rep.ok}\n")


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--threads", type=int, default=1, help="worker cap")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="treesize", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="construct a state tree")
    p.add_argument("--state", required=True,
                   choices=["ghz", "w", "cluster", "det", "per", "split", "basis"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--expansion", choices=["laplace", "leibnitz"], default="laplace")
    p.add_argument("--source", choices=STATE_NAMES, default="random",
                   help="dense state fed to split/basis")
    p.add_argument("--format", choices=["doc", "dot"], default="doc")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("eval", parents=[common], help="tree document -> amplitudes")
    p.add_argument("tree")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("formula", parents=[common], help="tree document -> multilinear formula")
    p.add_argument("tree")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("compile-mps", parents=[common], help="MPS -> tree with leaf bound")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--cluster", action="store_true")
    src.add_argument("--input")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--D", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compile_mps)

    p = sub.add_parser("survey-matrices", parents=[common], help="(0,1)-matrix census")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--long", action="store_true", help="allow m = 5")
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("circuit", parents=[common], help="ancilla preparation protocol")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--outcome", help="ancilla outcome bits, 0 for +, 1 for -")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("analyze", help="symmetry / entanglement / tree-size checks")
    asub = p.add_subparsers(dest="analysis", required=True)
    state_opts = argparse.ArgumentParser(add_help=False, parents=[common])
    state_opts.add_argument("--state", choices=STATE_NAMES, default="bell")
    state_opts.add_argument("--tree", help="tree document instead of a named state")
    state_opts.add_argument("--n", type=int, default=3)
    state_opts.add_argument("--m", type=int, default=2)

    q = asub.add_parser("symmetry", parents=[state_opts])
    q.set_defaults(func=cmd_symmetry)
    q = asub.add_parser("schmidt", parents=[state_opts])
    q.add_argument("--subset", required=True, help="comma-separated qubits")
    q.set_defaults(func=cmd_schmidt)
    q = asub.add_parser("minimize", parents=[state_opts])
    q.add_argument("--budget", type=int, default=8)
    q.add_argument("--restarts", type=int, default=4)
    q.add_argument("--out")
    q.set_defaults(func=cmd_minimize)
    q = asub.add_parser("persistency", parents=[state_opts])
    q.add_argument("--trials", type=int, default=20)
    q.set_defaults(func=cmd_persistency)
    q = asub.add_parser("slocc", parents=[state_opts])
    q.add_argument("--budget", type=int, default=8)
    q.add_argument("--restarts", type=int, default=4)
    q.set_defaults(func=cmd_slocc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    name = args.command if args.command != "analyze" else f"analyze {args.analysis}"
    buf = io.StringIO()
    buf.write(f"# treesize {name} seed={args.seed}\n")
    try:
        args.func(args, buf)
    except CliError as exc:
        print(f"treesize: error: {exc}", file=sys.stderr)
        return exc.code
    except matrices.BudgetExceeded as exc:
        print(f"treesize: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidTreeError, mps.MpsError) as exc:
        print(f"treesize: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"treesize: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(buf.getvalue())
    return 0


if __name__ == "__main__":
    sys.exit(main())
