"""Command-line front-end.

Verbs map onto the library operations: ``eval`` (A sigma B), ``solve``
(A sigma X = B), ``solve-right`` (X sigma A = B), ``classify``,
``verify`` (axiom harness), ``fn`` (representing-function values) and
``measure-fn`` (measure-representation values).

Connections are described by a spec string ``kind[:param=value,...]``;
a bare value is the kind's principal parameter, e.g.::

    geometric:0.5
    quasi_arithmetic:p=0.5,alpha=0.25
    logarithmic

Measures use whitespace- or semicolon-separated fields::

    atoms=[(0,0.5),(1,0.5)]
    density=arcsine nodes=200
    atoms=[(0.3,1)]; density=arcsine

Exit codes: 0 success, 1 input or computation error, 2 when a solve
reports RangeViolation or NotCancellable.
"""

from __future__ import annotations

import argparse
import ast
import sys

import numpy as np

from . import __version__
from . import functions as fns
from . import measures as msr
from .classify import classify_connection
from .connection import Connection, evaluate, verify_axioms
from .errors import OpConnectError
from .matrixio import format_matrix, read_matrix, write_matrix
from .solver import SolveStatus, solve_left, solve_right
from .symcore import DEFAULT_TOLERANCES, PsdMatrix, Tolerances

_PRINCIPAL_PARAM = {
    "constant": "k",
    "scalar_identity": "k",
    "arithmetic": "alpha",
    "weighted_arithmetic": "alpha",
    "geometric": "alpha",
    "weighted_geometric": "alpha",
    "harmonic": "alpha",
    "weighted_harmonic": "alpha",
}

_FACTORIES = {
    "constant": lambda ps: fns.constant(ps["k"]),
    "scalar_identity": lambda ps: fns.scalar_identity(ps["k"]),
    "arithmetic": lambda ps: fns.arithmetic(ps.get("alpha", 0.5)),
    "weighted_arithmetic": lambda ps: fns.arithmetic(ps.get("alpha", 0.5)),
    "geometric": lambda ps: fns.geometric(ps.get("alpha", 0.5)),
    "weighted_geometric": lambda ps: fns.geometric(ps.get("alpha", 0.5)),
    "harmonic": lambda ps: fns.harmonic(ps.get("alpha", 0.5)),
    "weighted_harmonic": lambda ps: fns.harmonic(ps.get("alpha", 0.5)),
    "quasi_arithmetic": lambda ps: fns.quasi_arithmetic(ps["p"], ps["alpha"]),
    "logarithmic": lambda ps: fns.logarithmic(),
    "dual_logarithmic": lambda ps: fns.dual_logarithmic(),
}


def parse_fn_spec(spec: str) -> fns.FunctionSpec:
    """Parse ``kind[:param=value,...]`` into a catalog function."""
    kind, _, rest = spec.strip().partition(":")
    kind = kind.strip().lower()
    if kind not in _FACTORIES:
        raise ValueError(
            f"unknown function kind {kind!r}; expected one of "
            + ", ".join(sorted(set(_FACTORIES)))
        )
    params: dict[str, float] = {}
    if rest:
        for token in rest.split(","):
            token = token.strip()
            if not token:
                continue
            if "=" in token:
                name, _, value = token.partition("=")
                params[name.strip()] = float(value)
            else:
                principal = _PRINCIPAL_PARAM.get(kind)
                if principal is None:
                    raise ValueError(
                        f"{kind} takes only named parameters, got {token!r}"
                    )
                params[principal] = float(token)
    try:
        return _FACTORIES[kind](params)
    except KeyError as exc:
        raise ValueError(f"{kind} needs parameter {exc}") from exc


def parse_measure_spec(spec: str) -> msr.FiniteMeasure:
    """Parse the measure grammar described in the module docstring."""
    atoms: list[tuple[float, float]] = []
    density_name = None
    table = None
    nodes = msr.DEFAULT_QUADRATURE_NODES
    for token in spec.replace(";", " ").split():
        name, _, value = token.partition("=")
        name = name.strip().lower()
        if not value:
            raise ValueError(f"measure field {token!r} needs name=value")
        if name == "atoms":
            parsed = ast.literal_eval(value)
            atoms.extend((float(t), float(w)) for t, w in parsed)
        elif name == "density":
            if value.startswith("table"):
                table = ast.literal_eval(value[len("table"):])
            else:
                density_name = value.strip().lower()
        elif name == "nodes":
            nodes = int(value)
        else:
            raise ValueError(f"unknown measure field {name!r}")
    if density_name is not None and table is not None:
        raise ValueError("give either a named density or a table, not both")
    if density_name is None and table is None:
        return msr.from_atoms(atoms)
    if table is not None:
        ts = np.array([float(t) for t, _ in table])
        ws = np.array([float(w) for _, w in table])
        return msr.FiniteMeasure(
            atoms=tuple(atoms), nodes=ts, weights=ws, label="table"
        )
    if density_name == "arcsine":
        base = msr.arcsine(nodes)
        return msr.FiniteMeasure(
            atoms=tuple(atoms),
            density=base.density,
            nodes=base.nodes,
            weights=base.weights,
            label=base.label,
        )
    if density_name in ("uniform", "lebesgue"):
        return msr.from_density(
            lambda t: 1.0, n=nodes, atoms=atoms, label="uniform"
        )
    raise ValueError(f"unknown density {density_name!r}")


def _build_connection(args) -> Connection:
    scale = getattr(args, "scale", 1.0)
    if getattr(args, "fn", None) and getattr(args, "measure", None):
        conn = Connection(
            fn=parse_fn_spec(args.fn),
            measure=parse_measure_spec(args.measure),
            scale=scale,
        )
        return conn
    if getattr(args, "fn", None):
        return Connection.from_function(parse_fn_spec(args.fn), scale=scale)
    if getattr(args, "measure", None):
        return Connection.from_measure(parse_measure_spec(args.measure), scale=scale)
    raise ValueError("a connection needs --fn or --measure")


def _tolerances(args) -> Tolerances:
    return Tolerances(
        psd_tol=args.tol_psd,
        order_tol=args.tol_order,
        range_tol=args.tol_range,
        solve_rtol=args.tol_solve,
    )


def _load_psd(path, label: str, out) -> PsdMatrix:
    matrix, asymmetry = read_matrix(path)
    if asymmetry > 0.0:
        print(f"# {label}: symmetrized, asymmetry norm {asymmetry:.6e}", file=out)
    return PsdMatrix.wrap(matrix)


def _emit(text: str, args, out):
    print(text, end="" if text.endswith("\n") else "\n", file=out)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _add_common(parser, matrices=()):
    parser.add_argument("--fn", help="function spec kind[:param=value,...]")
    parser.add_argument("--measure", help="measure spec (see --help)")
    parser.add_argument("--scale", type=float, default=1.0,
                        help="nonnegative multiplier of the connection")
    for name in matrices:
        parser.add_argument(f"--{name}", required=True,
                            help=f"path to matrix file {name}")
    parser.add_argument("--out", help="also write the report to this file")
    parser.add_argument("--tol-psd", type=float,
                        default=DEFAULT_TOLERANCES.psd_tol)
    parser.add_argument("--tol-order", type=float,
                        default=DEFAULT_TOLERANCES.order_tol)
    parser.add_argument("--tol-range", type=float,
                        default=DEFAULT_TOLERANCES.range_tol)
    parser.add_argument("--tol-solve", type=float,
                        default=DEFAULT_TOLERANCES.solve_rtol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opconnect",
        description="Operator connections on positive semidefinite matrices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval", help="evaluate A sigma B")
    _add_common(p, matrices=("A", "B"))

    p = sub.add_parser("solve", help="solve A sigma X = B")
    _add_common(p, matrices=("A", "B"))

    p = sub.add_parser("solve-right", help="solve X sigma A = B")
    _add_common(p, matrices=("A", "B"))

    p = sub.add_parser("classify", help="cancellability/regularity report")
    _add_common(p)

    p = sub.add_parser("verify", help="randomized axiom verification")
    _add_common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fn", help="evaluate the representing function")
    _add_common(p)
    p.add_argument("--x", required=True,
                   help="comma-separated nonnegative evaluation points")
    p.add_argument("--invert", action="store_true",
                   help="invert instead of evaluating")

    p = sub.add_parser("measure-fn", help="evaluate the measure representation")
    _add_common(p)
    p.add_argument("--x", required=True,
                   help="comma-separated nonnegative evaluation points")
    return parser


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args, out)
    except (OpConnectError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args, out) -> int:
    tol = _tolerances(args)
    if args.verb == "eval":
        conn = _build_connection(args)
        a = _load_psd(args.A, "A", out)
        b = _load_psd(args.B, "B", out)
        result = evaluate(conn, a, b, tolerances=tol)
        text = (
            f"connection = {conn.describe()}\n"
            "A sigma B:\n" + format_matrix(result.entries, indent="  ") + "\n"
        )
        _emit(text, args, out)
        if getattr(args, "out", None):
            write_matrix(args.out, result.entries)
        return 0
    if args.verb in ("solve", "solve-right"):
        conn = _build_connection(args)
        a = _load_psd(args.A, "A", out)
        b = _load_psd(args.B, "B", out)
        solver = solve_left if args.verb == "solve" else solve_right
        report = solver(conn, a, b, tolerances=tol)
        text = f"connection = {conn.describe()}\n" + report.to_text()
        _emit(text, args, out)
        if report.status in (SolveStatus.RANGE_VIOLATION, SolveStatus.NOT_CANCELLABLE):
            return 2
        return 0
    if args.verb == "classify":
        conn = _build_connection(args)
        _emit(classify_connection(conn, tolerances=tol).to_text(), args, out)
        return 0
    if args.verb == "verify":
        conn = _build_connection(args)
        report = verify_axioms(
            conn, trials=args.trials, dim=args.dim, seed=args.seed,
            tolerances=tol,
        )
        _emit(report.to_text(), args, out)
        return 0
    if args.verb == "fn":
        conn = _build_connection(args)
        xs = [float(v) for v in args.x.split(",")]
        lines = [f"connection = {conn.describe()}"]
        for x in xs:
            if args.invert:
                y = fns.eval_inverse(conn.fn, x / conn.scale, range_tol=tol.range_tol)
                lines.append(f"f_inverse({x:.12g}) = {y:.12g}")
            else:
                lines.append(f"f({x:.12g}) = {conn.rep(x):.12g}")
        _emit("\n".join(lines) + "\n", args, out)
        return 0
    if args.verb == "measure-fn":
        mu = parse_measure_spec(args.measure or "")
        xs = [float(v) for v in args.x.split(",")]
        lines = [
            f"measure = {mu.describe()}",
            f"mass = {msr.mass(mu):.12g}",
            f"is_probability = {msr.is_probability(mu)}",
        ]
        for x in xs:
            lines.append(f"f({x:.12g}) = {msr.fn_from_measure(mu, x):.12g}")
        _emit("\n".join(lines) + "\n", args, out)
        return 0
    raise ValueError(f"unknown verb {args.verb!r}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
