"""Command line interface.

Subcommands:

    qsw simulate   propagate one scenario, emit populations per grid point
    qsw sweep      omega sweep in long CSV (or JSON) form
    qsw audit      cross-check the axiom formulas against the full tensor
    qsw compare    total-variation distances against the line-walk oracles

Graphs come either from the built-in family `line:<sites>:<gamma>` or from
an edge-list file (see qsw.graph.parse_edge_list). Regimes pick the jump
operators: crw uses edge-local operators, qw uses none, qsw-global the
single generator-shaped operator, qsw-custom a user-supplied JSON file.
The mixing parameter omega defaults to 0 for qw and 1 otherwise.

Exit codes: 0 success, 1 audit failure, 2 configuration error, 3 solver
failure. Output is deterministic: fixed key order, floats rendered with
repr so identical configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .evolution import (
    DensityMatrix,
    PropagationConfig,
    PropagationError,
    build_liouvillian,
    coherence_l1,
    populations,
    propagate_detailed,
)
from .graph import Graph, LineIndexMap, build_line, classical_generator, read_edge_list
from .operators import (
    CUSTOM,
    Hamiltonian,
    JumpOperatorSet,
    audit_axioms,
    edge_jump_operators,
    empty_jump_operators,
    global_jump_operator,
    hamiltonian_from_generator,
)
from .oracles import LineWalkSpec, crw_line_analytic, qw_line_analytic, total_variation

REGIMES = ("crw", "qw", "qsw-global", "qsw-custom")


class CliError(Exception):
    """Configuration problem; maps to exit code 2."""


@dataclass(frozen=True)
class GraphSource:
    source: str
    graph: Graph
    line_map: LineIndexMap | None
    gamma: float | None


def _parse_values(text: str, name: str) -> tuple[list[float], bool]:
    """A bare float, or a start:stop:count grid. Returns (values, was_grid)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(f"{name} grid must be start:stop:count, got {text!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise CliError(f"cannot parse {name} grid {text!r}: {exc}") from None
        if count < 2:
            raise CliError(f"{name} grid count must be at least 2, got {count}")
        return [float(v) for v in np.linspace(start, stop, count)], True
    try:
        return [float(text)], False
    except ValueError as exc:
        raise CliError(f"cannot parse {name} value {text!r}: {exc}") from None


def _load_graph(source: str) -> GraphSource:
    if source.startswith("line:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise CliError(f"line graph spec must be line:<sites>:<gamma>, got {source!r}")
        try:
            n_sites = int(parts[1])
            gamma = float(parts[2])
        except ValueError as exc:
            raise CliError(f"cannot parse {source!r}: {exc}") from None
        graph, line_map = build_line(n_sites, gamma)
        return GraphSource(source, graph, line_map, gamma)
    try:
        graph = read_edge_list(source)
    except OSError as exc:
        raise CliError(f"cannot read graph file {source!r}: {exc}") from None
    return GraphSource(source, graph, None, None)


def _load_jump_file(path: str, dim: int) -> JumpOperatorSet:
    """JSON file: a list of operators, each a list of [row, col, re, im] entries."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read jump-operator file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"jump-operator file {path!r} is not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise CliError("jump-operator file must hold a list of operators")
    ops = []
    for op_index, entries in enumerate(raw):
        if not isinstance(entries, list):
            raise CliError(f"operator {op_index} must be a list of [row, col, re, im] entries")
        arr = np.zeros((dim, dim), dtype=complex)
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 4:
                raise CliError(f"operator {op_index}: entries must be [row, col, re, im], got {entry!r}")
            row, col, re_part, im_part = entry
            if not 0 <= int(row) < dim or not 0 <= int(col) < dim:
                raise CliError(f"operator {op_index}: index ({row}, {col}) out of range for dim {dim}")
            arr[int(row), int(col)] = float(re_part) + 1j * float(im_part)
        ops.append(arr)
    return JumpOperatorSet(dim, tuple(ops), CUSTOM)


def _build_operators(src: GraphSource, args) -> tuple[Hamiltonian, JumpOperatorSet]:
    m = classical_generator(src.graph)
    h = hamiltonian_from_generator(m)
    regime = args.regime
    if regime == "crw":
        ls = edge_jump_operators(m, args.amplitude_convention)
    elif regime == "qw":
        ls = empty_jump_operators(src.graph.n_vertices)
    elif regime == "qsw-global":
        ls = global_jump_operator(m, args.global_l)
    elif regime == "qsw-custom":
        if not args.jump_file:
            raise CliError("regime qsw-custom requires --jump-file")
        ls = _load_jump_file(args.jump_file, src.graph.n_vertices)
    else:
        raise CliError(f"unknown regime {regime!r}")
    return h, ls


def _resolve_origin(src: GraphSource, origin: int | None) -> tuple[int, int]:
    """Returns (label, storage index). Line graphs label by signed position."""
    dim = src.graph.n_vertices
    if src.line_map is not None:
        label = 0 if origin is None else origin
        half = src.line_map.half_width
        if not -half <= label <= half:
            raise CliError(f"origin position {label} outside the line (|position| <= {half})")
        return label, src.line_map.index_of(label)
    label = 0 if origin is None else origin
    if not 0 <= label < dim:
        raise CliError(f"origin index {label} out of range for {dim} vertices")
    return label, label


def _position_labels(src: GraphSource) -> list[int]:
    if src.line_map is not None:
        return [int(p) for p in src.line_map.positions]
    return list(range(src.graph.n_vertices))


def _propagation_config(args) -> PropagationConfig:
    try:
        return PropagationConfig(
            method=args.method,
            rel_tol=args.rel_tol,
            abs_tol=args.abs_tol,
            max_step=args.max_step,
            validate_every=args.validate_every,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _config_echo(src: GraphSource, args, omegas, ts, origin_label, origin_index) -> dict:
    echo = {
        "graph": src.source,
        "regime": args.regime,
        "omega": [float(w) for w in omegas],
        "t": [float(t) for t in ts],
        "origin": origin_label,
        "origin_index": origin_index,
        "amplitude_convention": args.amplitude_convention,
        "global_l": args.global_l,
        "method": args.method,
        "rel_tol": float(args.rel_tol),
        "abs_tol": float(args.abs_tol),
        "max_step": None if args.max_step is None else float(args.max_step),
        "validate_every": int(args.validate_every),
        "jobs": int(args.jobs),
        "positions": _position_labels(src),
    }
    if args.regime == "qsw-custom":
        echo["jump_file"] = args.jump_file
    return echo


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_grid(src: GraphSource, args, omegas, ts) -> tuple[dict, list[dict]]:
    h, ls = _build_operators(src, args)
    origin_label, origin_index = _resolve_origin(src, args.origin)
    cfg = _propagation_config(args)
    rho0 = DensityMatrix.basis(src.graph.n_vertices, origin_index)
    points = [(w, t) for w in omegas for t in ts]

    def run_point(point):
        omega, t = point
        liou = build_liouvillian(h, ls, omega)
        state, info = propagate_detailed(rho0, liou, t, cfg)
        return {
            "omega": float(omega),
            "t": float(t),
            "populations": [float(p) for p in populations(state)],
            "coherence_l1": float(coherence_l1(state)),
            "validation": {
                "trace_drift": float(info.trace_drift),
                "min_eigenvalue": float(info.min_eigenvalue),
                "solver_steps": int(info.steps),
            },
        }

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_point, points))
    else:
        results = [run_point(p) for p in points]
    echo = _config_echo(src, args, omegas, ts, origin_label, origin_index)
    return echo, results


def _json_document(echo: dict, results: list[dict]) -> str:
    doc = {"config_echo": echo, "results": results, "version": __version__}
    return json.dumps(doc, indent=2) + "\n"


def _csv_rows(results: list[dict], labels: list[int], with_t: bool) -> str:
    lines = ["omega,t,position,population" if with_t else "omega,position,population"]
    for entry in results:
        for label, value in zip(labels, entry["populations"]):
            if with_t:
                lines.append(f"{entry['omega']!r},{entry['t']!r},{label},{value!r}")
            else:
                lines.append(f"{entry['omega']!r},{label},{value!r}")
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    src = _load_graph(args.graph)
    omegas, _ = _parse_values(args.omega, "omega") if args.omega else ([_default_omega(args.regime)], False)
    ts, _ = _parse_values(args.t, "t")
    echo, results = _run_grid(src, args, omegas, ts)
    if args.format == "json":
        _emit(_json_document(echo, results), args.output)
    else:
        _emit(_csv_rows(results, _position_labels(src), with_t=True), args.output)
    return 0


def cmd_sweep(args) -> int:
    src = _load_graph(args.graph)
    if not args.omega:
        raise CliError("sweep requires --omega start:stop:count")
    omegas, was_grid = _parse_values(args.omega, "omega")
    if not was_grid:
        raise CliError("sweep requires an omega grid start:stop:count")
    ts, t_was_grid = _parse_values(args.t, "t")
    if t_was_grid:
        raise CliError("sweep varies omega only; --t must be a single value")
    echo, results = _run_grid(src, args, omegas, ts)
    if args.format == "json":
        _emit(_json_document(echo, results), args.output)
    else:
        _emit(_csv_rows(results, _position_labels(src), with_t=False), args.output)
    return 0


def cmd_audit(args) -> int:
    src = _load_graph(args.graph)
    h, ls = _build_operators(src, args)
    report = audit_axioms(h, ls, src.graph, tol=args.tol)
    echo = {
        "graph": src.source,
        "regime": args.regime,
        "tol": float(args.tol),
        "amplitude_convention": args.amplitude_convention,
        "global_l": args.global_l,
    }
    if args.regime == "qsw-custom":
        echo["jump_file"] = args.jump_file
    doc = {"config_echo": echo, "report": report.to_dict(), "version": __version__}
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    if not report.passed:
        first = report.failures[0]
        print(
            f"audit failed: {first.kind} at indices {tuple(first.indices)} deviates by {first.deviation:.3e}",
            file=sys.stderr,
        )
        return 1
    return 0


def _distribution_variance(probs, labels) -> float:
    p = np.asarray(probs, dtype=float)
    x = np.asarray(labels, dtype=float)
    mean = float(p @ x)
    return float(p @ (x * x) - mean * mean)


def cmd_compare(args) -> int:
    src = _load_graph(args.graph)
    if src.line_map is None:
        raise CliError("compare needs a line graph; the analytic oracles cover no other family")
    omegas, omega_grid = _parse_values(args.omega, "omega") if args.omega else ([_default_omega(args.regime)], False)
    ts, t_grid = _parse_values(args.t, "t")
    if omega_grid or t_grid:
        raise CliError("compare takes single omega and t values, not grids")
    echo, results = _run_grid(src, args, omegas, ts)
    entry = results[0]
    labels = _position_labels(src)
    sim = np.asarray(entry["populations"])

    spec = LineWalkSpec(src.graph.n_vertices, src.gamma, ts[0])
    crw = crw_line_analytic(spec)
    qw = qw_line_analytic(spec)
    comparison = {
        "tv_vs_crw": float(total_variation(sim, crw.probabilities)),
        "tv_vs_qw": float(total_variation(sim, qw.probabilities)),
        "variance_sim": _distribution_variance(sim, labels),
        "variance_crw": _distribution_variance(crw.probabilities, crw.positions),
        "variance_qw": _distribution_variance(qw.probabilities, qw.positions),
        "crw_tail_mass": float(crw.tail_mass),
        "qw_tail_mass": float(qw.tail_mass),
    }
    if args.format == "json":
        doc = {"config_echo": echo, "comparison": comparison, "version": __version__}
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        lines = ["metric,value"]
        for key, value in comparison.items():
            lines.append(f"{key},{value!r}")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _default_omega(regime: str) -> float:
    return 0.0 if regime == "qw" else 1.0


def _add_common(parser: argparse.ArgumentParser, with_solver: bool) -> None:
    parser.add_argument("--graph", required=True, help="line:<sites>:<gamma> or an edge-list file path")
    parser.add_argument("--regime", required=True, choices=REGIMES)
    parser.add_argument("--output", default=None, help="write here instead of stdout")
    parser.add_argument("--jobs", type=int, default=1, help="parallel grid points (threads)")
    parser.add_argument(
        "--amplitude-convention",
        choices=("sqrt", "literal"),
        default="sqrt",
        help="edge-local operator amplitude: sqrt of the rate (default) or the rate itself",
    )
    parser.add_argument(
        "--global-l",
        choices=("full", "offdiagonal"),
        default="full",
        help="global operator: generator entrywise (default) or with the diagonal zeroed",
    )
    parser.add_argument("--jump-file", default=None, help="JSON jump operators for regime qsw-custom")
    if with_solver:
        parser.add_argument("--method", choices=("auto", "matrix-exponential", "adaptive-rk"), default="auto")
        parser.add_argument("--rel-tol", type=float, default=1e-9)
        parser.add_argument("--abs-tol", type=float, default=1e-12)
        parser.add_argument("--max-step", type=float, default=None)
        parser.add_argument("--validate-every", type=int, default=0)
        parser.add_argument("--origin", type=int, default=None, help="start vertex: signed position on lines, index otherwise")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsw", description="Quantum stochastic walk simulator")
    parser.add_argument("--version", action="version", version=f"qsw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="propagate one scenario")
    _add_common(p_sim, with_solver=True)
    p_sim.add_argument("--omega", default=None, help="mixing parameter, or grid start:stop:count")
    p_sim.add_argument("--t", default="5", help="evolution time, or grid start:stop:count")
    p_sim.add_argument("--format", choices=("json", "csv"), default="json")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="omega sweep")
    _add_common(p_sweep, with_solver=True)
    p_sweep.add_argument("--omega", default=None, help="grid start:stop:count (required)")
    p_sweep.add_argument("--t", default="5", help="evolution time (single value)")
    p_sweep.add_argument("--format", choices=("json", "csv"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_audit = sub.add_parser("audit", help="axiom formulas vs the full tensor")
    _add_common(p_audit, with_solver=False)
    p_audit.add_argument("--tol", type=float, default=1e-10)
    p_audit.set_defaults(func=cmd_audit)

    p_cmp = sub.add_parser("compare", help="distances from the line-walk oracles")
    _add_common(p_cmp, with_solver=True)
    p_cmp.add_argument("--omega", default=None, help="mixing parameter (single value)")
    p_cmp.add_argument("--t", default="5", help="evolution time (single value)")
    p_cmp.add_argument("--format", choices=("json", "csv"), default="json")
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PropagationError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
