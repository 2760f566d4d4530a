"""Command-line driver.

Every subcommand builds one report dictionary (``RunReport``) and prints it
as text, or as a single JSON object with ``--json``.  Exit codes: 0 success,
2 parse error, 3 capability or width error, 4 verification mismatch.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
import time

import numpy as np

from . import __version__
from .circuit import count_resources
from .counting import default_precision, run_counting
from .errors import CapabilityError, CountRequiredError, GraphParseError, NoMarkedStatesError
from .graph import (
    FORMATS,
    AdjacencyMatrix,
    binarize,
    count_maximal_cliques,
    edge_density,
    enumerate_maximal_cliques,
    guess_format,
    order_complex_thresholds,
    parse_graph,
    parse_weighted,
)
from .grover import BACKENDS, GroverConfig, run_search
from .oracle import build_oracle
from .sim import DEFAULT_SEED
from .verify import oracle_truth_table

EXIT_OK, EXIT_PARSE, EXIT_CAPABILITY, EXIT_MISMATCH = 0, 2, 3, 4


def _versions() -> dict:
    return {"qclique": __version__, "numpy": np.__version__, "python": platform.python_version()}


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise GraphParseError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(args) -> AdjacencyMatrix:
    if not args.input:
        raise GraphParseError("--input is required")
    fmt = args.format or guess_format(args.input)
    return parse_graph(_read(args.input), fmt)


def _report(command: str, graph: AdjacencyMatrix | None, params: dict, results: dict) -> dict:
    return {
        "command": command,
        "input_digest": graph.digest() if graph is not None else None,
        "n": graph.n if graph is not None else params.get("n"),
        "parameters": params,
        "results": results,
        "versions": _versions(),
    }


# ------------------------------------------------------------ commands


def cmd_enum(args) -> dict:
    a = _load_graph(args)
    cliques = enumerate_maximal_cliques(a)
    results = {
        "M": len(cliques),
        "cliques": [str(c) for c in cliques],
        "node_sets": [list(c.nodes) for c in cliques],
    }
    return _report("enum", a, {}, results)


def cmd_oracle_test(args) -> dict:
    a = _load_graph(args)
    rows, leakage = oracle_truth_table(a, args.backend)
    results = {
        "rows": [r.to_dict() for r in rows],
        "all_agree": all(r.agree for r in rows),
        "leakage": leakage,
        "marked": [r.x for r in rows if r.f_circuit == 1],
    }
    report = _report("oracle-test", a, {"backend": args.backend}, results)
    if not results["all_agree"] or leakage > 1e-10:
        report["error"] = "circuit and classical oracle disagree"
    return report


def cmd_grover(args) -> dict:
    a = _load_graph(args)
    config = GroverConfig(n=a.n, M=args.m, R=args.r, backend=args.backend,
                          shots=args.shots, seed=args.seed)
    result = run_search(a, config, classical_fallback=not args.no_classical_fallback)
    params = {"backend": args.backend, "shots": args.shots, "seed": args.seed, "M": args.m,
              "R": args.r}
    return _report("grover", a, params, result.to_dict())


def cmd_count(args) -> dict:
    a = _load_graph(args)
    t = args.t if args.t is not None else default_precision(a.n)
    est = run_counting(a, t, args.shots, args.seed, args.backend)
    params = {"backend": args.backend, "shots": args.shots, "seed": args.seed, "t": t}
    return _report("count", a, params, est.to_dict())


def cmd_pipeline(args) -> dict:
    a = _load_graph(args)
    t = args.t if args.t is not None else default_precision(a.n)
    est = run_counting(a, t, args.shots, args.seed, args.backend)
    params = {"backend": args.backend, "shots": args.shots, "search_shots": args.search_shots,
              "seed": args.seed, "t": t}
    if est.M_rounded == 0:
        raise NoMarkedStatesError(f"no marked states detected (M_raw={est.M_raw:.6g})", est)
    config = GroverConfig(n=a.n, backend=args.backend, shots=args.search_shots, seed=args.seed)
    search = run_search(a, config, estimate=est, classical_fallback=False)
    return _report("pipeline", a, params, {"count": est.to_dict(), "search": search.to_dict()})


def cmd_resources(args) -> dict:
    if args.input:
        a = _load_graph(args)
    elif args.n:
        a = AdjacencyMatrix.empty(args.n)
    else:
        raise GraphParseError("give --input or --n")
    n = a.n
    bundle = build_oracle(a)
    report = count_resources(bundle.body, decompose=args.decompose)
    blocks = {name: count_resources(c, decompose=args.decompose).to_dict()
              for name, c in bundle.blocks().items()}
    closed_form = 10 * n * n - 2 * n - 4
    results = {
        "oracle": report.to_dict(),
        "blocks": blocks,
        "oracle_qubits": n + 2 * n * n,
        "toffoli_closed_form": closed_form,
        "closed_form_matches": (report.toffoli_count == closed_form) if args.decompose and n >= 3 else None,
        "ratio_to_10n2": report.toffoli_count / (10 * n * n),
    }
    graph = a if args.input else None
    return _report("resources", graph, {"n": n, "decompose": args.decompose}, results)


def _sweep_thresholds(args, w) -> list[float]:
    if args.threshold:
        return [float(v) for v in args.threshold]
    off = w.off_diagonal()
    if args.steps:
        if args.steps < 2:
            raise ValueError("--steps must be at least 2")
        lo = float(off.min()) - 1e-9 * (1 + abs(float(off.min())))
        return [float(v) for v in np.linspace(float(off.max()), lo, args.steps)]
    return order_complex_thresholds(w)


def cmd_sweep(args) -> dict:
    if not args.input:
        raise GraphParseError("--input is required")
    w = parse_weighted(_read(args.input))
    rows = []
    for thr in _sweep_thresholds(args, w):
        a = binarize(w, thr)
        rows.append({
            "threshold": thr,
            "edges": a.num_edges,
            "edge_density": edge_density(a) if a.n >= 2 else None,
            "M": count_maximal_cliques(a),
        })
    params = {"thresholds": [r["threshold"] for r in rows], "n": w.n}
    report = _report("sweep", None, params, {"rows": rows})
    report["n"] = w.n
    return report


COMMANDS = {
    "enum": cmd_enum,
    "oracle-test": cmd_oracle_test,
    "grover": cmd_grover,
    "count": cmd_count,
    "pipeline": cmd_pipeline,
    "resources": cmd_resources,
    "sweep": cmd_sweep,
}


# ------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def render_text(report: dict) -> str:
    cmd = report["command"]
    res = report["results"]
    out = [f"{cmd}: n={report['n']}"]
    if cmd == "enum":
        out.append(f"M = {res['M']}")
        out += [f"  {b}  {{{', '.join(map(str, s))}}}" for b, s in zip(res["cliques"], res["node_sets"])]
    elif cmd == "oracle-test":
        out.append("x      f_circuit  f_classical  agree")
        out += [f"{r['x']:<6} {r['f_circuit']!s:<10} {r['f_classical']:<12} {r['agree']}" for r in res["rows"]]
        out.append(f"all agree: {res['all_agree']}  leakage: {res['leakage']:.3g}")
    elif cmd in ("grover", "pipeline"):
        if cmd == "pipeline":
            c = res["count"]
            out.append(f"count: j={c['j_measured']} theta_hat={c['theta_hat']:.6g} "
                       f"M_raw={c['M_raw']:.6g} M={c['M_rounded']}")
            res = res["search"]
        out.append(f"M={res['M_used']} ({res['M_source']})  R={res['R_used']}  "
                   f"theta={res['theta']:.6g}  asymptotic R={res['asymptotic_R']:.4g}")
        out.append(f"predicted success {res['predicted_success']:.6g}  "
                   f"measured marked mass {res['marked_mass']:.6g}")
        counts = res["samples"]["counts"]
        for bits in sorted(counts, key=lambda b: (-counts[b], b))[:16]:
            out.append(f"  {bits}  {counts[bits]}")
    elif cmd == "count":
        out.append(f"t={res['t']} j={res['j_measured']} (canonical {res['j_canonical']}) "
                   f"theta_hat={res['theta_hat']:.6g}")
        out.append(f"M_raw={res['M_raw']:.6g}  M={res['M_rounded']}")
    elif cmd == "resources":
        o = res["oracle"]
        out.append(f"toffoli={o['toffoli_count']}  mcx/mcz={o['mcx_count_pre_decomposition']}  "
                   f"x={o['x_count']}  gates={o['gate_total']}  depth={o['depth']}")
        out.append(f"qubits={o['total_qubits']} (oracle {res['oracle_qubits']})  "
                   f"workspace={o['workspace_qubits']} (used {o['workspace_qubits_used']})  "
                   f"with workspace={o['register_width']}")
        out.append(f"closed form 10n^2-2n-4 = {res['toffoli_closed_form']}  "
                   f"matches: {res['closed_form_matches']}  ratio to 10n^2: {res['ratio_to_10n2']:.4f}")
        for name, b in res["blocks"].items():
            out.append(f"  {name:<9} toffoli={b['toffoli_count']:<5} mcx/mcz={b['mcx_count_pre_decomposition']:<3} "
                       f"x={b['x_count']}")
    elif cmd == "sweep":
        out.append("threshold  edges  density  M")
        out += [f"{r['threshold']:<10.10g} {r['edges']:<6} {_fmt(r['edge_density']):<8} {r['M']}"
                for r in res["rows"]]
    if "error" in report:
        out.append(f"error: {report['error']}")
    return "\n".join(out) + "\n"


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["threshold", "edges", "edge_density", "M"],
                            lineterminator="\n")
    writer.writeheader()
    writer.writerows(report["results"]["rows"])
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


# ------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="graph file ('-' for stdin)")
    common.add_argument("--format", choices=FORMATS, help="input format (default: by extension)")
    common.add_argument("--json", action="store_true", help="emit one JSON object")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--shots", type=int, default=None)
    common.add_argument("--backend", choices=BACKENDS, default="structured")

    p = argparse.ArgumentParser(prog="qclique", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qclique {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("enum", parents=[common], help="classical brute-force maximal cliques")
    sub.add_parser("oracle-test", parents=[common], help="oracle vs classical truth table")
    g = sub.add_parser("grover", parents=[common], help="Grover search for maximal cliques")
    g.add_argument("--m", type=int, help="known number of maximal cliques")
    g.add_argument("--r", type=int, help="override the iteration count")
    g.add_argument("--no-classical-fallback", action="store_true",
                   help="refuse to compute M by brute force")
    for name, helptext in (("count", "quantum counting of maximal cliques"),
                           ("pipeline", "counting followed by search")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--t", type=int, help="precision qubits (default ceil(n/2)+3)")
        if name == "pipeline":
            c.add_argument("--search-shots", type=int, default=1024)
    r = sub.add_parser("resources", parents=[common], help="gate and qubit accounting")
    r.add_argument("--n", type=int, help="node count when no graph is given")
    r.add_argument("--decompose", action="store_true", help="charge MCX/MCZ as Toffoli chains")
    s = sub.add_parser("sweep", parents=[common], help="threshold sweep of a weighted matrix")
    grp = s.add_mutually_exclusive_group()
    grp.add_argument("--threshold", type=float, nargs="+")
    grp.add_argument("--steps", type=int)
    s.add_argument("--csv", action="store_true", help="emit CSV rows")
    return p


_DEFAULT_SHOTS = {"grover": 1024, "count": 64, "pipeline": 64}


def run(argv=None) -> tuple[int, dict | None, str]:
    """Execute a command; returns (exit code, report, rendered output)."""
    args = build_parser().parse_args(argv)
    if args.shots is None:
        args.shots = _DEFAULT_SHOTS.get(args.command, 1024)
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except GraphParseError as exc:
        return EXIT_PARSE, None, f"parse error: {exc}\n"
    except (CapabilityError, CountRequiredError, NoMarkedStatesError) as exc:
        return EXIT_CAPABILITY, None, f"error: {exc}\n"
    except ValueError as exc:
        return EXIT_PARSE, None, f"error: {exc}\n"
    report["parameters"]["seed"] = args.seed
    report["wall_time"] = round(time.perf_counter() - start, 6)
    code = EXIT_MISMATCH if "error" in report else EXIT_OK
    if getattr(args, "csv", False):
        text = render_csv(report)
    elif args.json:
        text = dumps(report)
    else:
        text = render_text(report)
    return code, report, text


def main(argv=None) -> int:
    code, _, text = run(argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_MISMATCH) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
