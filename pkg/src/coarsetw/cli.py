"""Command-line entry point: ``coarsetw <command> ...``.

Every command prints a JSON report (or a tab-separated table with
``--format text``). Exit status: 0 when everything checked holds, 1 when a
check, bound or invariant fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import formats
from .builders import BuilderParams, decompose_round, decompose_simple, gamma_bound, round_bounds, simple_bounds
from .decomposition import (
    TreePartition,
    balanced_bag,
    bfs_layered_tree_partition,
    to_dot,
    validate_tree_decomposition,
    validate_tree_partition,
)
from .distgraph import build_distance_graph, check_degree_bound, check_quasi_isometry
from .errors import BudgetExceeded, CoarseError, DecompositionFailure, InputError, InvariantViolation
from .generators import FAMILIES, FamilySpec, generate
from .graph import estimate_doubling_dimension
from .separator import WeightFn, bsn_over_indicators, find_separator
from .transforms import (
    CoarseningParams,
    coarsen_tree_partition,
    lift_decomposition,
    separator_transfer_unweighted,
    separator_transfer_weighted,
)


class CheckFailed(Exception):
    """A report was produced but at least one check failed."""


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x if x == x and abs(x) != float("inf") else str(x)
    return formats.rational_out(x) if hasattr(x, "denominator") else str(x)


def _checks_payload(checks):
    return [{"check": c.name, "claimed": c.claimed, "observed": c.observed, "ok": c.ok} for c in checks]


def _graph_arg(p, name="graph", flag=False):
    if flag:
        p.add_argument(f"--{name}", required=True, help="graph file (.json or p/e text)")
    else:
        p.add_argument(name, help="graph file (.json or p/e text)")


def _common(p):
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--report", help="also write the JSON report to this path")


def _positive_int(s):
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coarsetw", description="coarse tree decompositions, separators and distance graphs")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("gen", help="write a graph from a named family")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--rows", type=_positive_int)
    p.add_argument("--cols", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", type=_positive_int)
    p.add_argument("--threshold", type=_positive_int, default=1)
    p.add_argument("--p", type=float, default=0.1, dest="prob")
    p.add_argument("-o", "--out", required=True)
    _common(p)

    p = sub.add_parser("separator", help="find a (k,r)-coverable balanced separator, or compute bsn over indicators")
    _graph_arg(p)
    p.add_argument("-k", type=_positive_int, default=1)
    p.add_argument("-r", type=int, default=1)
    p.add_argument("--mu", default="uniform")
    p.add_argument("--oracle", choices=("exact", "greedy"), default="exact")
    p.add_argument("--bsn-max", type=_positive_int, help="compute the smallest k <= this instead")
    p.add_argument("--method", choices=("enumerate", "milp", "auto"), default="auto")
    _common(p)

    p = sub.add_parser("decompose", help="build a tree decomposition with ball covers")
    _graph_arg(p)
    p.add_argument("--algo", choices=("simple", "round"), default="simple")
    p.add_argument("-k", type=_positive_int, required=True)
    p.add_argument("-r", type=_positive_int, required=True)
    p.add_argument("--gamma-cap", type=int)
    p.add_argument("--oracle", choices=("exact", "greedy"), default="exact")
    p.add_argument("-o", "--out")
    p.add_argument("--dot")
    p.add_argument("--figures", help="directory for PNG figures and TSV tables")
    _common(p)

    p = sub.add_parser("distgraph", help="build a distance graph and certify its distortion")
    _graph_arg(p)
    p.add_argument("-r", type=_positive_int, required=True)
    p.add_argument("--sigma", type=int)
    p.add_argument("--unweighted", action="store_true")
    p.add_argument("--radius-cap", type=_positive_int, default=4, help="radius cap for the doubling estimate")
    p.add_argument("-o", "--out")
    _common(p)

    p = sub.add_parser("transfer", help="transfer a balanced separator from G into its distance graph")
    _graph_arg(p, flag=True)
    p.add_argument("--dg", required=True)
    p.add_argument("--variant", choices=("weighted", "unweighted"), required=True)
    p.add_argument("-k", type=_positive_int, default=1, help="ball budget in G (k, or d for the unweighted variant)")
    p.add_argument("--mu", default="uniform", help="weights on H")
    p.add_argument("--m-estimate", type=int)
    p.add_argument("--radius-cap", type=_positive_int, default=4)
    _common(p)

    p = sub.add_parser("coarsen", help="coarsen a tree-partition of H into one of G with spread r")
    _graph_arg(p, flag=True)
    p.add_argument("--dg", required=True)
    p.add_argument("--tp", help="tree-partition of H (default: BFS layering of H)")
    p.add_argument("--alpha", default="3")
    p.add_argument("--beta", default="3")
    p.add_argument("--gamma", default="3")
    p.add_argument("-r", type=_positive_int, required=True)
    p.add_argument("-o", "--out")
    p.add_argument("--dot")
    _common(p)

    p = sub.add_parser("lift", help="pull a decomposition of an unweighted distance graph back to G")
    _graph_arg(p, flag=True)
    p.add_argument("--dg", required=True)
    p.add_argument("--td", required=True)
    p.add_argument("--s")
    p.add_argument("-o", "--out")
    _common(p)

    p = sub.add_parser("check", help="validate a decomposition and compare it with the builder bounds")
    _graph_arg(p, flag=True)
    p.add_argument("--td", required=True)
    p.add_argument("--bound", choices=("none", "simple", "round"), default="none")
    p.add_argument("-k", type=_positive_int)
    p.add_argument("-r", type=_positive_int)
    p.add_argument("--gamma-cap", type=int)
    p.add_argument("--figures")
    _common(p)

    p = sub.add_parser("pipeline", help="run a chained end-to-end check on a generated graph")
    p.add_argument("--kind", choices=("round", "balanced"), default="round")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--rows", type=_positive_int)
    p.add_argument("--cols", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-k", type=_positive_int, default=2)
    p.add_argument("-r", type=_positive_int, default=1)
    p.add_argument("--mu", default="uniform")
    p.add_argument("--figures")
    _common(p)
    return ap


# ---------------------------------------------------------------------------
# commands; each returns (payload, inputs, ok)


def cmd_gen(a):
    spec = FamilySpec(a.family, a.n, a.rows, a.cols, a.seed, a.side, a.threshold, a.prob)
    if spec.family == "grid" and (a.rows is None or a.cols is None):
        raise InputError("grid needs --rows and --cols")
    if spec.family != "grid" and a.n is None:
        raise InputError(f"{spec.family} needs --n")
    g = generate(spec)
    formats.save_graph(a.out, g)
    return {"family": spec.family, "label": spec.label(), "n": g.n, "m": g.m, "out": a.out}, {}, True


def cmd_separator(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph)}
    if a.bsn_max is not None:
        b = bsn_over_indicators(g, a.r, a.bsn_max, method=a.method)
        return {"n": g.n, "r": a.r, "k_max": a.bsn_max, "method": a.method, "bsn": b}, inputs, b is not None
    mu = formats.parse_mu(a.mu, g.n)
    w = find_separator(g, mu, a.k, a.r, mode=a.oracle)
    payload = {"n": g.n, "k": a.k, "r": a.r, "oracle": a.oracle, "found": w is not None}
    if w is not None:
        payload["balls"] = [formats.ball_to_json(b) for b in w.balls]
        payload["union"] = list(w.union)
    return payload, inputs, w is not None


def _params(a):
    return BuilderParams(a.k, a.r, gamma_cap=a.gamma_cap, oracle_mode=a.oracle)


def _bounds(g, td, algo, k, r, gamma_cap):
    if algo == "simple":
        return simple_bounds(g, td, k, r)
    return round_bounds(g, td, k, r, gamma_cap)


def cmd_decompose(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph)}
    params = _params(a)
    build = decompose_simple if a.algo == "simple" else decompose_round
    td = build(g, params)
    checks = _bounds(g, td, a.algo, a.k, a.r, params.gamma_cap)
    payload = {
        "algo": a.algo,
        "n": g.n,
        "k": a.k,
        "r": a.r,
        "gamma_cap": params.gamma_cap,
        "alpha": params.alpha,
        "nodes": td.num_nodes,
        "width": td.width,
        "max_cover": max((len(c) for c in td.covers), default=0),
        "bounds": _checks_payload(checks),
    }
    if a.out:
        formats.write_json(a.out, formats.td_to_json(td))
        formats.write_json(a.out + ".stats.json", _jsonable(payload))
    if a.dot:
        Path(a.dot).write_text(to_dot(td))
    if a.figures:
        payload["figures"] = _figures(td, checks, a.figures, f"decompose_{a.algo}", a.r)
    return payload, inputs, all(c.ok for c in checks)


def _figures(td, checks, directory, stem, r):
    from .report import render_decomposition_figures

    return render_decomposition_figures(td, checks, directory, stem, r)


def cmd_distgraph(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph)}
    dg, phi = build_distance_graph(g, a.r, a.sigma, weighted=not a.unweighted)
    cert = check_quasi_isometry(g, dg, phi)
    m_hat = estimate_doubling_dimension(g, a.radius_cap)
    deg = check_degree_bound(dg, m_hat)
    if a.out:
        formats.write_json(a.out, formats.distgraph_to_json(dg, phi))

    def wit(w):
        return None if w is None else {"u": w.u, "v": w.v, "dist_g": w.dist_g, "dist_h": w.dist_h, "bound": w.bound}

    payload = {
        "n": g.n,
        "r": a.r,
        "sigma": dg.sigma,
        "weighted": dg.weighted,
        "I": list(dg.I),
        "H_edges": dg.H.m,
        "quasi_isometry": {
            "variant": cert.variant,
            "alpha": cert.alpha,
            "beta": cert.beta,
            "pairs_checked": cert.pairs_checked,
            "worst_lower": wit(cert.worst_lower_witness),
            "worst_upper": wit(cert.worst_upper_witness),
            "density": cert.density_witness,
            "ok": True,
        },
        "degree": {"max_degree": deg.max_degree, "rho": deg.rho, "m_estimate": deg.m_estimate, "bound": deg.bound, "ok": deg.ok, "note": deg.note},
    }
    return payload, inputs, deg.ok


def _load_dg(a, g):
    return formats.distgraph_from_json(formats.read_json(a.dg), g)


def cmd_transfer(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph), a.dg: _digest(a.dg)}
    dg, phi = _load_dg(a, g)
    mu_H = formats.parse_mu(a.mu, dg.H.n)
    if a.variant == "weighted":
        m_hat = a.m_estimate if a.m_estimate is not None else estimate_doubling_dimension(g, a.radius_cap)
        t = separator_transfer_weighted(g, dg, phi, mu_H, a.k, m_estimate=m_hat)
        payload = {"variant": "weighted", "k": a.k, "m_estimate": m_hat, "anchors": list(t.anchors), "X_H": list(t.vertices), "size": len(t.vertices), "size_bound": t.size_bound, "balanced": True}
    else:
        w = separator_transfer_unweighted(g, dg, phi, mu_H, a.k)
        payload = {"variant": "unweighted", "d": a.k, "balls": [formats.ball_to_json(b) for b in w.balls], "union": list(w.union), "balanced": True}
    return payload, inputs, True


def cmd_coarsen(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph), a.dg: _digest(a.dg)}
    dg, phi = _load_dg(a, g)
    if a.tp:
        inputs[a.tp] = _digest(a.tp)
        tp = formats.td_from_json(formats.read_json(a.tp))
        if not isinstance(tp, TreePartition):
            raise InputError("--tp must hold a tree-partition (with a 'spread' field)")
    else:
        tp = bfs_layered_tree_partition(dg.H)
    params = CoarseningParams(a.alpha, a.beta, a.gamma, a.r)
    res = coarsen_tree_partition(g, dg.H, phi.h_indices(dg), tp, params)
    if a.out:
        formats.write_json(a.out, formats.td_to_json(res.partition))
    if a.dot:
        Path(a.dot).write_text(to_dot(res.partition))
    lc = res.clusters
    payload = {
        "p": params.p,
        "alpha": params.alpha,
        "beta": params.beta,
        "gamma": params.gamma,
        "r": a.r,
        "H_nodes": tp.num_nodes,
        "levels": list(lc.L),
        "coarse_nodes": res.partition.num_nodes,
        "coarse_edges": [list(e) for e in res.partition.tree_edges],
        "width": res.partition.width,
        "tree_max_degree": res.tree_max_degree,
        "coarse_max_degree": res.coarse_max_degree,
        "degree_bound": res.degree_bound,
        "largest_cluster": res.largest_cluster,
        "cluster_bound": res.cluster_bound,
        "fibre_diameter": res.fibre_diameter,
        "spread_ok": True,
    }
    return payload, inputs, True


def cmd_lift(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph), a.dg: _digest(a.dg), a.td: _digest(a.td)}
    dg, phi = _load_dg(a, g)
    td_H = formats.td_from_json(formats.read_json(a.td))
    td = lift_decomposition(g, dg, phi, td_H, a.s)
    if a.out:
        formats.write_json(a.out, formats.td_to_json(td))
    radii = sorted({b.radius for c in td.covers for b in c})
    return {"nodes": td.num_nodes, "width": td.width, "cover_radii": radii, "max_cover": max((len(c) for c in td.covers), default=0), "valid": True}, inputs, True


def cmd_check(a):
    g = formats.load_graph(a.graph)
    inputs = {a.graph: _digest(a.graph), a.td: _digest(a.td)}
    td = formats.td_from_json(formats.read_json(a.td))
    if isinstance(td, TreePartition):
        problems = validate_tree_partition(g, td)
    else:
        problems = validate_tree_decomposition(g, td)
    payload = {
        "kind": "tree-partition" if isinstance(td, TreePartition) else "tree-decomposition",
        "nodes": td.num_nodes,
        "violations": [{"axiom": v.axiom, "witness": v.witness, "message": v.message} for v in problems],
    }
    ok = not problems
    checks = []
    if a.bound != "none":
        if a.k is None or a.r is None:
            raise InputError("--bound needs -k and -r")
        gamma_cap = a.gamma_cap if a.gamma_cap is not None else gamma_bound(a.k)
        checks = _bounds(g, td, a.bound, a.k, a.r, gamma_cap)
        payload["bounds"] = _checks_payload(checks)
        ok = ok and all(c.ok for c in checks)
    if a.figures:
        payload["figures"] = _figures(td, checks, a.figures, "check", a.r)
    return payload, inputs, ok


def cmd_pipeline(a):
    spec = FamilySpec(a.family, a.n, a.rows, a.cols, a.seed)
    g = generate(spec)
    steps = []
    ok = True
    if a.kind == "round":
        dg, phi = build_distance_graph(g, a.r)
        cert = check_quasi_isometry(g, dg, phi)
        steps.append({"step": "distgraph", "H_vertices": dg.H.n, "alpha": cert.alpha, "beta": cert.beta, "ok": True})
        params = BuilderParams(a.k, a.r)
        td = decompose_round(g, params)
        checks = round_bounds(g, td, a.k, a.r, params.gamma_cap)
        steps.append({"step": "decompose", "algo": "round", "nodes": td.num_nodes, "max_cover": max(len(c) for c in td.covers)})
        steps.append({"step": "check", "bounds": _checks_payload(checks)})
        ok = all(c.ok for c in checks)
    else:
        params = BuilderParams(a.k, a.r)
        td = decompose_simple(g, params)
        checks = simple_bounds(g, td, a.k, a.r)
        steps.append({"step": "decompose", "algo": "simple", "nodes": td.num_nodes, "bounds": _checks_payload(checks)})
        mu = formats.parse_mu(a.mu, g.n)
        x = balanced_bag(g, td, mu)
        steps.append({"step": "balanced_bag", "node": x, "bag": list(td.bags[x]), "balanced": True})
        ok = all(c.ok for c in checks)
    payload = {"kind": a.kind, "graph": spec.label(), "n": g.n, "m": g.m, "k": a.k, "r": a.r, "steps": steps}
    if a.figures:
        payload["figures"] = _figures(td, checks, a.figures, f"pipeline_{a.kind}", a.r)
    return payload, {}, ok


COMMANDS = {
    "gen": cmd_gen,
    "separator": cmd_separator,
    "decompose": cmd_decompose,
    "distgraph": cmd_distgraph,
    "transfer": cmd_transfer,
    "coarsen": cmd_coarsen,
    "lift": cmd_lift,
    "check": cmd_check,
    "pipeline": cmd_pipeline,
}


def _text(payload) -> str:
    rows = []

    def walk(prefix, x):
        if isinstance(x, dict):
            for k, v in x.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        elif isinstance(x, list) and x and all(isinstance(v, dict) for v in x):
            for i, v in enumerate(x):
                walk(f"{prefix}[{i}]", v)
        else:
            rows.append(f"{prefix}\t{json.dumps(x)}")

    walk("", payload)
    return "\n".join(rows) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    start = time.perf_counter()
    status, error = "ok", None
    payload, inputs, code = {}, {}, 0
    try:
        payload, inputs, ok = COMMANDS[a.command](a)
        if not ok:
            status, code = "check-failed", 1
    except (InputError, BudgetExceeded) as e:
        status, error, code = "input-error", str(e), 2
    except (DecompositionFailure, InvariantViolation) as e:
        status, error, code = "check-failed", str(e), 1
        witness = getattr(e, "witness", None) or getattr(e, "frame", None)
        if witness is not None:
            payload = {"witness": witness}
    except CoarseError as e:
        status, error, code = "error", str(e), 1
    report = {
        "command": a.command,
        "argv": list(argv) if argv is not None else sys.argv[1:],
        "inputs": inputs,
        "status": status,
        "payload": payload,
    }
    if error is not None:
        report["error"] = error
    report = _jsonable(report)
    report["wall_time"] = round(time.perf_counter() - start, 6)
    if getattr(a, "report", None):
        formats.write_json(a.report, report)
    if a.format == "text":
        stdout.write(_text({k: v for k, v in report.items() if k != "wall_time"}))
        stdout.write(f"wall_time\t{report['wall_time']}\n")
    else:
        stdout.write(formats.dumps(report))
    if error is not None:
        print(f"coarsetw {a.command}: {error}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
