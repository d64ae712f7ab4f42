"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .als import AlsConfig, als_fit, rank_sweep
from .cpd import (
    DEFAULT_ORBIT_CAP,
    cpd_to_json,
    line_cpd,
    rank_bounds,
    ring_cpd,
    verify,
    verify_lower_bound_structure,
)
from .errors import InputError, ResourceError, VerificationError
from .graph import (
    Graph,
    complete,
    format_edge_list,
    lc_orbit,
    line,
    min_vertex_cover,
    parse_edge_list,
    read_graph6,
    ring,
    star,
)
from .measures import (
    count_odd_degree_graphs,
    graph_measures,
    graph_to_tableau,
    n_tangle_dense,
    n_tangle_graph_rule,
    n_tangle_stabilizer,
)
from .statevec import build_graph_state, state_from_json, state_to_json

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _graph_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--ring", type=int, metavar="N")
    g.add_argument("--line", type=int, metavar="N")
    g.add_argument("--star", type=int, metavar="N")
    g.add_argument("--complete", type=int, metavar="N")
    g.add_argument("--edges", metavar="PATH", help="edge-list file: n on the first line, then 'u v' pairs")
    g.add_argument("--graph6", metavar="STR")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--seed", type=int, default=0, metavar="U64")


def load_graph(args) -> Graph:
    if args.ring is not None:
        return ring(args.ring)
    if args.line is not None:
        return line(args.line)
    if args.star is not None:
        return star(args.star)
    if args.complete is not None:
        return complete(args.complete)
    if args.edges is not None:
        try:
            text = Path(args.edges).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {args.edges}: {exc.strerror}") from None
        return parse_edge_list(text)
    if args.graph6 is not None:
        return read_graph6(args.graph6)
    raise InputError("no graph given")


def _graph_echo(G: Graph) -> dict:
    return {"n": G.n, "edges": [list(e) for e in G.edges()]}


def _parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        return int(a), int(b)
    except ValueError:
        raise InputError(f"--sweep expects A..B, got {text!r}") from None


# -- commands ----------------------------------------------------------------

def cmd_state(args):
    if args.load:
        try:
            psi = state_from_json(Path(args.load).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {args.load}: {exc.strerror}") from None
        inputs = {"load": args.load}
    else:
        G = load_graph(args)
        psi = build_graph_state(G)
        inputs = _graph_echo(G)
    payload = state_to_json(psi)
    if args.out:
        Path(args.out).write_text(json.dumps(payload) + "\n")
    human = [f"{j:0{psi.n}b} {tuple(x.to_triple()) if _has_triple(x) else x.parts}" for j, x in enumerate(psi.amps)]
    return inputs, payload, human, EXIT_OK


def _has_triple(x) -> bool:
    try:
        x.to_triple()
        return True
    except ValueError:
        return False


def cmd_cpd(args):
    if args.family == "line":
        D = line_cpd(args.size)
        G = line(args.size)
    else:
        if args.size % 2 == 0:
            raise InputError(f"ring decompositions need an odd size, got {args.size}")
        D = ring_cpd(args.size)
        G = ring(args.size)
    payload = {"decomposition": cpd_to_json(D), "terms": len(D)}
    code = EXIT_OK
    human = [f"{args.family} {args.size}: {len(D)} terms"]
    if args.verify:
        res = verify(D, build_graph_state(G))
        payload["verification"] = {**res.to_json(), "method": "exact", "tolerance": 0}
        human.append("exact-match" if res.exact else f"mismatch, residual {res.residual:.3e}")
        if not res.exact:
            code = EXIT_VERIFY
    return {"family": args.family, "size": args.size, "verify": args.verify}, payload, human, code


def cmd_bounds(args):
    G = load_graph(args)
    b = rank_bounds(G, orbit_cap=args.orbit_cap, seed=args.seed)
    payload = {**b.to_json(), "method": "flattening + vertex cover over orbit", "tolerance": 0}
    human = [f"lower {b.lower}", f"upper {b.upper}"] + [f"note: {s}" for s in b.notes]
    return {**_graph_echo(G), "orbit_cap": args.orbit_cap}, payload, human, EXIT_OK


def cmd_measures(args):
    G = load_graph(args)
    method = args.method or "closed"
    reports = graph_measures(G, method)
    payload = {k: r.to_json() for k, r in reports.items()}
    code = EXIT_OK
    if len(reports) > 1:
        a, b = reports["closed-form"].values(), reports["dense"].values()
        agree = bool(np.allclose(a, b, atol=1e-9, rtol=0))
        payload["agree"] = agree
        code = EXIT_OK if agree else EXIT_VERIFY
    human = []
    for k, r in reports.items():
        human.append(f"{k}: concurrence {r.concurrence:.12g}, negativity {r.negativity:.12g}, "
                     f"geometric {r.geometric:.12g}, d_min {r.d_min}")
    return {**_graph_echo(G), "method": method}, payload, human, code


def cmd_ntangle(args):
    G = load_graph(args)
    method = args.method or "all"
    values = {}
    if method in ("closed", "rule", "all"):
        values["graph-rule"] = n_tangle_graph_rule(G)
    if method in ("dense", "all"):
        values["dense"] = n_tangle_dense(build_graph_state(G))
    if method in ("stabilizer", "all"):
        values["stabilizer"] = n_tangle_stabilizer(graph_to_tableau(G))
    if not values:
        raise InputError(f"unknown method {method!r}")
    agree = len({float(v) for v in values.values()}) == 1
    payload = {"values": values, "agree": agree, "real_input": True, "tolerance": 0}
    human = [f"{k}: {v}" for k, v in values.items()]
    return {**_graph_echo(G), "method": method}, payload, human, EXIT_OK if agree else EXIT_VERIFY


def cmd_als(args):
    G = load_graph(args)
    psi = build_graph_state(G)
    if args.sweep:
        lo, hi = _parse_range(args.sweep)
        cfg = AlsConfig(lo, max_iters=args.max_iters, restarts=args.restarts, seed=args.seed)
        rows = rank_sweep(psi, lo, hi, cfg)
        payload = {"table": [r.to_json() for r in rows], "label": "evidence",
                   "tolerance": cfg.tol, "regularization": cfg.reg}
        human = [f"R={r.rank} residual {r.residual:.3e} iterations {r.iterations} diverged {r.diverged}" for r in rows]
    else:
        if args.rank is None:
            raise InputError("als needs --rank or --sweep")
        cfg = AlsConfig(args.rank, max_iters=args.max_iters, restarts=args.restarts, seed=args.seed,
                        stop_below=args.stop_below)
        res = als_fit(psi, cfg)
        payload = {**res.to_json(), "tolerance": cfg.tol}
        human = [f"R={res.rank} residual {res.best_residual:.3e} diverged {res.diverged}"]
    inputs = {**_graph_echo(G), "rank": args.rank, "sweep": args.sweep, "restarts": args.restarts}
    return inputs, payload, human, EXIT_OK


def cmd_orbit(args):
    G = load_graph(args)
    orbit = lc_orbit(G, cap=args.orbit_cap)
    taus = [min_vertex_cover(H)[0] for H in orbit.graphs]
    payload = {"size": len(orbit), "closed": orbit.closed, "min_vertex_cover": min(taus),
               "max_vertex_cover": max(taus)}
    human = [f"orbit size {len(orbit)}{'' if orbit.closed else ' (truncated)'}", f"min vertex cover {min(taus)}"]
    return {**_graph_echo(G), "orbit_cap": args.orbit_cap}, payload, human, EXIT_OK


def cmd_census(args):
    count = count_odd_degree_graphs(args.n)
    payload = {"n": args.n, "count": count, "method": "exhaustive"}
    return {"n": args.n}, payload, [str(count)], EXIT_OK


def cmd_structure(args):
    rep = verify_lower_bound_structure(args.n, trials=args.trials, seed=args.seed)
    payload = rep.to_json()
    human = [f"{k}: {v}" for k, v in payload.items()]
    return {"n": args.n, "trials": args.trials}, payload, human, EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_edges(args):
    G = load_graph(args)
    text = format_edge_list(G)
    return _graph_echo(G), {"edge_list": text}, text.rstrip("\n").splitlines(), EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="graphrank", description="Graph-state tensor rank and entanglement tools")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("state", help="exact graph-state amplitudes")
    _graph_source(s, required=False)
    s.add_argument("--load", metavar="PATH", help="re-read a state JSON file")
    s.add_argument("--out", metavar="PATH", help="also write the state JSON here")
    _common(s)
    s.set_defaults(func=cmd_state)

    s = sub.add_parser("cpd", help="constructive CP decomposition of a line or odd ring")
    s.add_argument("family", choices=["line", "ring"])
    s.add_argument("size", type=int)
    s.add_argument("--verify", action="store_true")
    _common(s)
    s.set_defaults(func=cmd_cpd)

    s = sub.add_parser("bounds", help="CP rank lower and upper bounds")
    _graph_source(s)
    s.add_argument("--orbit-cap", type=int, default=DEFAULT_ORBIT_CAP)
    _common(s)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("measures", help="GME concurrence, negativity, geometric measure")
    _graph_source(s)
    s.add_argument("--method", choices=["closed", "dense", "all"])
    _common(s)
    s.set_defaults(func=cmd_measures)

    s = sub.add_parser("ntangle", help="n-tangle by graph rule, dense state and stabilizers")
    _graph_source(s)
    s.add_argument("--method", choices=["closed", "rule", "dense", "stabilizer", "all"])
    _common(s)
    s.set_defaults(func=cmd_ntangle)

    s = sub.add_parser("als", help="alternating least squares CP fit")
    _graph_source(s)
    s.add_argument("--rank", type=int)
    s.add_argument("--sweep", metavar="A..B")
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--max-iters", type=int, default=3000)
    s.add_argument("--stop-below", type=float, default=None)
    _common(s)
    s.set_defaults(func=cmd_als)

    s = sub.add_parser("orbit", help="local-complementation orbit")
    _graph_source(s)
    s.add_argument("--orbit-cap", type=int, default=DEFAULT_ORBIT_CAP)
    _common(s)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("census", help="count graphs whose degrees are all odd")
    s.add_argument("n", type=int)
    _common(s)
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("structure", help="odd-ring support structure checks (2 <= n <= 4)")
    s.add_argument("n", type=int)
    s.add_argument("--trials", type=int, default=1000)
    _common(s)
    s.set_defaults(func=cmd_structure)

    s = sub.add_parser("edges", help="print a graph as an edge list")
    _graph_source(s)
    _common(s)
    s.set_defaults(func=cmd_edges)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        inputs, payload, human, code = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if args.json:
        report = {
            "command": args.command,
            "inputs": inputs,
            "results": payload,
            "version": __version__,
            "seed": args.seed,
            "wall_time": round(time.perf_counter() - start, 6),
        }
        print(json.dumps(report, sort_keys=True))
    else:
        print("\n".join(human))
    return code


if __name__ == "__main__":
    sys.exit(main())
