"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 parameter domain or input format,
3 budget.  Every failure prints one line ``error[<reason>]: <message>`` on
stderr; discrepancy reports go to stdout as a single JSON line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import census
from .dihedral import aut_orbit, class_from_signature, enumerate_irr, split_signature_list
from .errors import ParameterDomainError, PXMapsError, VerificationError
from .ffpoly import check_params, cyclotomic_cosets, factor_x_r_minus_1, is_self_reciprocal
from .groups import DEFAULT_MAX_GROUP_ORDER
from .pxgraph import DEFAULT_MAX_GRAPH_VERTICES, PXParams, edge_list_text
from .rotamap import build_from_classes, build_map, map_from_json, map_to_json, maps_isomorphic, underlying_graph

DOMAIN_NOTE = "standing hypothesis: p is an odd prime, r >= 3 and p does not divide r"


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pxmaps", description="Rotary maps on Praeger-Xu graphs.")
    parser.add_argument("--max-group-order", type=_positive, default=DEFAULT_MAX_GROUP_ORDER,
                        help="refuse to build groups larger than this (default %(default)s)")
    parser.add_argument("--max-graph-vertices", type=_positive, default=DEFAULT_MAX_GRAPH_VERTICES,
                        help="refuse graph isomorphism tests above this size (default %(default)s)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized search orders")
    sub = parser.add_subparsers(dest="command", required=True)

    def pr(cmd):
        cmd.add_argument("--p", type=int, required=True)
        cmd.add_argument("--r", type=int, required=True)
        return cmd

    pr(sub.add_parser("factor", help="cyclotomic cosets and factors of x^r - 1 over F_p"))
    irreps = pr(sub.add_parser("irreps", help="irreducible F_p-representations of D_2r"))
    irreps.add_argument("--orbits", action="store_true", help="group classes into Aut(D_2r)-orbits")

    cen = pr(sub.add_parser("census", help="classify rotary PX maps for one or more s"))
    cen.add_argument("--s", type=_nonnegative, nargs="+", required=True,
                     help="one or more values of s; s = 0 gives the augmented census")
    cen.add_argument("--verify-graphs", action="store_true")
    cen.add_argument("--brute", action="store_true")
    cen.add_argument("--allow-large-s", action="store_true", help="allow s > r - 1 (exploratory)")
    cen.add_argument("--out", help="JSON file (one s) or directory (several s)")
    cen.add_argument("--jobs", type=_positive, default=1, help="worker processes across cells")

    ex = pr(sub.add_parser("exists", help="existence predicate for prime r"))
    ex.add_argument("--s", type=_nonnegative, required=True)

    con = pr(sub.add_parser("construct", help="build the map for a class list"))
    con.add_argument("--classes", required=True, help='e.g. "L(+,+),R{1,3}"')
    con.add_argument("--out", help="write the map as JSON here (default: stdout)")
    con.add_argument("--emit-graph", metavar="PATH", help="write the underlying graph as an edge list")

    iso = sub.add_parser("iso", help="decide whether two exported maps are isomorphic")
    iso.add_argument("first")
    iso.add_argument("second")
    return parser


# -- subcommands ---------------------------------------------------------------------


def cmd_factor(args, out) -> int:
    check_params(args.p, args.r)
    out.write(f"x^{args.r} - 1 over F_{args.p}: {len(cyclotomic_cosets(args.p, args.r))} factors\n")
    for poly, coset in factor_x_r_minus_1(args.p, args.r):
        flag = "self-reciprocal" if is_self_reciprocal(coset, args.r) else "-"
        out.write(f"{str(coset):<16} deg {poly.degree:<3} {flag:<16} {poly}\n")
    return 0


def cmd_irreps(args, out) -> int:
    check_params(args.p, args.r)
    classes = enumerate_irr(args.p, args.r)
    out.write(f"{'class':<20} {'degree':>6} {'end':>4} faithful\n")
    for cls in classes:
        out.write(f"{cls.signature:<20} {cls.degree:>6} {cls.end_degree:>4} "
                  f"{'yes' if cls.is_faithful() else 'no'}\n")
    out.write("degrees: " + ",".join(str(c.degree) for c in classes) + "\n")
    if args.orbits:
        seen = set()
        for cls in classes:
            if cls in seen:
                continue
            orbit = sorted(aut_orbit(cls, args.p, args.r))
            seen.update(orbit)
            out.write("orbit: {" + ", ".join(c.signature for c in orbit) + "}\n")
    return 0


def _census_cell(task):
    p, r, s, opts = task
    entries = census.classify_augmented(p, r, opts) if s == 0 else census.classify(p, r, s, opts)
    return s, entries


def _summary(entries, opts) -> str:
    word = "map" if len(entries) == 1 else "maps"
    line = f"{len(entries)} {word}"
    if entries and (opts.verify_graphs or opts.brute):
        wanted = (["graph", "decomp"] if opts.verify_graphs else []) + (["brute"] if opts.brute else [])
        if all(e.verified[k] for e in entries for k in wanted):
            line += ", all verified"
        else:
            line += ", not all verified"
    return line


def cmd_census(args, out) -> int:
    check_params(args.p, args.r)
    opts = census.CensusOptions(verify_graphs=args.verify_graphs, brute=args.brute,
                                allow_large_s=args.allow_large_s, max_group_order=args.max_group_order,
                                max_graph_vertices=args.max_graph_vertices, seed=args.seed)
    values = sorted(set(args.s))
    tasks = [(args.p, args.r, s, opts) for s in values]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_census_cell, tasks))
    else:
        results = [_census_cell(t) for t in tasks]
    levels = {"formula": True, "graph": opts.verify_graphs, "brute": opts.brute, "decomp": opts.verify_graphs}
    if args.out:
        if len(values) > 1:
            os.makedirs(args.out, exist_ok=True)
    for s, entries in results:
        if args.out:
            path = (os.path.join(args.out, f"census_p{args.p}_r{args.r}_s{s}.json")
                    if len(values) > 1 else args.out)
            census.write_census(entries, path, args.p, args.r, s, levels)
        prefix = f"census p={args.p} r={args.r} s={s}: "
        out.write(prefix + _summary(entries, opts) + "\n")
        for entry in entries:
            for finding in entry.findings:
                out.write(f"  finding {','.join(entry.classes)}: {finding}\n")
    return 0


def cmd_exists(args, out) -> int:
    report = census.existence(args.p, args.r, args.s)
    out.write(f"{'yes' if report.exists else 'no'} (zeta={report.zeta})\n")
    return 0


def cmd_construct(args, out) -> int:
    check_params(args.p, args.r)
    sigs = split_signature_list(args.classes)
    if not sigs:
        raise ParameterDomainError("--classes is empty")
    classes = [class_from_signature(sig, args.p, args.r) for sig in sigs]
    pair = build_from_classes(classes, args.p, args.r, args.max_group_order)
    graph_ref = None
    if args.emit_graph:
        graph = underlying_graph(build_map(pair))
        s = pair.group.n - 1
        delta = -1 if pair.group.element_order(pair.rho) == 2 else 1
        with open(args.emit_graph, "w") as fh:
            fh.write(edge_list_text(graph, PXParams(args.p, args.r, s, delta)))
        graph_ref = args.emit_graph
    doc = map_to_json(pair, graph_ref)
    text = json.dumps(doc, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        c = doc["counts"]
        out.write(f"map {','.join(doc['group']['classes'])}: |G|={pair.group.order} "
                  f"V={c['v']} E={c['e']} F={c['f']} chi={c['chi']}\n")
    else:
        out.write(text + "\n")
    return 0


def _load_map(path: str, max_order: int):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParameterDomainError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return map_from_json(data, max_order)


def cmd_iso(args, out) -> int:
    first = _load_map(args.first, args.max_group_order)
    second = _load_map(args.second, args.max_group_order)
    same, _ = maps_isomorphic(first, second)
    out.write("isomorphic\n" if same else "not isomorphic\n")
    return 0


COMMANDS = {
    "factor": cmd_factor,
    "irreps": cmd_irreps,
    "census": cmd_census,
    "exists": cmd_exists,
    "construct": cmd_construct,
    "iso": cmd_iso,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; map its status onto the domain code
        return 0 if exc.code == 0 else 2
    try:
        return COMMANDS[args.command](args, out)
    except PXMapsError as exc:
        message = str(exc).replace("\n", " ")
        if isinstance(exc, ParameterDomainError):
            message += f" ({DOMAIN_NOTE})"
        err.write(f"error[{exc.reason}]: {message}\n")
        if isinstance(exc, VerificationError) and exc.report:
            out.write(json.dumps({"discrepancy": exc.report}, sort_keys=True) + "\n")
        return exc.exit_code
    except OSError as exc:
        err.write(f"error[io]: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
