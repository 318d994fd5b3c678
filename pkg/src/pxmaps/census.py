"""Classification of rotary PX maps for one (p, r, s) cell.

Entries come from multiplicity-free class subsets.  Optional verification
levels build each map (graphs, decomposition, pairwise non-isomorphism) and
count Aut(G)-orbits of rotary pairs on every group of the right order
(brute).  Any disagreement raises VerificationError carrying a JSON report.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from importlib import metadata

from sympy import isprime

from .dihedral import (
    IrrClass,
    all_reps_of_degree,
    class_from_signature,
    enumerate_irr,
    is_gamma_minus_plus,
    multiplicity_free_reps,
    orbit_key,
)
from .errors import CensusFormatError, ParameterDomainError, VerificationError
from .ffpoly import check_params, multiplicative_order
from .groups import DEFAULT_MAX_GROUP_ORDER, automorphism_count, build_group
from .pxgraph import DEFAULT_MAX_GRAPH_VERTICES, PXParams, build_px, isomorphic
from .rotamap import build_from_classes, build_map, decompose, map_counts, maps_isomorphic, underlying_graph

SCHEMA_VERSION = 1


def tool_version() -> str:
    try:
        return f"artifact {metadata.version('artifact')}"
    except metadata.PackageNotFoundError:
        return "artifact (uninstalled)"


@dataclass
class CensusOptions:
    verify_graphs: bool = False
    brute: bool = False
    allow_large_s: bool = False
    max_group_order: int = DEFAULT_MAX_GROUP_ORDER
    max_graph_vertices: int = DEFAULT_MAX_GRAPH_VERTICES
    seed: int = 0


@dataclass
class CensusEntry:
    p: int
    r: int
    s: int
    delta: int
    classes: list[str]
    group_order: int
    counts: dict
    verified: dict = field(default_factory=lambda: {"graph": False, "brute": False, "decomp": False})
    findings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"classes": list(self.classes), "group_order": self.group_order, "delta": self.delta,
               "counts": dict(self.counts), "verified": dict(self.verified)}
        if self.findings:
            out["findings"] = list(self.findings)
        return out


@dataclass
class ExistenceReport:
    p: int
    r: int
    s: int
    d: int
    zeta: int
    exists: bool


# -- formula-level data ------------------------------------------------------------


def _has(classes, sa: int, sb: int) -> bool:
    return any(c.kind == "L" and c.signs == (sa, sb) for c in classes)


def formula_counts(classes, p: int, r: int) -> dict:
    """V, E, F, chi of the map attached to a class set, from element orders.

    rho has order 2 only for the lone class L(-,-).  rho*tau = (v, c) has
    order p*r exactly when v has a nonzero c-fixed component; c acts
    trivially only on L(+,+) and L(-,-), and generation forces v to be
    nonzero on both whenever they occur.
    """
    classes = list(classes)
    n = sum(c.degree for c in classes)
    order = 2 * r * p**n
    lone_reversal = len(classes) == 1 and _has(classes, -1, -1)
    rho_order = 2 if lone_reversal else 2 * p
    rt_order = p * r if (_has(classes, 1, 1) or _has(classes, -1, -1)) else r
    v, e, f = order // rho_order, order // 2, order // rt_order
    return {"v": v, "e": e, "f": f, "chi": v - e + f}


def _delta(classes) -> int:
    return -1 if len(classes) == 1 and _has(classes, -1, -1) else 1


def _entry(classes, p: int, r: int, s: int) -> CensusEntry:
    n = sum(c.degree for c in classes)
    return CensusEntry(p, r, s, _delta(classes), [c.signature for c in classes],
                       2 * r * p**n, formula_counts(classes, p, r))


def _check_cell(p: int, r: int, s: int, opts: CensusOptions):
    check_params(p, r)
    if s < 1:
        raise ParameterDomainError(f"s must be >= 1 for a PX census (got {s}); use the augmented census for s = 0")
    if s > r - 1 and not opts.allow_large_s:
        raise ParameterDomainError(
            f"s = {s} exceeds r - 1 = {r - 1}: C(p,r,s) is not arc-transitive; pass allow_large_s to explore")


# -- verification ----------------------------------------------------------------------


def _verify_built(entries, p: int, r: int, s: int, opts: CensusOptions, problems: list):
    targets: dict = {}
    pairs = []
    for entry in entries:
        classes = [class_from_signature(sig, p, r) for sig in entry.classes]
        pair = build_from_classes(classes, p, r, opts.max_group_order)
        pairs.append(pair)
        built = map_counts(pair)
        if built != entry.counts:
            problems.append({"classes": entry.classes, "check": "counts",
                             "expected": entry.counts, "found": built})
        got = [f.cls.signature for f in decompose(pair)]
        if got == entry.classes:
            entry.verified["decomp"] = True
        else:
            problems.append({"classes": entry.classes, "check": "decomposition", "found": got})
        if entry.delta not in targets:
            targets[entry.delta] = build_px(PXParams(p, r, s, entry.delta))
        graph = underlying_graph(build_map(pair))
        ok = isomorphic(graph, targets[entry.delta], max_vertices=opts.max_graph_vertices)
        if ok:
            entry.verified["graph"] = True
        else:
            mults = sorted(set(graph.edges.values()))
            report = {"classes": entry.classes, "check": "graph", "vertices": graph.n,
                      "edge_multiplicities": mults, "expected": f"C*({p},{r},{s},{entry.delta})",
                      "identified_as": _identify_graph(graph, p, r, s, opts)}
            problems.append(report)
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            same, _ = maps_isomorphic(pairs[i], pairs[j])
            if same:
                problems.append({"classes": [entries[i].classes, entries[j].classes],
                                 "check": "pairwise non-isomorphism"})


def _identify_graph(graph, p: int, r: int, s: int, opts: CensusOptions) -> str | None:
    """Name the graph when it is the PX graph of length p*r one level down."""
    if s < 1:
        return None
    candidate = PXParams(p, p * r, s - 1, 1)
    if isomorphic(graph, build_px(candidate), max_vertices=opts.max_graph_vertices):
        return f"C*({p},{p * r},{s - 1},1)"
    return None


def _verify_brute(entries, p: int, r: int, degree: int, opts: CensusOptions, problems: list):
    expected: dict = {}
    for entry in entries:
        key = orbit_key([class_from_signature(sig, p, r) for sig in entry.classes])
        expected[key] = expected.get(key, 0) + 1
    total = 0
    for classes in all_reps_of_degree(p, r, degree):
        key = orbit_key(classes)
        group = build_group(classes, p, r, opts.max_group_order)
        found = automorphism_count(group, seed=opts.seed).orbit_count
        total += found
        if found != expected.get(key, 0):
            problems.append({"check": "brute orbit count", "group": list(key),
                             "expected": expected.get(key, 0), "found": found})
    if total != len(entries):
        problems.append({"check": "brute total", "expected": len(entries), "found": total})
    return total


def _finish(entries, p: int, r: int, s: int, opts: CensusOptions, degree: int) -> list[CensusEntry]:
    problems: list = []
    if opts.verify_graphs:
        _verify_built(entries, p, r, s, opts, problems)
    if opts.brute:
        _verify_brute(entries, p, r, degree, opts, problems)
    if s > r - 1:
        # outside the arc-transitive range mismatches are findings, not failures
        for item in problems:
            for entry in entries:
                if item.get("classes") == entry.classes:
                    entry.findings.append(json.dumps(item, sort_keys=True))
        problems = [x for x in problems if "classes" not in x]
    if problems:
        raise VerificationError(
            f"census ({p},{r},{s}): {len(problems)} discrepancies",
            {"p": p, "r": r, "s": s, "discrepancies": problems})
    if opts.brute:
        bad = {tuple(x["group"]) for x in problems if x.get("check") == "brute orbit count"}
        for entry in entries:
            key = orbit_key([class_from_signature(sig, p, r) for sig in entry.classes])
            entry.verified["brute"] = key not in bad
    return entries


# -- public API -------------------------------------------------------------------------


def classify(p: int, r: int, s: int, options: CensusOptions | None = None) -> list[CensusEntry]:
    """One entry per multiplicity-free class subset of total degree s + 1."""
    opts = options or CensusOptions()
    _check_cell(p, r, s, opts)
    entries = [_entry(classes, p, r, s) for classes in multiplicity_free_reps(p, r, s + 1)]
    if s > r - 1:
        for entry in entries:
            entry.findings.append(f"s + 1 = {s + 1} > r = {r}: outside the arc-transitive range")
    return _finish(entries, p, r, s, opts, s + 1)


def classify_augmented(p: int, r: int, options: CensusOptions | None = None) -> list[CensusEntry]:
    """The s = 0 maps: one per linear class other than L(-,+)."""
    opts = options or CensusOptions()
    check_params(p, r)
    classes = [c for c in enumerate_irr(p, r) if c.kind == "L" and not is_gamma_minus_plus(c)]
    entries = [_entry((c,), p, r, 0) for c in classes]
    return _finish(entries, p, r, 0, opts, 1)


def irreducible_map_total(p: int, r: int) -> int:
    """Number of irreducible rotary augmented PX maps of length r."""
    check_params(p, r)
    return sum(1 for c in enumerate_irr(p, r) if not is_gamma_minus_plus(c))


def existence(p: int, r: int, s: int) -> ExistenceReport:
    """Whether a rotary map on C(p, r, s) exists, for prime r."""
    check_params(p, r)
    if not isprime(r):
        raise ParameterDomainError(f"existence needs r prime (got {r})")
    if s < 0 or r < max(3, s + 1):
        raise ParameterDomainError(f"existence needs r >= max(3, s + 1) (got r={r}, s={s})")
    d = multiplicative_order(p, r)
    zeta = d if d % 2 == 0 and pow(p, d // 2, r) == r - 1 else 2 * d
    return ExistenceReport(p, r, s, d, zeta, s % zeta in {zeta - 1, 0, 1})


# -- persistence --------------------------------------------------------------------------


def census_document(p: int, r: int, s: int, entries, levels: dict | None = None) -> dict:
    return {"schema": SCHEMA_VERSION, "tool": tool_version(), "p": p, "r": r, "s": s,
            "levels": dict(levels or {}), "entries": [e.to_json() for e in entries]}


def write_census(entries, path, p: int | None = None, r: int | None = None, s: int | None = None,
                 levels: dict | None = None) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    entries = list(entries)
    if entries:
        p, r, s = entries[0].p, entries[0].r, entries[0].s
    if p is None or r is None or s is None:
        raise ParameterDomainError("an empty census needs explicit p, r, s")
    doc = census_document(p, r, s, entries, levels)
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".census-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_census(path) -> list[CensusEntry]:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise CensusFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}: {context.strip()!r}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA_VERSION:
        found = doc.get("schema") if isinstance(doc, dict) else None
        raise CensusFormatError(f"{path}: schema version {found!r}, expected {SCHEMA_VERSION}")
    try:
        p, r, s = int(doc["p"]), int(doc["r"]), int(doc["s"])
        out = []
        for item in doc["entries"]:
            out.append(CensusEntry(p, r, s, int(item.get("delta", 1)), list(item["classes"]),
                                   int(item["group_order"]), dict(item["counts"]),
                                   dict(item["verified"]), list(item.get("findings", []))))
    except (KeyError, TypeError, ValueError) as exc:
        raise CensusFormatError(f"{path}: missing or malformed field: {exc}") from exc
    return out


def entry_classes(entry: CensusEntry) -> tuple[IrrClass, ...]:
    return tuple(class_from_signature(sig, entry.p, entry.r) for sig in entry.classes)


__all__ = [
    "CensusEntry",
    "CensusOptions",
    "ExistenceReport",
    "SCHEMA_VERSION",
    "classify",
    "classify_augmented",
    "entry_classes",
    "existence",
    "formula_counts",
    "irreducible_map_total",
    "read_census",
    "write_census",
]
