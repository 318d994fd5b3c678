"""Loop-free multigraphs, Praeger-Xu graphs and a small isomorphism tester.

Vertex (i, x_0 ... x_{s-1}) of C(p, r, s) is encoded as i * p^s + sum x_j p^j.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from sympy import isprime

from .errors import BudgetExceededError, ParameterDomainError, StructuralError

DEFAULT_MAX_GRAPH_VERTICES = 2000


@dataclass
class Multigraph:
    n: int
    edges: dict = field(default_factory=dict)  # (u, v) with u < v -> multiplicity

    @classmethod
    def from_pairs(cls, n: int, pairs) -> Multigraph:
        g = cls(n)
        for u, v in pairs:
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int, mult: int = 1):
        if u == v:
            raise StructuralError(f"loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) outside vertex range")
        key = (u, v) if u < v else (v, u)
        self.edges[key] = self.edges.get(key, 0) + mult

    @property
    def edge_count(self) -> int:
        return sum(self.edges.values())

    def is_simple(self) -> bool:
        return all(m == 1 for m in self.edges.values())

    def adjacency(self) -> list[dict]:
        adj = [dict() for _ in range(self.n)]
        for (u, v), m in self.edges.items():
            adj[u][v] = m
            adj[v][u] = m
        return adj

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for (u, v), m in self.edges.items():
            deg[u] += m
            deg[v] += m
        return deg

    def relabeled(self, perm) -> Multigraph:
        """Copy with vertex u renamed perm[u]."""
        g = Multigraph(self.n)
        for (u, v), m in self.edges.items():
            g.add_edge(perm[u], perm[v], m)
        return g

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(range(self.n))
        for (u, v), m in self.edges.items():
            for _ in range(m):
                g.add_edge(u, v)
        return g


@dataclass(frozen=True)
class PXParams:
    p: int
    r: int
    s: int
    delta: int = 1

    def __post_init__(self):
        # the graph family itself is defined without the p-does-not-divide-r rule
        if self.p == 2 or not isprime(self.p):
            raise ParameterDomainError(f"p must be an odd prime, got {self.p}")
        if self.r < 3:
            raise ParameterDomainError(f"r must be >= 3, got {self.r}")
        if self.s < 0:
            raise ParameterDomainError(f"s must be >= 0, got {self.s}")
        if self.delta not in (1, -1):
            raise ParameterDomainError(f"delta must be +1 or -1, got {self.delta}")


def build_px(params: PXParams) -> Multigraph:
    p, r, s = params.p, params.r, params.s
    if s == 0:
        if params.delta == 1:
            g = Multigraph(r)
            for i in range(r):
                g.add_edge(i, (i + 1) % r, p)
            return g
        m = p * r
        return Multigraph.from_pairs(m, ((i, (i + 1) % m) for i in range(m)))
    ps = p**s
    g = Multigraph(r * ps)
    for i in range(r):
        for x in range(p ** (s + 1)):
            # x = sum x_j p^j for j = 0..s; tail drops x_0, head drops x_s
            head = x % ps
            tail = x // p
            g.add_edge(i * ps + head, ((i + 1) % r) * ps + tail)
    return g


def px_vertex(i: int, xs, p: int) -> int:
    return i * p ** len(xs) + sum(int(x) * p**j for j, x in enumerate(xs))


# -- isomorphism -----------------------------------------------------------------


class _Refiner:
    """Colour refinement run on two graphs with a shared signature table, so
    equal colours mean the same thing on both sides."""

    def __init__(self, adj1, adj2):
        self.adj = (adj1, adj2)

    def refine(self, col1, col2):
        cols = [list(col1), list(col2)]
        ncls = len(set(cols[0]) | set(cols[1]))
        while True:
            table: dict = {}
            new = [[0] * len(cols[0]), [0] * len(cols[1])]
            for side in (0, 1):
                adj, col = self.adj[side], cols[side]
                for u in range(len(col)):
                    sig = (col[u], tuple(sorted(Counter((col[w], m) for w, m in adj[u].items()).items())))
                    new[side][u] = table.setdefault(sig, len(table))
            if Counter(new[0]) != Counter(new[1]):
                return None
            cols = new
            if len(table) == ncls:
                return cols
            ncls = len(table)


def find_isomorphism(g1: Multigraph, g2: Multigraph,
                     max_vertices: int = DEFAULT_MAX_GRAPH_VERTICES,
                     max_nodes: int = 200_000) -> list[int] | None:
    """A vertex bijection f with mult_g1(u, v) = mult_g2(f u, f v), or None."""
    if max(g1.n, g2.n) > max_vertices:
        raise BudgetExceededError(
            f"graph with {max(g1.n, g2.n)} vertices exceeds the isomorphism budget {max_vertices}"
        )
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return None
    if sorted(g1.degrees()) != sorted(g2.degrees()):
        return None
    if sorted(g1.edges.values()) != sorted(g2.edges.values()):
        return None
    adj1, adj2 = g1.adjacency(), g2.adjacency()
    refiner = _Refiner(adj1, adj2)
    start = refiner.refine([0] * g1.n, [0] * g2.n)
    if start is None:
        return None
    nodes = [0]

    def search(c1, c2):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise BudgetExceededError("isomorphism search exceeded its node budget")
        cells: dict = {}
        for u, c in enumerate(c1):
            cells.setdefault(c, []).append(u)
        target = None
        for c, members in cells.items():
            if len(members) > 1 and (target is None or len(members) < len(cells[target])):
                target = c
        if target is None:
            pos2 = {c: v for v, c in enumerate(c2)}
            f = [pos2[c] for c in c1]
            return f if _is_isomorphism(g1, adj2, f) else None
        u = cells[target][0]
        fresh = max(max(c1), max(c2)) + 1
        for v in (w for w, c in enumerate(c2) if c == target):
            n1, n2 = list(c1), list(c2)
            n1[u] = fresh
            n2[v] = fresh
            refined = refiner.refine(n1, n2)
            if refined is None:
                continue
            found = search(*refined)
            if found is not None:
                return found
        return None

    return search(*start)


def _is_isomorphism(g1: Multigraph, adj2, f) -> bool:
    if len(set(f)) != len(f):
        return False
    total = 0
    for (u, v), m in g1.edges.items():
        if adj2[f[u]].get(f[v], 0) != m:
            return False
        total += 1
    return total == sum(len(a) for a in adj2) // 2


def isomorphic(g1: Multigraph, g2: Multigraph, **kw) -> bool:
    return find_isomorphism(g1, g2, **kw) is not None


# -- export --------------------------------------------------------------------


def edge_list_text(g: Multigraph, params: PXParams | None = None) -> str:
    p, r, s, delta = (params.p, params.r, params.s, params.delta) if params else (0, 0, 0, 0)
    lines = [f"{p} {r} {s} {delta} {g.n}"]
    lines += [f"{u} {v} {m}" for (u, v), m in sorted(g.edges.items())]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[tuple[int, int, int, int], Multigraph]:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 5:
        raise ValueError("edge list needs a header 'p r s delta |V|'")
    p, r, s, delta, n = map(int, rows[0])
    g = Multigraph(n)
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ValueError(f"line {k}: expected 'u v m'")
        u, v, m = map(int, row)
        g.add_edge(u, v, m)
    return (p, r, s, delta), g
