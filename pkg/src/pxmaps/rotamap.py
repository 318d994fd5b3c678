"""Rotary maps from rotary pairs: coset maps, isomorphism, quotients, products
and decomposition into irreducible factors.

Normal form.  Every rotary pair met here has reflections as the dihedral
parts of rho and tau.  ``normalize`` twists the group by the automorphism of
D_2r taking (a, b) = (cb, b) to those parts, moves the module onto the
canonical realization of its class multiset and conjugates by V so that
tau = (0, b).  Two pairs then give isomorphic maps iff their normal forms do.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .dihedral import (
    A,
    B,
    C,
    IrrClass,
    MatrixRep,
    aut_mapping,
    class_from_signature,
    coset_polynomial,
    d_order,
    direct_sum,
    enumerate_irr,
    intertwiners,
    realize,
)
from .errors import InternalError, ParameterDomainError, StructuralError, VerificationError
from .groups import (
    DEFAULT_MAX_GROUP_ORDER,
    AffineGroup,
    GElem,
    build_group,
    extend_assignment,
)
from .pxgraph import Multigraph


@dataclass(frozen=True, eq=False)
class RotaryPair:
    group: AffineGroup
    rho: GElem
    tau: GElem

    def __post_init__(self):
        if self.group.element_order(self.tau) != 2:
            raise StructuralError("tau must be an involution")
        if not self.group.generates_fast(self.rho, self.tau):
            raise StructuralError("rho and tau do not generate the group")

    @property
    def p(self):
        return self.group.p

    @property
    def r(self):
        return self.group.r


@dataclass(frozen=True)
class MapIsoWitness:
    rho_image: GElem
    tau_image: GElem
    bijection: np.ndarray


# -- module helpers ------------------------------------------------------------


def identify_classes(rep: MatrixRep) -> tuple[IrrClass, ...]:
    """Class multiset of a (semisimple) representation, read off from
    dim Hom_D(U, V) / dim End_D(U) for every irreducible U."""
    out = []
    for cls in enumerate_irr(rep.p, rep.r):
        hom = len(intertwiners(realize(cls, rep.p), rep))
        if hom % cls.end_degree:
            raise InternalError(f"Hom dimension {hom} not a multiple of End degree for {cls}")
        out += [cls] * (hom // cls.end_degree)
    if sum(c.degree for c in out) != rep.degree:
        raise InternalError("class multiset does not account for the whole module")
    return tuple(sorted(out))


@lru_cache(maxsize=256)
def canonical_group(classes: tuple[IrrClass, ...], p: int, r: int,
                    max_order: int = DEFAULT_MAX_GROUP_ORDER) -> AffineGroup:
    return build_group(classes, p, r, max_order=max_order)


def module_isomorphism(src: MatrixRep, dst: MatrixRep, seed: int = 0, tries: int = 400) -> np.ndarray:
    """Invertible X with X src(g) = dst(g) X (seeded random search in Hom_D)."""
    basis = intertwiners(src, dst)
    if not basis or src.degree != dst.degree:
        raise InternalError("representations are not isomorphic")
    p = src.p
    rng = np.random.default_rng(seed)
    for k in range(tries):
        coeffs = rng.integers(0, p, len(basis)) if k else np.eye(len(basis), dtype=np.int64)[0]
        x = sum(int(c) * m for c, m in zip(coeffs, basis)) % p
        if linalg.rank(x, p) == src.degree:
            return x
    raise InternalError("no invertible intertwiner found")


def equivariant_projection(rep: MatrixRep, sub: np.ndarray) -> np.ndarray:
    """D-equivariant projection of V onto the invariant subspace spanned by the
    rows of ``sub``: average a coordinate projection over all 2r matrices."""
    p, n, r = rep.p, rep.degree, rep.r
    k = sub.shape[0]
    if k == 0:
        return np.zeros((n, n), dtype=np.int64)
    # extend sub to a basis with standard vectors, project along the extra ones
    basis = sub.copy()
    for j in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[j] = 1
        if basis.shape[0] == n:
            break
        if not linalg.in_span(basis, e, p):
            basis = np.vstack([basis, e])
    bt_inv = linalg.inverse(basis.T % p, p)
    keep = np.zeros((n, n), dtype=np.int64)
    keep[:k, :k] = linalg.identity(k)
    pi0 = basis.T @ keep @ bt_inv % p
    total = np.zeros((n, n), dtype=np.int64)
    for e in (0, 1):
        for i in range(r):
            m = rep.image((i, e))
            total = (total + m @ pi0 @ linalg.inverse(m, p)) % p
    return total * pow(2 * r, -1, p) % p


def _is_invariant(rep: MatrixRep, sub: np.ndarray) -> bool:
    p = rep.p
    for m in (rep.mat_c, rep.mat_b):
        for v in sub:
            if not linalg.in_span(sub, m @ v % p, p):
                return False
    return True


def _restrict(rep: MatrixRep, sub: np.ndarray) -> MatrixRep:
    """Representation on an invariant subspace, in the coordinates of its rows."""
    p = rep.p
    k = sub.shape[0]
    mats = []
    for m in (rep.mat_c, rep.mat_b):
        out = np.zeros((k, k), dtype=np.int64)
        for j, v in enumerate(sub):
            out[:, j] = linalg.coordinates(sub, m @ v % p, p)
        mats.append(out)
    return MatrixRep(p, rep.r, mats[0], mats[1])


def _poly_at(coeffs, mat: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros_like(mat)
    for c in reversed(coeffs):
        out = (out @ mat + c * linalg.identity(mat.shape[0])) % p
    return out


def _intersect(sub: np.ndarray, operator: np.ndarray, p: int) -> np.ndarray:
    """Rows spanning {x in rowspace(sub) : operator x = 0}."""
    if sub.shape[0] == 0:
        return sub
    ns = linalg.nullspace(operator @ sub.T % p, p)
    if ns.shape[0] == 0:
        return np.zeros((0, sub.shape[1]), dtype=np.int64)
    return linalg.row_basis(ns @ sub % p, p)


# -- construction ----------------------------------------------------------------


def construct_rotary(group: AffineGroup, x=A, y=B) -> RotaryPair:
    """(v x, y) with v the first nonzero fixed vector of M(x); when M(x) has no
    fixed vector (the reversal character) rho = (e_1, x) is an involution."""
    if d_order(x, group.r) != 2 or d_order(y, group.r) != 2 or x[1] != 1 or y[1] != 1:
        raise ParameterDomainError("x and y must be reflections")
    p, n = group.p, group.n
    fixed = linalg.nullspace((group.matrix(x) - linalg.identity(n)) % p, p)
    if fixed.shape[0]:
        v = fixed[0]
    else:
        v = np.zeros(n, dtype=np.int64)
        v[0] = 1
    rho = group.elem(v, *x)
    tau = group.elem([0] * n, *y)
    return RotaryPair(group, rho, tau)


def normalize(pair: RotaryPair, max_order: int | None = None) -> RotaryPair:
    g = pair.group
    p, r, n = g.p, g.r, g.n
    x, y = pair.rho.d, pair.tau.d
    if x[1] != 1 or y[1] != 1:
        raise ParameterDomainError("normal form needs reflections as dihedral parts")
    sigma = aut_mapping((A, B), (x, y), r)
    twisted = g.rep.twisted(sigma)
    classes = identify_classes(twisted)
    target = canonical_group(classes, p, r, max_order or g.max_order)
    xmat = module_isomorphism(twisted, target.rep)
    v = xmat @ np.array(pair.rho.v) % p
    w = xmat @ np.array(pair.tau.v) % p
    rho = target.elem(v, *A)
    tau = target.elem(w, *B)
    # conjugating by u = -w/2 clears tau's vector since M(b) w = -w
    u = target.elem((-w * pow(2, -1, p)) % p, 0, 0)
    conj = lambda h: target.multiply(target.multiply(u, h), target.inverse(u))  # noqa: E731
    rho, tau = conj(rho), conj(tau)
    if any(tau.v):
        raise InternalError("normalization left tau with a vector part")
    return RotaryPair(target, rho, tau)


def direct_product(pairs, max_order: int | None = None) -> RotaryPair:
    """The pair generating the subgroup <(rho_i), (tau_i)> of the product,
    realized again as Z_p^d x| D_2r and returned in normal form."""
    pairs = list(pairs)
    if not pairs:
        raise ParameterDomainError("direct product of no maps")
    p, r = pairs[0].p, pairs[0].r
    if any(q.p != p or q.r != r for q in pairs):
        raise ParameterDomainError("all factors must share p and r")
    budget = max_order or pairs[0].group.max_order
    normed = [normalize(q, budget) for q in pairs]
    rep = direct_sum([q.group.rep for q in normed], p, r)
    big = AffineGroup(rep, None, max_order=budget)
    v_rho = np.concatenate([np.array(q.rho.v, dtype=np.int64) for q in normed])
    rho = big.elem(v_rho, *A)
    tau = big.elem([0] * rep.degree, *B)
    w_basis = big.schreier_span([rho, tau])
    n, k = rep.degree, w_basis.shape[0]
    if k == 0:
        raise InternalError("product subgroup meets V trivially")
    if k < n:
        # find u with v_rho + (I - M(a)) u in W; tau's vector is already zero
        # and (I - M(b)) u must also land in W
        eye = linalg.identity(n)
        ia = (eye - big.matrix(A)) % p
        ib = (eye - big.matrix(B)) % p
        zeros = np.zeros((n, k), dtype=np.int64)
        system = np.block([[ia, -w_basis.T % p, zeros], [ib, zeros, -w_basis.T % p]]) % p
        rhs = np.concatenate([-v_rho % p, np.zeros(n, dtype=np.int64)])
        sol = linalg.solve(system, rhs, p)
        if sol is None:
            raise InternalError("no conjugating vector found for the product subgroup")
        u = sol[:n]
        v_new = (v_rho + ia @ u) % p
        sub_rep = _restrict(rep, w_basis)
        sub = AffineGroup(sub_rep, None, max_order=budget)
        rho = sub.elem(linalg.coordinates(w_basis, v_new, p), *A)
        tau = sub.elem(linalg.coordinates(w_basis, ib @ u % p, p), *B)
        return normalize(RotaryPair(sub, rho, tau), budget)
    return normalize(RotaryPair(big, rho, tau), budget)


def build_from_classes(classes, p: int, r: int, max_order: int = DEFAULT_MAX_GROUP_ORDER) -> RotaryPair:
    """Product of the irreducible constructions for a set of classes."""
    classes = sorted(classes)
    if len(set(classes)) != len(classes):
        raise ParameterDomainError("class list must be multiplicity-free")
    parts = [construct_rotary(canonical_group((c,), p, r, max_order)) for c in classes]
    if len(parts) == 1:
        return normalize(parts[0], max_order)
    return direct_product(parts, max_order)


# -- quotients and decomposition -----------------------------------------------------


def quotient_map(pair: RotaryPair, sub: np.ndarray) -> RotaryPair:
    """The pair induced on G / W for an invariant subspace W (rows of ``sub``),
    realized on the invariant complement given by the averaged projection."""
    g = pair.group
    p, n = g.p, g.n
    sub = linalg.row_basis(np.asarray(sub, dtype=np.int64).reshape(-1, n), p, n)
    if not _is_invariant(g.rep, sub):
        raise ParameterDomainError("quotient needs a D-invariant subspace")
    if sub.shape[0] == n:
        raise ParameterDomainError("quotient by all of V leaves no module")
    proj = equivariant_projection(g.rep, sub)
    comp_proj = (linalg.identity(n) - proj) % p
    comp = linalg.row_basis(comp_proj.T, p, n)
    quot_rep = _restrict(g.rep, comp)

    def image(h: GElem) -> GElem:
        coords = linalg.coordinates(comp, comp_proj @ np.array(h.v) % p, p)
        return GElem(tuple(int(c) for c in coords), h.i, h.e)

    quot = AffineGroup(quot_rep, identify_classes(quot_rep), max_order=g.max_order)
    return RotaryPair(quot, image(pair.rho), image(pair.tau))


def _seed_space(rep: MatrixRep, rest: np.ndarray, cls: IrrClass) -> np.ndarray:
    p, n = rep.p, rep.degree
    eye = linalg.identity(n)
    if cls.kind == "L":
        sa, sb = cls.signs
        sub = _intersect(rest, (rep.mat_c - sa * sb * eye) % p, p)
        return _intersect(sub, (rep.mat_b - sb * eye) % p, p)
    f = coset_polynomial(p, rep.r, cls.coset)
    sub = _intersect(rest, _poly_at(f.coeffs, rep.mat_c, p), p)
    if cls.kind == "R":
        sub = _intersect(sub, (rep.mat_b - eye) % p, p)
    return sub


def _tag(rep: MatrixRep) -> IrrClass:
    """Class of an irreducible representation from the cosets supporting the
    characteristic polynomial of c, plus the action of b in degree 1."""
    p, r = rep.p, rep.r
    support = []
    for cls in enumerate_irr(p, r):
        if cls.kind == "L":
            continue
        for coset in {cls.coset, cls.coset.negated()}:
            f = coset_polynomial(p, r, coset)
            if linalg.rank(_poly_at(f.coeffs, rep.mat_c, p), p) < rep.degree:
                support.append((cls, coset))
    if rep.degree == 1:
        sc, sb = int(rep.mat_c[0, 0]), int(rep.mat_b[0, 0])
        to_sign = lambda z: 1 if z == 1 else -1  # noqa: E731
        return IrrClass("L", r, signs=(to_sign(sc) * to_sign(sb), to_sign(sb)))
    found = {cls for cls, _ in support}
    if len(found) != 1:
        raise VerificationError(f"submodule of degree {rep.degree} is not irreducible (support {found})")
    (cls,) = found
    if cls.degree != rep.degree:
        raise VerificationError(f"submodule degree {rep.degree} does not match {cls}")
    return cls


@dataclass
class Factor:
    cls: IrrClass
    submodule: np.ndarray
    pair: RotaryPair


def decompose_module(rep: MatrixRep) -> list[tuple[IrrClass, np.ndarray]]:
    """Irreducible submodules U_1 ... U_k with V their direct sum."""
    p, n = rep.p, rep.degree
    gens = [rep.mat_c, rep.mat_b]
    found: list[np.ndarray] = []
    rest = linalg.identity(n)
    while rest.shape[0]:
        seed = None
        for cls in enumerate_irr(p, rep.r):
            space = _seed_space(rep, rest, cls)
            if space.shape[0]:
                seed = space[0]
                break
        if seed is None:
            raise InternalError("no irreducible seed in a nonzero invariant complement")
        u = linalg.spin([seed], gens, p, n)
        found.append(u)
        total = linalg.row_basis(np.vstack(found), p)
        proj = equivariant_projection(rep, total)
        rest = linalg.row_basis(((linalg.identity(n) - proj) % p).T, p, n)
    return [(_tag(_restrict(rep, u)), u) for u in found]


def decompose(pair: RotaryPair) -> list[Factor]:
    """Irreducible factor maps M / (sum of the other summands), in class order."""
    g = pair.group
    parts = decompose_module(g.rep)
    factors = []
    for idx, (cls, u) in enumerate(parts):
        others = [w for j, (_, w) in enumerate(parts) if j != idx]
        sub = np.vstack(others) if others else np.zeros((0, g.n), dtype=np.int64)
        q = quotient_map(pair, sub) if others else pair
        qclasses = identify_classes(q.group.rep)
        if qclasses != (cls,):
            raise VerificationError(f"factor tagged {cls} but quotient has classes {qclasses}")
        factors.append(Factor(cls, u, q))
    factors.sort(key=lambda f: f.cls.sort_key())
    return factors


# -- coset maps --------------------------------------------------------------------


@dataclass
class CosetMap:
    pair: RotaryPair
    vertex_of: np.ndarray
    edge_of: np.ndarray
    face_of: np.ndarray
    n_vertices: int
    n_edges: int
    n_faces: int

    @property
    def counts(self) -> dict:
        return {"v": self.n_vertices, "e": self.n_edges, "f": self.n_faces,
                "chi": self.n_vertices - self.n_edges + self.n_faces}


def _coset_labels(group: AffineGroup, h: GElem) -> tuple[np.ndarray, int]:
    hc = np.full(group.order, group.code(h), dtype=np.int64)
    cur = np.arange(group.order, dtype=np.int64)
    best = cur.copy()
    for _ in range(group.element_order(h) - 1):
        cur = group.mul_codes(cur, hc)
        best = np.minimum(best, cur)
    uniq, labels = np.unique(best, return_inverse=True)
    return labels.reshape(-1), uniq.size


def build_map(pair: RotaryPair) -> CosetMap:
    g = pair.group
    g._require_tables()
    rt = g.multiply(pair.rho, pair.tau)
    vertex_of, nv = _coset_labels(g, pair.rho)
    edge_of, ne = _coset_labels(g, pair.tau)
    face_of, nf = _coset_labels(g, rt)
    cmap = CosetMap(pair, vertex_of, edge_of, face_of, nv, ne, nf)
    expected = map_counts(pair)
    if cmap.counts != expected:
        raise InternalError(f"coset counts {cmap.counts} differ from index formulas {expected}")
    tau_perm = g.mul_codes(np.arange(g.order), np.full(g.order, g.code(pair.tau)))
    if np.any(vertex_of == vertex_of[tau_perm]):
        raise StructuralError("edge coset meets a single vertex coset (loop)")
    return cmap


def underlying_graph(cmap: CosetMap) -> Multigraph:
    g = cmap.pair.group
    tau_perm = g.mul_codes(np.arange(g.order), np.full(g.order, g.code(cmap.pair.tau)))
    reps = np.arange(g.order)[np.arange(g.order) < tau_perm]  # one element per edge coset
    graph = Multigraph(cmap.n_vertices)
    ends = np.stack([cmap.vertex_of[reps], cmap.vertex_of[tau_perm[reps]]], axis=1)
    ends.sort(axis=1)
    keys, mult = np.unique(ends, axis=0, return_counts=True)
    for (u, v), m in zip(keys, mult):
        graph.add_edge(int(u), int(v), int(m))
    if graph.edge_count != cmap.n_edges:
        raise InternalError("edge count of the underlying graph disagrees with the map")
    return graph


def map_counts(pair: RotaryPair) -> dict:
    """Vertex, edge and face counts from element orders (no coset enumeration)."""
    g = pair.group
    rt = g.multiply(pair.rho, pair.tau)
    v = g.order // g.element_order(pair.rho)
    e = g.order // 2
    f = g.order // g.element_order(rt)
    return {"v": v, "e": e, "f": f, "chi": v - e + f}


def euler_characteristic(cmap: CosetMap) -> int:
    chi = cmap.n_vertices - cmap.n_edges + cmap.n_faces
    if chi % 2:
        raise StructuralError(f"odd Euler characteristic {chi}")
    return chi


# -- isomorphism -----------------------------------------------------------------------


def maps_isomorphic(p1: RotaryPair, p2: RotaryPair) -> tuple[bool, MapIsoWitness | None]:
    """Whether rho1 -> rho2, tau1 -> tau2 extends to a group isomorphism."""
    g1, g2 = p1.group, p2.group
    if (g1.order != g2.order or g1.p != g2.p
            or g1.element_order(p1.rho) != g2.element_order(p2.rho)
            or g1.element_order(g1.multiply(p1.rho, p1.tau))
            != g2.element_order(g2.multiply(p2.rho, p2.tau))):
        return False, None
    g1._require_tables()
    table = extend_assignment(g1, p1.rho, p1.tau, g2, p2.rho, p2.tau)
    if table is None:
        return False, None
    return True, MapIsoWitness(p2.rho, p2.tau, table)


# -- JSON export -------------------------------------------------------------------------


def map_to_json(pair: RotaryPair, graph_ref: str | None = None) -> dict:
    g = pair.group
    classes = g.classes if g.classes is not None else identify_classes(g.rep)
    return {
        "group": {
            "p": g.p,
            "r": g.r,
            "classes": [c.signature for c in classes],
            "mat_c": g.rep.mat_c.tolist(),
            "mat_b": g.rep.mat_b.tolist(),
        },
        "rho": pair.rho.as_list(),
        "tau": pair.tau.as_list(),
        "counts": map_counts(pair),
        "graph": graph_ref,
    }


def map_from_json(data: dict, max_order: int = DEFAULT_MAX_GROUP_ORDER) -> RotaryPair:
    try:
        grp = data["group"]
        p, r = int(grp["p"]), int(grp["r"])
        rep = MatrixRep(p, r, linalg.as_matrix(grp["mat_c"], p), linalg.as_matrix(grp["mat_b"], p))
        rho, tau = data["rho"], data["tau"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterDomainError(f"malformed map record: {exc}") from exc
    if not rep.relations_hold():
        raise ParameterDomainError("map record matrices violate the dihedral relations")
    classes = identify_classes(rep)
    declared = tuple(sorted(class_from_signature(s, p, r) for s in grp.get("classes", [])))
    if grp.get("classes") is not None and declared != classes:
        raise VerificationError(f"declared classes {grp['classes']} differ from the matrices")
    g = AffineGroup(rep, classes, max_order=max_order)
    n = rep.degree
    return RotaryPair(g, g.elem(rho[:n], rho[n], rho[n + 1]), g.elem(tau[:n], tau[n], tau[n + 1]))


__all__ = [
    "C",
    "CosetMap",
    "Factor",
    "MapIsoWitness",
    "RotaryPair",
    "build_from_classes",
    "build_map",
    "canonical_group",
    "construct_rotary",
    "decompose",
    "decompose_module",
    "direct_product",
    "equivariant_projection",
    "euler_characteristic",
    "identify_classes",
    "map_counts",
    "map_from_json",
    "map_to_json",
    "maps_isomorphic",
    "module_isomorphism",
    "normalize",
    "quotient_map",
    "underlying_graph",
]
