"""Arithmetic in G = Z_p^n x| D_2r, rotary-pair enumeration and Aut(G) counting.

An element is ``(v, i, e)`` standing for (v, c^i b^e) with product
(v1, d1)(v2, d2) = (v1 + M(d1) v2, d1 d2).  For bulk work every element also
has an integer code ``vcode + p^n * (i + r e)`` and the group keeps lookup
tables indexed by codes; those tables are only built on demand and are
guarded by an order budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .dihedral import (
    IrrClass,
    MatrixRep,
    aut_action,
    aut_group,
    d_elements,
    d_generated,
    d_index,
    d_inv,
    d_mul,
    d_order,
    direct_sum,
    generating_reflection_pairs,
    intertwiners,
    realize,
)
from .errors import BudgetExceededError, InternalError, VerificationError
from .ffpoly import check_params, euler_totient

DEFAULT_MAX_GROUP_ORDER = 200_000


@dataclass(frozen=True)
class GElem:
    v: tuple
    i: int
    e: int

    @property
    def d(self):
        return (self.i, self.e)

    def as_list(self) -> list[int]:
        return [*map(int, self.v), int(self.i), int(self.e)]


class AffineGroup:
    def __init__(self, rep: MatrixRep, classes: tuple[IrrClass, ...] | None = None,
                 max_order: int = DEFAULT_MAX_GROUP_ORDER):
        check_params(rep.p, rep.r)
        self.rep = rep
        self.p = rep.p
        self.r = rep.r
        self.n = rep.degree
        self.classes = tuple(classes) if classes is not None else None
        self.max_order = max_order
        self.nv = self.p**self.n
        self.order = self.nv * 2 * self.r
        self.d_list = d_elements(self.r)
        self.mats = np.stack([rep.image(d) for d in self.d_list])

    def __repr__(self):
        cls = ",".join(c.signature for c in self.classes) if self.classes else "?"
        return f"AffineGroup(p={self.p}, r={self.r}, n={self.n}, classes=[{cls}])"

    # -- element level -------------------------------------------------------

    def identity(self) -> GElem:
        return GElem((0,) * self.n, 0, 0)

    def elem(self, v, i: int, e: int) -> GElem:
        return GElem(tuple(int(x) % self.p for x in v), i % self.r, e % 2)

    def matrix(self, d) -> np.ndarray:
        return self.mats[d_index(d, self.r)]

    def multiply(self, g: GElem, h: GElem) -> GElem:
        w = (np.array(g.v) + self.matrix(g.d) @ np.array(h.v)) % self.p
        i, e = d_mul(g.d, h.d, self.r)
        return GElem(tuple(int(x) for x in w), i, e)

    def inverse(self, g: GElem) -> GElem:
        di = d_inv(g.d, self.r)
        w = (-(self.matrix(di) @ np.array(g.v))) % self.p
        return GElem(tuple(int(x) for x in w), *di)

    def power(self, g: GElem, k: int) -> GElem:
        if k < 0:
            g, k = self.inverse(g), -k
        out = self.identity()
        base = g
        while k:
            if k & 1:
                out = self.multiply(out, base)
            base = self.multiply(base, base)
            k >>= 1
        return out

    def _orbit_sum(self, d) -> np.ndarray:
        k = d_order(d, self.r)
        m = self.matrix(d)
        total = np.zeros((self.n, self.n), dtype=np.int64)
        acc = linalg.identity(self.n)
        for _ in range(k):
            total = (total + acc) % self.p
            acc = acc @ m % self.p
        return total

    def element_order(self, g: GElem) -> int:
        k = d_order(g.d, self.r)
        if np.any(self._orbit_sum(g.d) @ np.array(g.v) % self.p):
            return k * self.p
        return k

    def code(self, g: GElem) -> int:
        vc = int(linalg.encode(np.array(g.v, dtype=np.int64), self.p)) if self.n else 0
        return vc + self.nv * d_index(g.d, self.r)

    def decode(self, code: int) -> GElem:
        code = int(code)
        vc, di = code % self.nv, code // self.nv
        v = linalg.decode(np.array(vc), self.p, self.n)
        return GElem(tuple(int(x) for x in v), di % self.r, di // self.r)

    # -- generation tests ----------------------------------------------------

    def schreier_span(self, gens) -> np.ndarray:
        """Echelon basis of <gens> intersected with V, via Schreier generators."""
        r = self.r
        trans = {(0, 0): self.identity()}
        queue = [(0, 0)]
        while queue:
            d = queue.pop()
            for g in gens:
                nd = d_mul(d, g.d, r)
                if nd not in trans:
                    trans[nd] = self.multiply(trans[d], g)
                    queue.append(nd)
        vecs = []
        for d, t in trans.items():
            for g in gens:
                s = self.multiply(self.multiply(t, g), self.inverse(trans[d_mul(d, g.d, r)]))
                if s.d != (0, 0):
                    raise InternalError("Schreier generator outside V")
                vecs.append(s.v)
        return linalg.row_basis(np.array(vecs, dtype=np.int64), self.p, self.n)

    def generates_fast(self, g: GElem, h: GElem) -> bool:
        if len(d_generated([g.d, h.d], self.r)) != 2 * self.r:
            return False
        return self.schreier_span([g, h]).shape[0] == self.n

    def generates(self, g: GElem, h: GElem) -> bool:
        """Breadth-first closure of {g, h}; compares the closure size to |G|."""
        self._require_tables()
        seen = np.zeros(self.order, dtype=bool)
        gens = np.array([self.code(g), self.code(h)], dtype=np.int64)
        frontier = np.array([0], dtype=np.int64)
        seen[0] = True
        count = 1
        while frontier.size:
            nxt = self.mul_codes(np.repeat(frontier, 2), np.tile(gens, frontier.size))
            nxt = np.unique(nxt)
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            count += nxt.size
            frontier = nxt
        return count == self.order

    # -- code tables ---------------------------------------------------------

    def _require_tables(self):
        if self.order > self.max_order:
            raise BudgetExceededError(
                f"|G| = {self.order} exceeds the group-order budget {self.max_order}"
            )

    @cached_property
    def all_vectors(self) -> np.ndarray:
        self._require_tables()
        return linalg.all_vectors(self.p, self.n)

    @cached_property
    def act_table(self) -> np.ndarray:
        """act_table[d, vcode] = code of M(d) v."""
        vs = self.all_vectors
        return np.stack([linalg.encode(vs @ m.T % self.p, self.p) for m in self.mats])

    @cached_property
    def d_mul_table(self) -> np.ndarray:
        r = self.r
        t = np.empty((2 * r, 2 * r), dtype=np.int64)
        for x in self.d_list:
            for y in self.d_list:
                t[d_index(x, r), d_index(y, r)] = d_index(d_mul(x, y, r), r)
        return t

    def add_vcodes(self, a, b) -> np.ndarray:
        va = linalg.decode(a, self.p, self.n)
        vb = linalg.decode(b, self.p, self.n)
        return linalg.encode((va + vb) % self.p, self.p)

    def mul_codes(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        va, da = a % self.nv, a // self.nv
        vb, db = b % self.nv, b // self.nv
        v = self.add_vcodes(va, self.act_table[da, vb])
        return v + self.nv * self.d_mul_table[da, db]

    def right_mult_perm(self, g: GElem) -> np.ndarray:
        return self.mul_codes(np.arange(self.order), np.full(self.order, self.code(g)))

    @cached_property
    def orbit_sum_table(self) -> np.ndarray:
        vs = self.all_vectors
        return np.stack([linalg.encode(vs @ self._orbit_sum(d).T % self.p, self.p)
                         for d in self.d_list])

    @cached_property
    def orders(self) -> np.ndarray:
        """Element orders indexed by code."""
        out = np.empty(self.order, dtype=np.int64)
        for d in self.d_list:
            di = d_index(d, self.r)
            k = d_order(d, self.r)
            nz = self.orbit_sum_table[di] != 0
            out[di * self.nv:(di + 1) * self.nv] = np.where(nz, k * self.p, k)
        return out

    @cached_property
    def cyclic_submodule_ids(self) -> tuple[np.ndarray, np.ndarray]:
        """(ids, bases): ids[vcode] labels the D-submodule generated by the vector;
        bases[id] is its canonical n x n reduced basis."""
        vs = self.all_vectors
        stack = np.einsum("dij,bj->bdi", self.mats, vs) % self.p
        canon, _ = linalg.batched_rref(stack, self.p)
        flat = canon.reshape(canon.shape[0], -1)
        uniq, ids = np.unique(flat, axis=0, return_inverse=True)
        return ids.reshape(-1), uniq.reshape(-1, self.n, self.n)

    def _full_join(self, ida: np.ndarray, idb: np.ndarray) -> np.ndarray:
        """For arrays of submodule ids, whether the two submodules sum to V."""
        _, bases = self.cyclic_submodule_ids
        k = bases.shape[0]
        key = ida * k + idb
        uniq, inv = np.unique(key, return_inverse=True)
        stack = np.concatenate([bases[uniq // k], bases[uniq % k]], axis=1)
        full = linalg.batched_rank(stack, self.p) == self.n
        return full[inv.reshape(-1)]

    # -- structure -----------------------------------------------------------

    def fixed_dimension(self) -> int:
        """dim of the subspace of V fixed by all of D."""
        eye = linalg.identity(self.n)
        a = np.vstack([(self.rep.mat_c - eye) % self.p, (self.rep.mat_b - eye) % self.p])
        return linalg.nullspace(a, self.p).shape[0]

    def endomorphism_dimension(self) -> int:
        return len(intertwiners(self.rep, self.rep))


def build_group(classes, p: int, r: int, max_order: int = DEFAULT_MAX_GROUP_ORDER) -> AffineGroup:
    classes = tuple(sorted(classes))
    rep = direct_sum([realize(c, p, r) for c in classes], p, r)
    return AffineGroup(rep, classes, max_order=max_order)


# -- rotary pairs -------------------------------------------------------------


@dataclass
class PairSet:
    group: AffineGroup
    rho: np.ndarray
    tau: np.ndarray
    rho_order: int | None

    def __len__(self):
        return int(self.rho.size)

    @cached_property
    def keys(self) -> np.ndarray:
        return self.rho * self.group.order + self.tau

    def index_of(self, rho_codes, tau_codes) -> np.ndarray:
        """Positions of the given pairs in this set (-1 where absent)."""
        keys = np.asarray(rho_codes) * self.group.order + np.asarray(tau_codes)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, len(self) - 1) if len(self) else pos
        ok = (self.keys[pos] == keys) if len(self) else np.zeros(keys.shape, bool)
        return np.where(ok, pos, -1)

    def pair(self, idx: int) -> tuple[GElem, GElem]:
        return self.group.decode(self.rho[idx]), self.group.decode(self.tau[idx])


def enumerate_rotary_pairs(group: AffineGroup) -> PairSet:
    """All (rho, tau) with |tau| = 2, |rho| in {2, 2p} and <rho, tau> = G.

    Both D-parts of such a pair are reflections.  For reflections x, y the
    intersection of <(v,x), (w,y)> with V is the D-submodule generated by the
    relator images rho^2 and (rho tau)^r (tau^2 is trivial), so generation
    reduces to a submodule join computed on cyclic-submodule labels.
    """
    group._require_tables()
    p, r, nv = group.p, group.r, group.nv
    ids, _ = group.cyclic_submodule_ids
    vcodes = np.arange(nv, dtype=np.int64)
    rho_all, tau_all = [], []
    for x, y in generating_reflection_pairs(r):
        xi, yi = d_index(x, r), d_index(y, r)
        xyi = d_index(d_mul(x, y, r), r)
        tau_v = vcodes[group.orbit_sum_table[yi] == 0]
        v = np.repeat(vcodes, tau_v.size)
        w = np.tile(tau_v, nv)
        u1 = group.orbit_sum_table[xi][v]
        u2 = group.orbit_sum_table[xyi][group.add_vcodes(v, group.act_table[xi][w])]
        ok = group._full_join(ids[u1], ids[u2])
        rho_all.append(v[ok] + nv * xi)
        tau_all.append(w[ok] + nv * yi)
    rho = np.concatenate(rho_all) if rho_all else np.zeros(0, np.int64)
    tau = np.concatenate(tau_all) if tau_all else np.zeros(0, np.int64)
    orders = group.orders[rho]
    big = orders == 2 * p
    small = orders == 2
    if not np.all(big | small):
        raise InternalError("rotary pair with rho of unexpected order")
    if big.any() and small.any():
        raise InternalError("rotary pairs with |rho| = 2p and |rho| = 2 coexist")
    order = (2 * p if big.any() else 2) if rho.size else None
    key = rho * group.order + tau
    perm = np.argsort(key)
    return PairSet(group, rho[perm], tau[perm], order)


def enumerate_rotary_pairs_bfs(group: AffineGroup) -> PairSet:
    """Reference enumeration straight from the definition (small groups only)."""
    group._require_tables()
    orders = group.orders
    p = group.p
    taus = np.nonzero(orders == 2)[0]
    found = {2 * p: [], 2: []}
    for target in (2 * p, 2):
        for rc in np.nonzero(orders == target)[0]:
            g = group.decode(rc)
            for tc in taus:
                if group.generates(g, group.decode(tc)):
                    found[target].append((int(rc), int(tc)))
    if found[2 * p] and found[2]:
        raise InternalError("rotary pairs with |rho| = 2p and |rho| = 2 coexist")
    pairs = sorted(found[2 * p] + found[2], key=lambda t: t[0] * group.order + t[1])
    rho = np.array([a for a, _ in pairs], dtype=np.int64)
    tau = np.array([b for _, b in pairs], dtype=np.int64)
    order = (2 * p if found[2 * p] else 2) if pairs else None
    return PairSet(group, rho, tau, order)


# -- automorphisms ------------------------------------------------------------


@dataclass
class _WordTree:
    """BFS spanning tree of the Cayley graph for a fixed generating pair."""

    levels: list  # (child codes, parent codes, generator label) per level
    right: tuple  # right multiplication permutations for the two generators


def _word_tree(group: AffineGroup, rho: GElem, tau: GElem) -> _WordTree:
    right = (group.right_mult_perm(rho), group.right_mult_perm(tau))
    seen = np.zeros(group.order, dtype=bool)
    seen[0] = True
    frontier = np.array([0], dtype=np.int64)
    levels = []
    while frontier.size:
        kids, parents, labels = [], [], []
        for label, perm in enumerate(right):
            nxt = perm[frontier]
            fresh = ~seen[nxt]
            nxt_f, par_f = nxt[fresh], frontier[fresh]
            nxt_u, first = np.unique(nxt_f, return_index=True)
            seen[nxt_u] = True
            kids.append(nxt_u)
            parents.append(par_f[first])
            labels.append(np.full(nxt_u.size, label, dtype=np.int64))
        kid = np.concatenate(kids)
        if kid.size:
            levels.append((kid, np.concatenate(parents), np.concatenate(labels)))
        frontier = kid
    if not seen.all():
        raise InternalError("base pair does not generate the group")
    return _WordTree(levels, right)


def _extend(group: AffineGroup, tree: _WordTree, images: tuple[int, int],
            target: AffineGroup | None = None) -> np.ndarray | None:
    """Bijection table of the isomorphism group -> target (default: group itself)
    sending the base pair of ``tree`` to ``images``, or None when that
    assignment does not extend to an isomorphism."""
    target = group if target is None else target
    if target.order != group.order:
        return None
    target._require_tables()
    alpha = np.full(group.order, -1, dtype=np.int64)
    alpha[0] = 0
    img = np.array(images, dtype=np.int64)
    for kid, par, lab in tree.levels:
        alpha[kid] = target.mul_codes(alpha[par], img[lab])
    for label, perm in enumerate(tree.right):
        lhs = alpha[perm]
        rhs = target.mul_codes(alpha, np.full(group.order, img[label]))
        if not np.array_equal(lhs, rhs):
            return None
    check = np.zeros(group.order, dtype=bool)
    check[alpha] = True
    if not check.all():
        return None
    return alpha


def word_tree(group: AffineGroup, rho: GElem, tau: GElem) -> _WordTree:
    return _word_tree(group, rho, tau)


def extend_assignment(group: AffineGroup, rho: GElem, tau: GElem, target: AffineGroup,
                      rho_img: GElem, tau_img: GElem) -> np.ndarray | None:
    """Expand rho -> rho_img, tau -> tau_img to a full isomorphism table, or None."""
    if target.order != group.order:
        return None
    tree = _word_tree(group, rho, tau)
    return _extend(group, tree, (target.code(rho_img), target.code(tau_img)), target)


def semiregularity_spot_check(group: AffineGroup, pairs: PairSet, automorphisms=(),
                              samples: int = 10, seed: int = 0) -> int:
    """Check on sampled pairs that only the identity fixes a pair.

    Two routes per sample: the forced extension of (rho, tau) -> (rho, tau)
    must be the identity table, and every supplied automorphism (plus random
    products of them) that fixes the pair must be the identity.  Returns the
    number of pairs checked; raises VerificationError on a violation.
    """
    if len(pairs) == 0:
        return 0
    rng = np.random.default_rng(seed)
    ident = np.arange(group.order)
    pool = [np.asarray(a) for a in automorphisms]
    for _ in range(min(len(pool) * 4, 32)):
        i, j = rng.integers(0, len(pool), 2)
        pool.append(pool[i][pool[j]])
    picks = rng.choice(len(pairs), size=min(samples, len(pairs)), replace=False)
    for idx in picks:
        rho, tau = pairs.pair(int(idx))
        alpha = extend_assignment(group, rho, tau, group, rho, tau)
        if alpha is None or not np.array_equal(alpha, ident):
            raise VerificationError(f"pair {int(idx)} has a non-trivial forced stabilizer")
        rc, tc = pairs.rho[idx], pairs.tau[idx]
        for a in pool:
            if a[rc] == rc and a[tc] == tc and not np.array_equal(a, ident):
                raise VerificationError(f"pair {int(idx)} is fixed by a non-identity automorphism")
    return len(picks)


@dataclass
class AutomorphismReport:
    group_order: int
    pair_count: int
    aut_order: int
    orbit_count: int
    generators: int
    semiregular: bool
    orbit_sizes: list = field(default_factory=list)
    spot_checked: int = 0


def _components(pairs: PairSet, gens: list) -> tuple[int, np.ndarray]:
    m = len(pairs)
    if not gens:
        return m, np.arange(m)
    src, dst = [], []
    idx = np.arange(m)
    for alpha in gens:
        pos = pairs.index_of(alpha[pairs.rho], alpha[pairs.tau])
        if np.any(pos < 0):
            raise InternalError("automorphism does not preserve the rotary pairs")
        src.append(idx)
        dst.append(pos)
    src = np.concatenate(src)
    dst = np.concatenate(dst)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(m, m))
    return connected_components(graph, directed=True, connection="weak")


def automorphism_count(group: AffineGroup, pairs: PairSet | None = None,
                       seed: int = 0) -> AutomorphismReport:
    """Exact |Aut(G)| and the number of Aut(G)-orbits on rotary pairs.

    Aut(G) acts semiregularly on generating pairs, so |Aut(G)| is the size of
    the orbit of any base pair.  Candidate images are tested by extending the
    assignment along a word tree; every success is kept as a generator and
    every failure rules out its whole component under the generators found
    so far.
    """
    if pairs is None:
        pairs = enumerate_rotary_pairs(group)
    m = len(pairs)
    if m == 0:
        return AutomorphismReport(group.order, 0, 0, 0, 0, True)
    rng = np.random.default_rng(seed)
    base_rho, base_tau = pairs.pair(0)
    tree = _word_tree(group, base_rho, base_tau)
    gens: list[np.ndarray] = []
    rejected = np.zeros(m, dtype=bool)
    while True:
        ncomp, labels = _components(pairs, gens)
        base_label = labels[0]
        comp_rejected = np.zeros(ncomp, dtype=bool)
        comp_rejected[labels[rejected]] = True
        rejected = comp_rejected[labels]
        open_mask = (labels != base_label) & ~rejected
        if not open_mask.any():
            break
        # batch a handful of candidates between component recomputations
        candidates = rng.permutation(np.nonzero(open_mask)[0])
        tried_labels = set()
        for idx in candidates[: 4 * 64]:
            lab = labels[idx]
            if lab in tried_labels:
                continue
            tried_labels.add(lab)
            alpha = _extend(group, tree, (int(pairs.rho[idx]), int(pairs.tau[idx])))
            if alpha is None:
                rejected[labels == lab] = True
            else:
                gens.append(alpha)
                break
    sizes = np.bincount(labels)
    aut_order = int(sizes[labels[0]])
    semiregular = bool(np.all(sizes == aut_order))
    if m % aut_order:
        raise InternalError("orbit size does not divide the number of pairs")
    checked = semiregularity_spot_check(group, pairs, gens, samples=10, seed=seed)
    return AutomorphismReport(group.order, m, aut_order, m // aut_order, len(gens),
                              semiregular, sorted(set(int(s) for s in sizes)), checked)


def count_orbits_on_pairs(group: AffineGroup, pairs: PairSet | None = None) -> int:
    return automorphism_count(group, pairs).orbit_count


# -- closed-form |Aut(G)| for cross-checking -----------------------------------


def _gl_order(m: int, q: int) -> int:
    out = 1
    for i in range(m):
        out *= q**m - q**i
    return out


def structural_aut_order(group: AffineGroup) -> int:
    """|Aut(G)| = |V / C_V(D)| * |Aut_D(V)| * #{sigma in Aut(D) fixing the class of psi}.

    Uses the class multiset of the group; the commutant dimension is computed
    independently and must agree with the class data.
    """
    if group.classes is None:
        raise ValueError("structural formula needs class data")
    p = group.p
    mult: dict = {}
    for c in group.classes:
        mult[c] = mult.get(c, 0) + 1
    units = 1
    end_dim = 0
    for c, m in mult.items():
        units *= _gl_order(m, p**c.end_degree)
        end_dim += m * m * c.end_degree
    if end_dim != group.endomorphism_dimension():
        raise InternalError("commutant dimension disagrees with the class data")
    key = sorted(mult.items(), key=lambda kv: kv[0].sort_key())
    stab = 0
    for s in aut_group(group.r):
        moved: dict = {}
        for c, m in mult.items():
            moved[aut_action(s, c)] = m
        if sorted(moved.items(), key=lambda kv: kv[0].sort_key()) == key:
            stab += 1
    return p ** (group.n - group.fixed_dimension()) * units * stab


def pair_count_formula(group: AffineGroup) -> int:
    """Closed-form number of rotary pairs when V is irreducible (-1 otherwise)."""
    if not group.classes or len(group.classes) != 1:
        return -1
    (c,) = group.classes
    p, r = group.p, group.r
    phi = euler_totient(r)
    if c.kind == "L":
        if c.signs == (1, 1):
            return (p - 1) * r * phi
        if c.signs == (-1, -1):
            return p * r * euler_totient(p * r)
        return (p - 1) * p * r * phi // 2
    d = c.degree
    return p**d * (p ** (d // 2) - 1) * r * phi
