"""Irreducible F_p-representations of the dihedral group D_2r.

Conventions: ``c`` has order r, ``b`` is an involution with b c b = c^-1,
and ``a := c b`` is the second generating involution.  A dihedral element
c^i b^e is stored as the pair ``(i, e)``.

Isomorphism classes are indexed by cyclotomic-coset data:

* ``L(sa,sb)``  degree 1, a acts by sa and b acts by sb
* ``P{S}``      degree 2|S|, for a coset S with S != -S (paired with -S)
* ``R{S}``      degree |S|, for a self-reciprocal coset with |S| >= 2
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from . import linalg
from .errors import InternalError, ParameterDomainError
from .ffpoly import (
    CyclotomicCoset,
    Poly,
    check_params,
    coset_polynomial,
    cyclotomic_cosets,
    euler_totient,
    is_self_reciprocal,
    multiplicative_order,
)

# -- the abstract group ------------------------------------------------------

C = (1, 0)
B = (0, 1)
A = (1, 1)


def d_mul(g, h, r: int):
    i1, e1 = g
    i2, e2 = h
    return ((i1 + (-i2 if e1 else i2)) % r, e1 ^ e2)


def d_inv(g, r: int):
    i, e = g
    return (i, 1) if e else ((-i) % r, 0)


def d_order(g, r: int) -> int:
    i, e = g
    if e:
        return 2
    return r // gcd(i, r)


def d_elements(r: int):
    return [(i, e) for e in (0, 1) for i in range(r)]


def d_index(g, r: int) -> int:
    return g[0] % r + r * g[1]


def d_generated(gens, r: int) -> set:
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        g = frontier.pop()
        for s in gens:
            h = d_mul(g, s, r)
            if h not in seen:
                seen.add(h)
                frontier.append(h)
    return seen


def generating_reflection_pairs(r: int):
    """All ordered pairs (x, y) of reflections with <x, y> = D_2r."""
    pairs = []
    for i in range(r):
        for j in range(r):
            if gcd((i - j) % r, r) == 1:
                pairs.append(((i, 1), (j, 1)))
    return pairs


@dataclass(frozen=True)
class AutD:
    """Automorphism c -> c^k, b -> c^t b of D_2r."""

    t: int
    k: int
    r: int

    def __post_init__(self):
        if gcd(self.k, self.r) != 1:
            raise ValueError(f"k={self.k} is not a unit mod {self.r}")

    def __call__(self, g):
        i, e = g
        return ((self.k * i + self.t * e) % self.r, e)

    def compose(self, other: AutD) -> AutD:
        """self o other."""
        return AutD((self.t + self.k * other.t) % self.r, (self.k * other.k) % self.r, self.r)

    def inverse(self) -> AutD:
        kinv = pow(self.k, -1, self.r)
        return AutD((-kinv * self.t) % self.r, kinv, self.r)


def aut_group(r: int) -> list[AutD]:
    return [AutD(t, k, r) for k in range(1, r) if gcd(k, r) == 1 for t in range(r)]


def aut_mapping(src, dst, r: int) -> AutD:
    """The unique automorphism sending the generating reflection pair src to dst."""
    (i1, _), (j1, _) = src
    (i2, _), (j2, _) = dst
    # sigma(c^i b) = c^{k i + t} b
    for k in range(1, r):
        if gcd(k, r) != 1:
            continue
        t = (i2 - k * i1) % r
        if (k * j1 + t) % r == j2 % r:
            return AutD(t, k, r)
    raise ValueError(f"no automorphism maps {src} to {dst}")


# -- isomorphism classes -----------------------------------------------------


def _sgn(s: int) -> str:
    return "+" if s > 0 else "-"


@dataclass(frozen=True)
class IrrClass:
    kind: str  # "L", "P" or "R"
    r: int
    signs: tuple[int, int] | None = None
    coset: CyclotomicCoset | None = None

    def __post_init__(self):
        if self.kind == "L":
            sa, sb = self.signs
            if sa * sb == -1 and self.r % 2:
                raise ParameterDomainError("L(+,-) and L(-,+) exist only for even r")
        elif self.kind == "P":
            neg = self.coset.negated()
            if neg == self.coset:
                raise ValueError("P classes need a non-self-reciprocal coset")
            if neg.elements < self.coset.elements:
                raise ValueError("P class must store the lexicographically smaller coset")
        elif self.kind == "R":
            if not is_self_reciprocal(self.coset) or self.coset.size < 2:
                raise ValueError("R classes need a self-reciprocal coset of size >= 2")
        else:
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def degree(self) -> int:
        if self.kind == "L":
            return 1
        if self.kind == "P":
            return 2 * self.coset.size
        return self.coset.size

    @property
    def end_degree(self) -> int:
        """Degree over F_p of the endomorphism field End_D(M)."""
        if self.kind == "L":
            return 1
        if self.kind == "P":
            return self.coset.size
        return self.coset.size // 2

    @property
    def signature(self) -> str:
        if self.kind == "L":
            return f"L({_sgn(self.signs[0])},{_sgn(self.signs[1])})"
        return f"{self.kind}{self.coset}"

    def __str__(self):
        return self.signature

    def sort_key(self):
        kind_rank = {"L": 0, "P": 1, "R": 2}[self.kind]
        if self.kind == "L":
            sa, sb = self.signs
            return (kind_rank, (-sa * sb, -sa))
        return (kind_rank, self.coset.elements)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def is_faithful(self) -> bool:
        """Faithful on the rotation subgroup <c> (equivalently on D_2r, r >= 3)."""
        if self.kind == "L":
            return False
        return gcd(self.coset.representative, self.r) == 1


GAMMA_MINUS_PLUS = ("L", (-1, 1))


def linear(sa: int, sb: int, r: int) -> IrrClass:
    return IrrClass("L", r, signs=(sa, sb))


@lru_cache(maxsize=None)
def enumerate_irr(p: int, r: int) -> tuple[IrrClass, ...]:
    check_params(p, r)
    out = [linear(1, 1, r), linear(-1, -1, r)]
    if r % 2 == 0:
        out += [linear(1, -1, r), linear(-1, 1, r)]
    for coset in cyclotomic_cosets(p, r):
        if coset.elements == (0,) or (r % 2 == 0 and coset.elements == (r // 2,)):
            continue
        neg = coset.negated()
        if neg == coset:
            out.append(IrrClass("R", r, coset=coset))
        elif coset.elements < neg.elements:
            out.append(IrrClass("P", r, coset=coset))
    return tuple(out)


def is_gamma_minus_plus(cls: IrrClass) -> bool:
    return cls.kind == "L" and cls.signs == (-1, 1)


_SIG_RE = re.compile(r"^\s*(?:L\(\s*([+-])\s*,\s*([+-])\s*\)|([PR])\{([0-9,\s]+)\})\s*$")


def class_from_signature(sig: str, p: int, r: int) -> IrrClass:
    m = _SIG_RE.match(sig)
    if not m:
        raise ParameterDomainError(f"malformed class signature {sig!r}")
    if m.group(1):
        sa = 1 if m.group(1) == "+" else -1
        sb = 1 if m.group(2) == "+" else -1
        cls = linear(sa, sb, r)
    else:
        elems = tuple(sorted(int(x) % r for x in m.group(4).split(",") if x.strip()))
        cls = None
        for cand in enumerate_irr(p, r):
            if cand.kind == m.group(3) and cand.coset.elements == elems:
                cls = cand
        if cls is None:
            raise ParameterDomainError(f"{sig!r} is not an irreducible class for p={p}, r={r}")
    if cls not in enumerate_irr(p, r):
        raise ParameterDomainError(f"{sig!r} is not an irreducible class for p={p}, r={r}")
    return cls


def split_signature_list(text: str) -> list[str]:
    """Split 'P{1},L(+,-)' on commas outside braces and parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "({":
            depth += 1
        elif ch in ")}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return [s.strip() for s in parts if s.strip()]


# -- matrix realizations -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class MatrixRep:
    p: int
    r: int
    mat_c: np.ndarray
    mat_b: np.ndarray

    @property
    def degree(self) -> int:
        return self.mat_c.shape[0]

    @property
    def mat_a(self) -> np.ndarray:
        return self.mat_c @ self.mat_b % self.p

    def image(self, g) -> np.ndarray:
        i, e = g
        m = linalg.matpow(self.mat_c, i, self.p)
        if e:
            m = m @ self.mat_b % self.p
        return m

    def relations_hold(self) -> bool:
        p, n = self.p, self.degree
        eye = linalg.identity(n)
        c, b = self.mat_c, self.mat_b
        return (
            np.array_equal(linalg.matpow(c, self.r, p), eye)
            and np.array_equal(b @ b % p, eye)
            and np.array_equal(b @ c @ b % p, linalg.inverse(c, p))
        )

    def twisted(self, sigma: AutD) -> MatrixRep:
        """The representation psi o sigma."""
        return MatrixRep(self.p, self.r, self.image(sigma(C)), self.image(sigma(B)))


def direct_sum(reps, p: int, r: int) -> MatrixRep:
    n = sum(rep.degree for rep in reps)
    c = np.zeros((n, n), dtype=np.int64)
    b = np.zeros((n, n), dtype=np.int64)
    k = 0
    for rep in reps:
        d = rep.degree
        c[k : k + d, k : k + d] = rep.mat_c
        b[k : k + d, k : k + d] = rep.mat_b
        k += d
    return MatrixRep(p, r, c, b)


def companion(f: Poly) -> np.ndarray:
    """Matrix of multiplication by x on F_p[x]/(f) in the basis 1, x, ..., x^{m-1}."""
    m = f.degree
    p = f.p
    out = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        col = Poly.monomial(j + 1, p) % f
        out[: len(col.coeffs), j] = col.coeffs
    return out


def _frobenius_matrix(f: Poly, power: int) -> np.ndarray:
    """Matrix of the ring map g(x) -> g(x)^(p^power) on F_p[x]/(f)."""
    m = f.degree
    p = f.p
    x = Poly.x(p)
    image_of_x = x.powmod(p**power, f)
    out = np.zeros((m, m), dtype=np.int64)
    for j in range(m):
        col = image_of_x.powmod(j, f)
        out[: len(col.coeffs), j] = col.coeffs
    return out


@lru_cache(maxsize=None)
def _realize_cached(cls: IrrClass, p: int) -> MatrixRep:
    r = cls.r
    if cls.kind == "L":
        sa, sb = cls.signs
        rep = MatrixRep(p, r, linalg.as_matrix([[sa * sb]], p), linalg.as_matrix([[sb]], p))
    elif cls.kind == "P":
        f = coset_polynomial(p, r, cls.coset)
        m = f.degree
        cf = companion(f)
        c = np.zeros((2 * m, 2 * m), dtype=np.int64)
        c[:m, :m] = cf
        c[m:, m:] = linalg.inverse(cf, p)
        b = np.zeros((2 * m, 2 * m), dtype=np.int64)
        b[:m, m:] = linalg.identity(m)
        b[m:, :m] = linalg.identity(m)
        rep = MatrixRep(p, r, c, b)
    else:
        f = coset_polynomial(p, r, cls.coset)
        rep = MatrixRep(p, r, companion(f), _frobenius_matrix(f, cls.coset.size // 2))
    if not rep.relations_hold():
        raise InternalError(f"realization of {cls} violates the dihedral relations")
    rep.mat_c.setflags(write=False)
    rep.mat_b.setflags(write=False)
    return rep


def realize(cls: IrrClass, p: int, r: int | None = None) -> MatrixRep:
    if r is not None and r != cls.r:
        raise ValueError("class belongs to a different r")
    return _realize_cached(cls, p)


def intertwiners(rep1: MatrixRep, rep2: MatrixRep) -> list[np.ndarray]:
    """Basis of Hom_D(rep1, rep2): matrices X with X rep1(g) = rep2(g) X."""
    p = rep1.p
    n1, n2 = rep1.degree, rep2.degree
    # vec(X) row-major: (X M)_{ij} = sum_k X_ik M_kj ; (N X)_{ij} = sum_k N_ik X_kj
    rows = []
    for m1, m2 in ((rep1.mat_c, rep2.mat_c), (rep1.mat_b, rep2.mat_b)):
        left = np.kron(np.eye(n2, dtype=np.int64), m1.T)
        right = np.kron(m2, np.eye(n1, dtype=np.int64))
        rows.append((left - right) % p)
    ns = linalg.nullspace(np.vstack(rows), p)
    return [v.reshape(n2, n1) for v in ns]


def are_isomorphic(rep1: MatrixRep, rep2: MatrixRep) -> bool:
    """Isomorphism test; exact for representations with a field as endomorphism ring
    (all irreducibles here), by checking whether some basis intertwiner is invertible
    and, failing that, whether a random-free sweep over small combinations is."""
    if rep1.degree != rep2.degree:
        return False
    basis = intertwiners(rep1, rep2)
    if not basis:
        return False
    p = rep1.p
    for coeffs in itertools.product(range(p), repeat=min(len(basis), 3)):
        if not any(coeffs):
            continue
        x = sum(c * m for c, m in zip(coeffs, basis)) % p
        if linalg.rank(x, p) == rep1.degree:
            return True
    return False


def faithful_degree(p: int, r: int) -> tuple[int, int, int]:
    check_params(p, r)
    d = multiplicative_order(p, r)
    if d % 2 == 0 and pow(p, d // 2, r) == r - 1:
        deg = d
    else:
        deg = 2 * d
    return d, deg, euler_totient(r) // deg


# -- Aut(D_2r) acting on classes ---------------------------------------------


def _canonical_pair(coset: CyclotomicCoset) -> CyclotomicCoset:
    neg = coset.negated()
    return coset if coset.elements < neg.elements else neg


def aut_action(sigma: AutD, cls: IrrClass) -> IrrClass:
    """Class of psi o sigma."""
    if cls.kind == "L":
        sa, sb = cls.signs
        sc = sa * sb
        sb_new = (sc**sigma.t) * sb
        sc_new = sc**sigma.k
        return linear(sc_new * sb_new, sb_new, cls.r)
    moved = cls.coset.scaled(sigma.k)
    if cls.kind == "P":
        return IrrClass("P", cls.r, coset=_canonical_pair(moved))
    return IrrClass("R", cls.r, coset=moved)


def aut_orbit(cls: IrrClass, p: int, r: int) -> frozenset:
    return frozenset(aut_action(s, cls) for s in aut_group(r))


def orbit_key(classes) -> tuple[str, ...]:
    """Canonical label of a multiset of classes up to Aut(D_2r): the smallest sorted
    signature tuple over its Aut-images.  Equal keys <=> isomorphic semidirect products."""
    classes = list(classes)
    if not classes:
        return ()
    r = classes[0].r
    best = None
    for s in aut_group(r):
        key = tuple(sorted(aut_action(s, c).signature for c in classes))
        if best is None or key < best:
            best = key
    return best


def multiplicity_free_reps(p: int, r: int, total_degree: int) -> list[tuple[IrrClass, ...]]:
    """Subsets of Irr(D_2r) with the given degree sum, omitting any subset that
    contains L(-,+) when r is even."""
    if total_degree < 1:
        return []
    classes = [c for c in enumerate_irr(p, r) if not is_gamma_minus_plus(c)]
    out = []

    def walk(start, remaining, chosen):
        if remaining == 0:
            out.append(tuple(chosen))
            return
        for idx in range(start, len(classes)):
            deg = classes[idx].degree
            if deg <= remaining:
                chosen.append(classes[idx])
                walk(idx + 1, remaining - deg, chosen)
                chosen.pop()

    walk(0, total_degree, [])
    return out


def all_reps_of_degree(p: int, r: int, total_degree: int) -> list[tuple[IrrClass, ...]]:
    """Every multiset of irreducible classes (with repetition, L(-,+) included)
    of the given total degree, one representative per Aut(D_2r)-orbit."""
    classes = list(enumerate_irr(p, r))
    seen = {}

    def walk(start, remaining, chosen):
        if remaining == 0:
            key = orbit_key(chosen)
            seen.setdefault(key, tuple(chosen))
            return
        for idx in range(start, len(classes)):
            deg = classes[idx].degree
            if deg <= remaining:
                chosen.append(classes[idx])
                walk(idx, remaining - deg, chosen)
                chosen.pop()

    walk(0, total_degree, [])
    return [seen[k] for k in sorted(seen)]
