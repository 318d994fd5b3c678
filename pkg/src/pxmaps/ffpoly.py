"""Exact arithmetic over F_p, F_p[x] and F_{p^m}, and the factorization of x^r - 1.

The factorization follows the cyclotomic-coset route: fix an element of order
r in the splitting field and multiply out the linear factors belonging to each
orbit of multiplication-by-p on Z_r.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

from sympy import factorint, isprime, n_order, totient

from .errors import InternalError, ParameterDomainError

__all__ = [
    "PrimeField",
    "Poly",
    "CyclotomicCoset",
    "ExtensionField",
    "check_params",
    "euler_totient",
    "multiplicative_order",
    "cyclotomic_cosets",
    "factor_x_r_minus_1",
    "is_self_reciprocal",
    "coset_polynomial",
    "find_irreducible",
]


def check_params(p: int, r: int) -> None:
    """Raise ParameterDomainError unless p is an odd prime, r >= 3 and p does not divide r."""
    if not isinstance(p, int) or not isinstance(r, int):
        raise ParameterDomainError("p and r must be integers")
    if p == 2:
        raise ParameterDomainError("p must be an odd prime (p = 2 is not covered)")
    if p < 2 or not isprime(p):
        raise ParameterDomainError(f"p must be an odd prime (got {p})")
    if r < 3:
        raise ParameterDomainError(f"r must be at least 3 (got {r})")
    if r % p == 0:
        raise ParameterDomainError(f"p must not divide r (got p={p}, r={r})")


def euler_totient(r: int) -> int:
    if r < 1:
        raise ParameterDomainError("totient needs r >= 1")
    return int(totient(r))


def multiplicative_order(p: int, r: int) -> int:
    """Least k >= 1 with r | p^k - 1 (r >= 2, gcd(p, r) = 1)."""
    if r == 1:
        return 1
    return int(n_order(p, r))


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if self.p < 3 or not isprime(self.p):
            raise ParameterDomainError(f"PrimeField needs an odd prime (got {self.p})")

    def reduce(self, a: int) -> int:
        return a % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, -1, self.p)

    def neg(self, a: int) -> int:
        return (-a) % self.p


class Poly:
    """Dense polynomial over F_p, coefficients lowest degree first.

    Instances are immutable and always normalized (no trailing zeros).
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, coeffs, p: int):
        cs = [c % p for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def x(cls, p: int) -> Poly:
        return cls((0, 1), p)

    @classmethod
    def constant(cls, c: int, p: int) -> Poly:
        return cls((c,), p)

    @classmethod
    def monomial(cls, k: int, p: int, c: int = 1) -> Poly:
        return cls([0] * k + [c], p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.p == other.p and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"Poly({list(self.coeffs)}, p={self.p})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "x" if k == 1 else f"x^{k}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(terms)

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.p != self.p:
                raise ValueError("polynomials over different fields")
            return other
        if isinstance(other, int):
            return Poly((other,), self.p)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        return Poly([x + y for x, y in itertools.zip_longest(a, b, fillvalue=0)], self.p)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly([-c for c in self.coeffs], self.p)

    def __sub__(self, other) -> Poly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> Poly:
        return self._coerce(other) - self

    def __mul__(self, other) -> Poly:
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly((), self.p)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out, self.p)

    __rmul__ = __mul__

    def __divmod__(self, other) -> tuple[Poly, Poly]:
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        db = other.degree
        inv_lead = pow(other.lead(), -1, p)
        quot = [0] * max(len(rem) - db, 0)
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k] % p
            if c == 0:
                continue
            q = c * inv_lead % p
            quot[k - db] = q
            for j, bj in enumerate(other.coeffs):
                rem[k - db + j] -= q * bj
        return Poly(quot, p), Poly(rem[:db] if db > 0 else [], p)

    def __floordiv__(self, other) -> Poly:
        return divmod(self, other)[0]

    def __mod__(self, other) -> Poly:
        return divmod(self, other)[1]

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        inv = pow(self.lead(), -1, self.p)
        return Poly([c * inv for c in self.coeffs], self.p)

    def gcd(self, other) -> Poly:
        a, b = self, self._coerce(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def powmod(self, e: int, mod: Poly) -> Poly:
        result = Poly((1,), self.p) % mod
        base = self % mod
        while e > 0:
            if e & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            e >>= 1
        return result

    def derivative(self) -> Poly:
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.p)

    def reciprocal(self) -> Poly:
        """Monic reciprocal k0^{-1} x^deg f(1/x); requires a nonzero constant term."""
        if not self.coeffs or self.coeffs[0] == 0:
            raise ValueError("reciprocal needs a nonzero constant term")
        return Poly(tuple(reversed(self.coeffs)), self.p).monic()

    def __call__(self, value: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * value + c) % self.p
        return acc


@dataclass(frozen=True)
class CyclotomicCoset:
    """An orbit of multiplication by p on Z_r, stored sorted."""

    elements: tuple[int, ...]
    r: int

    @property
    def representative(self) -> int:
        return self.elements[0]

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, e):
        return e % self.r in self.elements

    def __iter__(self):
        return iter(self.elements)

    def negated(self) -> CyclotomicCoset:
        return CyclotomicCoset(tuple(sorted((-e) % self.r for e in self.elements)), self.r)

    def scaled(self, k: int) -> CyclotomicCoset:
        return CyclotomicCoset(tuple(sorted((k * e) % self.r for e in self.elements)), self.r)

    def __str__(self):
        return "{" + ",".join(map(str, self.elements)) + "}"


@lru_cache(maxsize=None)
def cyclotomic_cosets(p: int, r: int) -> tuple[CyclotomicCoset, ...]:
    check_params(p, r)
    seen = set()
    cosets = []
    for e in range(r):
        if e in seen:
            continue
        orbit = []
        x = e
        while x not in orbit:
            orbit.append(x)
            x = x * p % r
        seen.update(orbit)
        cosets.append(CyclotomicCoset(tuple(sorted(orbit)), r))
    return tuple(sorted(cosets, key=lambda c: c.representative))


def is_self_reciprocal(coset: CyclotomicCoset, r: int | None = None) -> bool:
    r = coset.r if r is None else r
    members = set(coset.elements)
    return all((r - e) % r in members for e in coset.elements)


class ExtensionField:
    """F_{p^m} realized as F_p[x]/(modulus); elements are coefficient tuples of length m."""

    def __init__(self, p: int, modulus: Poly):
        if modulus.p != p:
            raise ValueError("modulus over the wrong prime")
        self.p = p
        self.modulus = modulus.monic()
        self.m = self.modulus.degree
        self.order = p**self.m

    def __repr__(self):
        return f"ExtensionField(p={self.p}, modulus={self.modulus})"

    def elem(self, poly) -> tuple[int, ...]:
        if not isinstance(poly, Poly):
            poly = Poly(poly, self.p)
        c = (poly % self.modulus).coeffs
        return c + (0,) * (self.m - len(c))

    @property
    def zero(self):
        return (0,) * self.m

    @property
    def one(self):
        return self.elem((1,))

    def from_int(self, k: int) -> tuple[int, ...]:
        return self.elem((k,))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple((-x) % self.p for x in a)

    def mul(self, a, b):
        return self.elem(Poly(a, self.p) * Poly(b, self.p))

    def pow(self, a, e: int):
        return self.elem(Poly(a, self.p).powmod(e, self.modulus))

    def is_in_base_field(self, a) -> bool:
        return all(c == 0 for c in a[1:])

    def elements(self):
        """Nonzero elements in a fixed sequential order."""
        for k in range(1, self.order):
            digits = []
            for _ in range(self.m):
                k, d = divmod(k, self.p)
                digits.append(d)
            yield tuple(digits)

    def is_generator(self, g) -> bool:
        n = self.order - 1
        one = self.one
        return all(self.pow(g, n // q) != one for q in factorint(n))

    def primitive_element(self):
        for g in self.elements():
            if self.is_generator(g):
                return g
        raise InternalError("no primitive element found")


def _is_irreducible(f: Poly) -> bool:
    """Rabin's test for a monic polynomial of degree m >= 1."""
    m = f.degree
    p = f.p
    x = Poly.x(p)
    if m == 1:
        return True
    if f.coeffs[0] == 0:
        return False
    # x^{p^k} mod f, k = 0..m
    frob = [x % f]
    for _ in range(m):
        frob.append(frob[-1].powmod(p, f))
    if frob[m] != x % f:
        return False
    for q in factorint(m):
        if (frob[m // q] - x).gcd(f).degree != 0:
            return False
    return True


@lru_cache(maxsize=None)
def find_irreducible(p: int, m: int) -> Poly:
    """First monic irreducible polynomial of degree m in lexicographic coefficient order."""
    if m < 1:
        raise ValueError("degree must be positive")
    for tail in itertools.product(range(p), repeat=m):
        f = Poly(tuple(reversed(tail)) + (1,), p)
        if _is_irreducible(f):
            return f
    raise InternalError(f"no irreducible polynomial of degree {m} over F_{p}")


@lru_cache(maxsize=None)
def _splitting_data(p: int, r: int):
    m = multiplicative_order(p, r)
    field = ExtensionField(p, find_irreducible(p, m))
    g = field.primitive_element()
    omega = field.pow(g, (field.order - 1) // r)
    return field, omega


@lru_cache(maxsize=None)
def factor_x_r_minus_1(p: int, r: int) -> tuple[tuple[Poly, CyclotomicCoset], ...]:
    """Monic irreducible factors of x^r - 1 over F_p, one per cyclotomic coset.

    The factor attached to coset S is the product of (x - w^e) for e in S,
    where w is a fixed primitive r-th root of unity in F_{p^m}.
    """
    check_params(p, r)
    field, omega = _splitting_data(p, r)
    out = []
    for coset in cyclotomic_cosets(p, r):
        # coefficients in F_{p^m}, lowest first
        acc = [field.one]
        for e in coset.elements:
            root = field.pow(omega, e)
            nxt = [field.zero] * (len(acc) + 1)
            for k, c in enumerate(acc):
                nxt[k + 1] = field.add(nxt[k + 1], c)
                nxt[k] = field.add(nxt[k], field.neg(field.mul(c, root)))
            acc = nxt
        coeffs = []
        for c in acc:
            if not field.is_in_base_field(c):
                raise InternalError(f"factor for coset {coset} does not descend to F_{p}")
            coeffs.append(c[0])
        out.append((Poly(coeffs, p), coset))
    return tuple(out)


def coset_polynomial(p: int, r: int, coset: CyclotomicCoset) -> Poly:
    for f, c in factor_x_r_minus_1(p, r):
        if c == coset:
            return f
    raise KeyError(f"{coset} is not a cyclotomic coset for p={p}, r={r}")
