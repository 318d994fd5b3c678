"""Small dense linear algebra over F_p on int64 numpy arrays.

All functions return fresh arrays reduced into [0, p).  Vectors are 1-D,
bases are stored as the rows of a 2-D array.
"""

from __future__ import annotations

import numpy as np


def as_matrix(rows, p: int) -> np.ndarray:
    return np.asarray(rows, dtype=np.int64) % p


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (a @ b) % p


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matpow(a: np.ndarray, k: int, p: int) -> np.ndarray:
    result = identity(a.shape[0])
    base = a % p
    if k < 0:
        base = inverse(base, p)
        k = -k
    while k:
        if k & 1:
            result = result @ base % p
        base = base @ base % p
        k >>= 1
    return result


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = np.array(a, dtype=np.int64) % p
    if m.ndim != 2:
        raise ValueError("rref needs a 2-D array")
    rows, cols = m.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row >= rows:
            break
        nz = np.nonzero(m[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            m[[row, piv]] = m[[piv, row]]
        m[row] = m[row] * pow(int(m[row, col]), -1, p) % p
        factors = m[:, col].copy()
        factors[row] = 0
        m = (m - np.outer(factors, m[row])) % p
        pivots.append(col)
        row += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def row_basis(vectors, p: int, n: int | None = None) -> np.ndarray:
    """Echelon basis (rows) of the span of the given vectors."""
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.size == 0:
        width = n if n is not None else (arr.shape[-1] if arr.ndim == 2 else 0)
        return np.zeros((0, width), dtype=np.int64)
    arr = arr.reshape(-1, arr.shape[-1])
    r, piv = rref(arr, p)
    return r[: len(piv)]


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (rows) of {x : a @ x = 0}."""
    a = np.asarray(a, dtype=np.int64) % p
    n = a.shape[1]
    r, piv = rref(a, p)
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        x = np.zeros(n, dtype=np.int64)
        x[f] = 1
        for i, pc in enumerate(piv):
            x[pc] = (-r[i, f]) % p
        basis.append(x)
    if not basis:
        return np.zeros((0, n), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([np.asarray(a, dtype=np.int64) % p, identity(n)], axis=1)
    r, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular mod p")
    return r[:, n:]


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution x of a @ x = b, or None when the system is inconsistent."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    n = a.shape[1]
    r, piv = rref(np.concatenate([a, b], axis=1), p)
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, n]
    return x


def in_span(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    if basis.shape[0] == 0:
        return not np.any(np.asarray(v) % p)
    return rank(np.vstack([basis, v]), p) == basis.shape[0]


def spin(seeds, generators, p: int, n: int) -> np.ndarray:
    """Echelon basis of the smallest subspace containing ``seeds`` and
    invariant under every matrix in ``generators``."""
    basis = row_basis(seeds, p, n)
    if basis.shape[0] == 0:
        return basis
    frontier = list(basis)
    while frontier:
        v = frontier.pop()
        for g in generators:
            w = g @ v % p
            if not in_span(basis, w, p):
                basis = row_basis(np.vstack([basis, w]), p)
                frontier.append(w)
    return basis


def coordinates(basis: np.ndarray, v: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of v in the given row basis (v must lie in the span)."""
    x = solve(basis.T, v, p)
    if x is None:
        raise ValueError("vector not in span")
    return x


def encode(vectors: np.ndarray, p: int) -> np.ndarray:
    """Integer codes sum v_j p^j for rows (or a single vector)."""
    vectors = np.asarray(vectors, dtype=np.int64)
    weights = p ** np.arange(vectors.shape[-1], dtype=np.int64)
    return vectors @ weights


def decode(codes, p: int, n: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty(codes.shape + (n,), dtype=np.int64)
    rem = codes.copy()
    for j in range(n):
        out[..., j] = rem % p
        rem //= p
    return out


def all_vectors(p: int, n: int) -> np.ndarray:
    return decode(np.arange(p**n, dtype=np.int64), p, n)


def batched_rref(stack: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Row reduce a batch of matrices at once.

    Returns ``(canon, rank)`` where ``canon[b]`` is an n x n matrix whose row j
    is the reduced row with pivot in column j (zero if column j has no pivot).
    ``canon`` is a canonical form of the row space of ``stack[b]``.
    """
    m = np.asarray(stack, dtype=np.int64) % p
    nb, nrows, n = m.shape
    used = np.zeros((nb, nrows), dtype=bool)
    pivot_row = np.full((nb, n), -1, dtype=np.int64)
    inv_table = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    batch = np.arange(nb)
    for col in range(n):
        cand = (m[:, :, col] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        b_idx = batch[has]
        prow = cand[has].argmax(axis=1)
        pivot_row[b_idx, col] = prow
        used[b_idx, prow] = True
        rows = m[b_idx, prow] * inv_table[m[b_idx, prow, col]][:, None] % p
        m[b_idx, prow] = rows
        factors = m[b_idx, :, col].copy()
        factors[np.arange(len(b_idx)), prow] = 0
        m[b_idx] = (m[b_idx] - factors[:, :, None] * rows[:, None, :]) % p
    canon = np.zeros((nb, n, n), dtype=np.int64)
    bb, cc = np.nonzero(pivot_row >= 0)
    canon[bb, cc] = m[bb, pivot_row[bb, cc]]
    return canon, (pivot_row >= 0).sum(axis=1)


def batched_rank(stack: np.ndarray, p: int) -> np.ndarray:
    return batched_rref(stack, p)[1]
