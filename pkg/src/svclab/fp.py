"""Linear algebra over prime fields.

Matrices are numpy integer arrays with entries in 0..p-1. Over F_2 the
elimination works on bit-packed rows, which keeps a 2047 x 2047 reduction
well under a second.
"""

from __future__ import annotations

import numpy as np


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def inv_mod(a: int, p: int) -> int:
    return pow(int(a) % p, -1, p)


def _as_mod(M, p: int) -> np.ndarray:
    return np.array(M, dtype=np.int64) % p


def rref(M, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns. Zero rows are dropped."""
    A = _as_mod(M, p)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if p == 2:
        return _rref_gf2(A)
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = (A[r] * inv_mod(A[r, c], p)) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _rref_gf2(A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    rows, cols = A.shape
    packed = np.packbits(A.astype(np.uint8), axis=1)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        byte, bit = divmod(c, 8)
        mask = np.uint8(0x80 >> bit)
        colbits = (packed[r:, byte] & mask) != 0
        nz = np.nonzero(colbits)[0]
        if len(nz) == 0:
            continue
        k = r + nz[0]
        if k != r:
            packed[[r, k]] = packed[[k, r]]
        hit = np.nonzero(packed[:, byte] & mask)[0]
        hit = hit[hit != r]
        if len(hit):
            packed[hit] ^= packed[r]
        pivots.append(c)
        r += 1
    out = np.unpackbits(packed[:r], axis=1, count=cols).astype(np.int64)
    return out, pivots


def rank(M, p: int) -> int:
    return len(rref(M, p)[1])


def solve(A, b, p: int) -> np.ndarray | None:
    """Some x with A x = b (mod p), or None."""
    A = _as_mod(A, p)
    b = _as_mod(b, p).reshape(-1, 1)
    R, piv = rref(np.hstack([A, b]), p)
    n = A.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


def nullspace(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0} as rows."""
    A = _as_mod(A, p)
    n = A.shape[1]
    R, piv = rref(A, p) if A.shape[0] else (np.zeros((0, n), dtype=np.int64), [])
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, c in zip(R, piv):
            basis[i, c] = (-row[f]) % p
    return basis


def inverse(A, p: int) -> np.ndarray:
    A = _as_mod(A, p)
    n = A.shape[0]
    R, piv = rref(np.hstack([A, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ValueError("matrix is singular")
    return R[:n, n:]


def matmul(A, B, p: int) -> np.ndarray:
    """Product mod p; float BLAS when the exact sums fit in a double."""
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    if inner * (p - 1) ** 2 < 2**52:
        return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    return (A.astype(object) @ B.astype(object)).astype(np.int64) % p


class Echelon:
    """A subspace of F_p^m with a canonical reduction map.

    ``reduce(v)`` returns the unique representative of v + U with zeros in
    every pivot column, so two vectors are congruent mod U iff their
    reductions agree.
    """

    def __init__(self, rows, p: int, length: int | None = None):
        self.p = p
        rows = _as_mod(rows, p)
        if rows.size == 0:
            m = length if length is not None else (rows.shape[1] if rows.ndim == 2 else 0)
            self.basis = np.zeros((0, m), dtype=np.int64)
            self.pivots: list[int] = []
        else:
            self.basis, self.pivots = rref(rows, p)
        self.length = self.basis.shape[1]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        V = _as_mod(v, self.p)
        single = V.ndim == 1
        if single:
            V = V.reshape(1, -1)
        if self.dim:
            coef = V[:, self.pivots]
            V = (V - matmul(coef, self.basis, self.p)) % self.p
        return V[0] if single else V

    def contains(self, v) -> np.ndarray | bool:
        red = self.reduce(v)
        if red.ndim == 1:
            return not red.any()
        return ~red.any(axis=1)

    def coordinates(self, v) -> np.ndarray:
        """Coefficients in the echelon basis for a vector known to lie in U."""
        V = _as_mod(v, self.p)
        return V[..., self.pivots]
