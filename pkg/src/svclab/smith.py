"""Smith normal form over the integers with exact Python ints."""

from __future__ import annotations

import math
from dataclasses import dataclass

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix) -> Matrix:
    if not A or not B:
        return [[0] * (len(B[0]) if B else 0) for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def det(A: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    M = [list(r) for r in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


@dataclass
class SmithForm:
    A: Matrix
    D: list[int]  # diagonal, n1 | n2 | ..., trailing zeros included up to min(rows, cols)
    P: Matrix  # rows x rows, unimodular
    Q: Matrix  # cols x cols, unimodular

    @property
    def rank(self) -> int:
        return sum(1 for d in self.D if d)

    def diagonal_matrix(self) -> Matrix:
        m, n = len(self.A), len(self.A[0]) if self.A else 0
        return [[self.D[i] if i == j else 0 for j in range(n)] for i in range(m)]

    def is_valid(self) -> bool:
        if matmul(matmul(self.P, self.A), self.Q) != self.diagonal_matrix():
            return False
        if abs(det(self.P)) != 1 or abs(det(self.Q)) != 1:
            return False
        nz = [d for d in self.D if d]
        if any(d < 0 for d in self.D) or self.D[: len(nz)] != nz:
            return False
        return all(b % a == 0 for a, b in zip(nz, nz[1:]))


def smith(A) -> SmithForm:
    """P, Q unimodular with P A Q diagonal and divisibility-chained.

    Elementary row and column operations; the pivot is the entry of least
    absolute value in the remaining block.
    """
    A = [[int(x) for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    M = [row[:] for row in A]
    P, Q = identity(m), identity(n)

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        M[dst] = [a + k * b for a, b in zip(M[dst], M[src])]
        P[dst] = [a + k * b for a, b in zip(P[dst], P[src])]

    def add_col(dst, src, k):
        for row in M:
            row[dst] += k * row[src]
        for row in Q:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(M[i][j]), i, j) for i in range(t, m) for j in range(t, n) if M[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, m):
                q = M[i][t] // M[t][t]
                if q:
                    add_row(i, t, -q)
                if M[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = M[t][j] // M[t][t]
                if q:
                    add_col(j, t, -q)
                if M[t][j]:
                    done = False
            if not done:
                continue
            # the pivot must divide the rest of the block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % M[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            P[t] = [-x for x in P[t]]
    D = [M[i][i] for i in range(min(m, n))]
    return SmithForm(A, D, P, Q)


def kernel_basis(l) -> Matrix:
    """Columns spanning {u in Z^s : l . u = 0}, as a list of column vectors."""
    l = [int(x) for x in l]
    s = len(l)
    if not any(l):
        return identity(s)
    sf = smith([l])
    return [[sf.Q[i][j] for i in range(s)] for j in range(1, s)]


def gcd_all(xs) -> int:
    g = 0
    for x in xs:
        g = math.gcd(g, int(x))
    return g


def ext_gcd_vector(l) -> tuple[int, list[int]]:
    """g = gcd(l) and integer coefficients c with l . c = g."""
    g, coeffs = 0, []
    for x in l:
        x = int(x)
        if g == 0 and x == 0:
            coeffs.append(0)
            continue
        # g' = a g + b x
        a, b, g2 = _ext(g, x)
        coeffs = [c * a for c in coeffs] + [b]
        g = g2
    if g < 0:
        g, coeffs = -g, [-c for c in coeffs]
    return g, coeffs


def _ext(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0, a
