"""Polynomial subgroups R of P = C^t over a prime field.

C = F_p^d, X = V \\ {0} for V = F_p^n and t = |X| = p^n - 1. An element of P
is a map X -> F_p^d stored as a flat vector of length t*d, position
``(i - 1) * d + a`` holding coordinate a of the value at the i-th point.
Point indices i run from 1 to t throughout, as do the factor indices of C_i.

R is spanned by the evaluations of (m, 0, ..., 0), ..., (0, ..., 0, m) over
nonconstant monomials m of total degree at most r. Exponents are kept at most
p - 1 since x^p and x agree as functions on F_p.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fp

T_CAP = 1 << 16
ENUM_CAP = 1 << 20


class ApproxError(ValueError):
    pass


def points(p: int, n: int) -> np.ndarray:
    """Nonzero vectors of F_p^n; the i-th point has base-p digits of i, x1 least significant."""
    t = p**n - 1
    idx = np.arange(1, t + 1, dtype=np.int64)
    out = np.zeros((t, n), dtype=np.int64)
    for c in range(n):
        idx, out[:, c] = np.divmod(idx, p)
    return out


def monomials(n: int, p: int, r: int) -> list[tuple[int, ...]]:
    """Exponent vectors with entries in [0, p-1] and total degree in [1, r], graded order."""
    out = [e for e in itertools.product(range(p), repeat=n) if 1 <= sum(e) <= r]
    out.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return out


def evaluate_monomial(e: tuple[int, ...], X: np.ndarray, p: int) -> np.ndarray:
    v = np.ones(len(X), dtype=np.int64)
    for c, k in enumerate(e):
        if k:
            v = v * pow_mod(X[:, c], k, p) % p
    return v


def pow_mod(a: np.ndarray, k: int, p: int) -> np.ndarray:
    r = np.ones_like(a)
    for _ in range(k):
        r = r * a % p
    return r


def monomial_name(e: tuple[int, ...]) -> str:
    parts = [f"x{c + 1}" + (f"^{k}" if k > 1 else "") for c, k in enumerate(e) if k]
    return "*".join(parts)


@dataclass
class PolySubgroupR:
    p: int
    d: int
    k: int
    r: int
    n: int
    t: int
    mode: str
    monomial_basis: list[tuple[int, ...]]
    X: np.ndarray
    generators: np.ndarray  # one row per (monomial, component)
    violations: list[str] = field(default_factory=list)
    _echelon: fp.Echelon | None = field(default=None, repr=False)

    @property
    def length(self) -> int:
        return self.t * self.d

    @property
    def echelon(self) -> fp.Echelon:
        if self._echelon is None:
            self._echelon = fp.Echelon(self.generators, self.p, self.length)
        return self._echelon

    @property
    def dim(self) -> int:
        return self.echelon.dim

    def contains(self, v) -> bool:
        return bool(self.echelon.contains(v))

    def block(self, v: np.ndarray, i: int) -> np.ndarray:
        return np.asarray(v)[..., (i - 1) * self.d : i * self.d]

    def unit(self, i: int, value) -> np.ndarray:
        """The element of C_i with the given value."""
        out = np.zeros(self.length, dtype=np.int64)
        out[(i - 1) * self.d : i * self.d] = np.asarray(value) % self.p
        return out

    def elements(self, cap: int = ENUM_CAP) -> np.ndarray:
        """All elements of R, as rows."""
        B = self.echelon.basis
        if self.p**self.dim > cap:
            raise ApproxError(f"|R| = {self.p}^{self.dim} exceeds enumeration cap")
        coeffs = np.array(list(itertools.product(range(self.p), repeat=self.dim)), dtype=np.int64)
        if self.dim == 0:
            return np.zeros((1, self.length), dtype=np.int64)
        return fp.matmul(coeffs, B, self.p)

    def generator_text(self) -> str:
        """Plain-text integer rows spanning R."""
        return "\n".join(" ".join(str(int(x)) for x in row) for row in self.echelon.basis)

    def summary(self) -> dict:
        return {
            "p": self.p, "d": self.d, "k": self.k, "r": self.r, "n": self.n, "t": self.t,
            "mode": self.mode, "monomials": len(self.monomial_basis), "dim_R": self.dim,
            "violations": list(self.violations),
        }


def construct(p: int, d: int, k: int, *, r: int | None = None, n: int | None = None, t_cap: int = T_CAP) -> PolySubgroupR:
    """Build R. With r and n omitted, use r = k(p-1) and n = rd + 1."""
    if not fp.is_prime(p):
        raise ApproxError(f"{p} is not prime")
    if d < 1 or k < 1:
        raise ApproxError("d and k must be positive")
    mode = "polynomial" if r is None and n is None else "explicit"
    r = k * (p - 1) if r is None else r
    n = r * d + 1 if n is None else n
    if r < 1 or n < 1:
        raise ApproxError("r and n must be positive")
    t = p**n - 1
    if t > t_cap:
        raise ApproxError(f"t = {t} exceeds cap {t_cap}")
    violations = []
    if r < k * (p - 1):
        violations.append(f"r = {r} < k(p-1) = {k * (p - 1)}")
    if n <= r * d:
        violations.append(f"n = {n} <= rd = {r * d}")
    X = points(p, n)
    mons = monomials(n, p, r)
    gens = np.zeros((len(mons) * d, t * d), dtype=np.int64)
    for m_i, e in enumerate(mons):
        vals = evaluate_monomial(e, X, p)
        for a in range(d):
            gens[m_i * d + a, a::d] = vals
    return PolySubgroupR(p, d, k, r, n, t, mode, mons, X, gens, violations)


# ---------------------------------------------------------------------------
# property a


@dataclass
class PropertyAReport:
    passed: bool
    exhaustive: bool
    checked: int
    counterexample: np.ndarray | None = None

    def describe(self) -> str:
        how = "exhaustive" if self.exhaustive else "sampled"
        if self.passed:
            return f"every element has a zero coordinate block ({how}, {self.checked} elements)"
        return f"counterexample without zero block: {self.counterexample.tolist()}"


def _zero_block_mask(R: PolySubgroupR, F: np.ndarray) -> np.ndarray:
    blocks = F.reshape(len(F), R.t, R.d)
    return (~blocks.any(axis=2)).any(axis=1)


def check_property_a(R: PolySubgroupR, *, samples: int = 10000, seed: int = 0, chunk: int = 1 << 14) -> PropertyAReport:
    """Every f in R vanishes at some point of X."""
    if R.dim == 0:
        return PropertyAReport(True, True, 1)
    B = R.echelon.basis
    if R.p**R.dim <= ENUM_CAP:
        total = R.p**R.dim
        checked = 0
        for start in range(0, total, chunk):
            idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
            coeffs = np.zeros((len(idx), R.dim), dtype=np.int64)
            for c in range(R.dim - 1, -1, -1):
                idx, coeffs[:, c] = np.divmod(idx, R.p)
            F = fp.matmul(coeffs, B, R.p)
            ok = _zero_block_mask(R, F)
            checked += len(F)
            if not ok.all():
                return PropertyAReport(False, True, checked, F[np.argmin(ok)])
        return PropertyAReport(True, True, checked)
    rng = np.random.default_rng(seed)
    checked = 0
    while checked < samples:
        m = min(chunk, samples - checked)
        coeffs = rng.integers(0, R.p, size=(m, R.dim))
        F = fp.matmul(coeffs, B, R.p)
        ok = _zero_block_mask(R, F)
        checked += m
        if not ok.all():
            return PropertyAReport(False, False, checked, F[np.argmin(ok)])
    return PropertyAReport(True, False, checked)


def common_nonzero_root(polys: list[dict[tuple[int, ...], int]], n: int, p: int) -> np.ndarray | None:
    """A nonzero common root of polynomials without constant terms, by exhaustive search.

    Each polynomial maps exponent vectors to coefficients.
    """
    X = points(p, n)
    ok = np.ones(len(X), dtype=bool)
    for f in polys:
        v = np.zeros(len(X), dtype=np.int64)
        for e, c in f.items():
            v = (v + c * evaluate_monomial(e, X, p)) % p
        ok &= v == 0
    hit = np.nonzero(ok)[0]
    return X[hit[0]] if len(hit) else None


# ---------------------------------------------------------------------------
# property b


def _columns(R: PolySubgroupR, J) -> list[int]:
    return [(j - 1) * R.d + a for j in J for a in range(R.d)]


def check_property_b(R: PolySubgroupR, J, targets) -> np.ndarray | None:
    """Some f in R with f(v_j) = targets[j] for j in J, or None.

    Solved as a linear system in the coordinates of R's echelon basis.
    """
    J = list(J)
    if any(not 1 <= j <= R.t for j in J):
        raise ApproxError("point index out of range")
    cols = _columns(R, J)
    w = np.concatenate([np.asarray(targets[j], dtype=np.int64).reshape(R.d) for j in J]) if J else np.zeros(0, dtype=np.int64)
    B = R.echelon.basis
    if not J:
        return np.zeros(R.length, dtype=np.int64)
    if R.dim == 0:
        return np.zeros(R.length, dtype=np.int64) if not (w % R.p).any() else None
    c = fp.solve(B[:, cols].T, w, R.p)
    if c is None:
        return None
    return fp.matmul(c.reshape(1, -1), B, R.p)[0]


@dataclass
class PropertyBReport:
    passed: bool
    subsets: int
    cases: int
    exhaustive: bool
    failure: tuple | None = None


def check_property_b_all(R: PolySubgroupR, *, size: int | None = None, samples: int = 2000, seed: int = 0, cap: int = 200000) -> PropertyBReport:
    """Interpolation for every J of the given size (default k) and every target."""
    size = R.k if size is None else size
    all_J = itertools.combinations(range(1, R.t + 1), size)
    n_J = _binom(R.t, size)
    n_targets = R.p ** (R.d * size)
    values = list(itertools.product(range(R.p), repeat=R.d))
    if n_J * n_targets <= cap:
        cases = 0
        for J in all_J:
            for tg in itertools.product(values, repeat=size):
                f = check_property_b(R, J, dict(zip(J, tg)))
                cases += 1
                if f is None:
                    return PropertyBReport(False, n_J, cases, True, (J, tg))
        return PropertyBReport(True, n_J, cases, True)
    rng = np.random.default_rng(seed)
    for case in range(samples):
        J = tuple(sorted(rng.choice(np.arange(1, R.t + 1), size=size, replace=False).tolist()))
        tg = tuple(tuple(int(x) for x in rng.integers(0, R.p, size=R.d)) for _ in J)
        if check_property_b(R, J, dict(zip(J, tg))) is None:
            return PropertyBReport(False, samples, case + 1, False, (J, tg))
    return PropertyBReport(True, samples, samples, False)


def _binom(a: int, b: int) -> int:
    from math import comb

    return comb(a, b)


# ---------------------------------------------------------------------------
# property b'


@dataclass
class Decomposition:
    J: tuple[int, ...]
    J_prime: tuple[int, ...]
    complement: tuple[int, ...]
    projection: np.ndarray  # (t*d) x (t*d), row vectors: v -> v @ projection
    n: np.ndarray  # t x t integer lifts in 0..p-1
    scalar_blocks: bool
    checks: dict[str, bool]

    def pi(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64) @ self.projection % self.n_mod

    n_mod: int = 0


def complement_and_projection(R: PolySubgroupR, J) -> Decomposition:
    """Grow J into J' with P = R + sum_{j not in J'} C_j direct, and project onto the C_j part.

    Factors outside J are kept greedily from the highest index down: C_j
    is kept when it meets the running sum trivially. The projection has
    kernel R and fixes each kept C_j.
    """
    p, d, t = R.p, R.d, R.t
    J = tuple(sorted(set(J)))
    current = R.echelon.basis.copy()
    kept: list[int] = []
    dim = R.dim
    for j in range(t, 0, -1):
        if j in J:
            continue
        block = np.zeros((d, R.length), dtype=np.int64)
        for a in range(d):
            block[a, (j - 1) * d + a] = 1
        trial = np.vstack([current, block]) if len(current) else block
        new_dim = fp.rank(trial, p)
        if new_dim == dim + d:
            current, dim = trial, new_dim
            kept.append(j)
    kept.sort()
    J_prime = tuple(j for j in range(1, t + 1) if j not in kept)
    full = dim == R.length
    # basis: R rows followed by unit rows of kept blocks; coordinates via inverse
    units = [(j - 1) * d + a for j in kept for a in range(d)]
    basis = np.vstack([R.echelon.basis, np.eye(R.length, dtype=np.int64)[units]]) if full else None
    checks = {"direct_sum": full, "dimension_count": R.dim + len(kept) * d == t * d}
    if not full:
        z = np.zeros((R.length, R.length), dtype=np.int64)
        return Decomposition(J, J_prime, tuple(kept), z, np.zeros((t, t), dtype=np.int64), False, checks, p)
    inv = fp.inverse(basis, p)
    # v = coords @ basis, coords = v @ inv; keep only the unit-row coordinates
    keep_part = np.zeros((R.length, R.length), dtype=np.int64)
    for row, col in enumerate(units):
        keep_part[R.dim + row, col] = 1
    proj = fp.matmul(inv, keep_part, p)
    n_mat = np.zeros((t, t), dtype=np.int64)
    scalar = True
    eye = np.eye(d, dtype=np.int64)
    for i in range(1, t + 1):
        for j in range(1, t + 1):
            blk = proj[(i - 1) * d : i * d, (j - 1) * d : j * d]
            s = blk[0, 0]
            if not np.array_equal(blk, s * eye % p):
                scalar = False
            n_mat[i - 1, j - 1] = s
    checks["idempotent"] = bool(np.array_equal(fp.matmul(proj, proj, p), proj))
    image_ok = all(not proj[:, (j - 1) * d : j * d].any() for j in J_prime)
    checks["image_in_complement"] = image_ok
    checks["kernel_is_R"] = _kernel_is(R, proj)
    checks["scalar_blocks"] = scalar
    checks["J_inside_J_prime"] = set(J) <= set(J_prime)
    return Decomposition(J, J_prime, tuple(kept), proj, n_mat, scalar, checks, p)


def _kernel_is(R: PolySubgroupR, proj: np.ndarray) -> bool:
    kills = not fp.matmul(R.echelon.basis, proj, R.p).any() if R.dim else True
    ker_dim = R.length - fp.rank(proj, R.p)
    return bool(kills and ker_dim == R.dim)


def apply_lifts(R: PolySubgroupR, n_mat: np.ndarray, i: int, c) -> np.ndarray:
    """The element prod_j c_j^(n_ij) of P for c placed in C_i."""
    out = np.zeros(R.length, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    for j in range(1, R.t + 1):
        if n_mat[i - 1, j - 1]:
            out[(j - 1) * R.d : j * R.d] = n_mat[i - 1, j - 1] * c % R.p
    return out


# ---------------------------------------------------------------------------
# matrix invariance


def matrix_units(d: int) -> list[np.ndarray]:
    out = []
    for a in range(d):
        for b in range(d):
            E = np.zeros((d, d), dtype=np.int64)
            E[a, b] = 1
            out.append(E)
    return out


def act_diagonally(R: PolySubgroupR, M: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the d x d matrix M to every value of v (column vectors)."""
    V = np.asarray(v).reshape(-1, R.t, R.d)
    out = np.einsum("ab,ktb->kta", M, V) % R.p
    return out.reshape(np.asarray(v).shape)


def check_matrix_invariance(R: PolySubgroupR, mats: list[np.ndarray] | None = None) -> bool:
    mats = matrix_units(R.d) if mats is None else mats
    gens = R.echelon.basis
    if not len(gens):
        return True
    for M in mats:
        if not R.echelon.contains(act_diagonally(R, M, gens)).all():
            return False
    return True
