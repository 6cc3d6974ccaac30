"""Structural predicates: nonabelian monoliths, self-centralising normal
subgroups, modules over coprime group rings, and direct-factor tests for
centres of centralisers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fp
from . import groups as gr
from .groups import CapExceeded, FiniteGroup, GroupError, Homomorphism, Subgroup

MODULE_CAP = 3**8
SUBMODULE_CAP = 5000
LAYER_DIM_CAP = 3

VERIFIED = "verified"
VACUOUS = "vacuous"
VIOLATED = "VIOLATED"


# ---------------------------------------------------------------------------
# group predicates


def theorem1_predicate(H: FiniteGroup, cap: int = gr.LATTICE_CAP) -> bool:
    """True iff H has a nontrivial nonabelian monolith."""
    M = gr.monolith(H, cap)
    return M.order > 1 and not M.is_abelian


@dataclass
class Theorem2Report:
    self_centralizing: bool
    indecomposable: bool
    coprime: bool
    decomposition: tuple[list[int], list[int]] | None = None
    reading: str = "pairwise: no two nontrivial H-normal subgroups A, B of C with A ∩ B = 1 and AB = C"

    @property
    def holds(self) -> bool:
        return self.self_centralizing and self.indecomposable and self.coprime


def h_normal_subgroups_of(H: FiniteGroup, C: Subgroup, cap: int = gr.LATTICE_CAP) -> list[Subgroup]:
    return [N for N in gr.normal_subgroups(H, cap) if N <= C]


def theorem2_predicate(H: FiniteGroup, C: Subgroup, cap: int = gr.LATTICE_CAP) -> Theorem2Report:
    if not C.is_normal(H):
        raise GroupError("C is not normal in H")
    selfc = gr.centralizer(H, C) == C
    parts = [N for N in h_normal_subgroups_of(H, C, cap) if 1 < N.order < C.order]
    dec = None
    for A, B in itertools.combinations(parts, 2):
        if A.order * B.order == C.order and len(A.set & B.set) == 1:
            dec = (A.members, B.members)
            break
    coprime = math.gcd(C.order, H.order // C.order) == 1
    return Theorem2Report(selfc, dec is None, coprime, dec)


# ---------------------------------------------------------------------------
# modules


class ModuleError(ValueError):
    pass


@dataclass
class GModule:
    """A finite abelian p-group Z_{q_1} + ... + Z_{q_r} with a group acting by
    integer matrices in row convention (e_i -> sum_j A[i][j] e_j)."""

    cyclic_orders: list[int]
    p: int
    action: list[list[list[int]]]
    acting_order: int
    name: str = "M"

    def __post_init__(self):
        self.cyclic_orders = [int(q) for q in self.cyclic_orders]
        self.mats = [np.array(A, dtype=np.int64).reshape(self.rank, self.rank) for A in self.action]
        self._perm_cache = None

    @property
    def rank(self) -> int:
        return len(self.cyclic_orders)

    @property
    def size(self) -> int:
        return math.prod(self.cyclic_orders)

    def validate(self) -> None:
        if not fp.is_prime(self.p):
            raise ModuleError(f"{self.p} is not prime")
        for q in self.cyclic_orders:
            if q < 2 or not _is_power(q, self.p):
                raise ModuleError(f"cyclic order {q} is not a power of {self.p}")
        if self.size > MODULE_CAP:
            raise CapExceeded(f"|M| = {self.size} exceeds module cap {MODULE_CAP}")
        if math.gcd(self.p, self.acting_order) != 1:
            raise ModuleError("p divides the order of the acting group")
        qs = self.cyclic_orders
        for A in self.mats:
            for i in range(self.rank):
                for j in range(self.rank):
                    if (qs[i] * A[i, j]) % qs[j]:
                        raise ModuleError("matrix does not respect the cyclic orders")
        for perm in self.perms:
            if len(set(perm.tolist())) != self.size:
                raise ModuleError("matrix is not invertible on M")
        if self.acting_order % len(self.group_elements):
            raise ModuleError("matrices generate a group whose order does not divide acting_order")

    # element coding ------------------------------------------------------

    @property
    def coords(self) -> np.ndarray:
        if not hasattr(self, "_coords"):
            idx = np.arange(self.size, dtype=np.int64)
            out = np.zeros((self.size, self.rank), dtype=np.int64)
            for c in range(self.rank - 1, -1, -1):
                idx, out[:, c] = np.divmod(idx, self.cyclic_orders[c])
            self._coords = out
        return self._coords

    def encode(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64) % np.array(self.cyclic_orders)
        code = np.zeros(X.shape[:-1], dtype=np.int64)
        for c in range(self.rank):
            code = code * self.cyclic_orders[c] + X[..., c]
        return code

    def add(self, a, b) -> np.ndarray:
        return self.encode(self.coords[a] + self.coords[b])

    def scale(self, a, k: int) -> np.ndarray:
        return self.encode(self.coords[a] * k)

    @property
    def perms(self) -> list[np.ndarray]:
        if self._perm_cache is None:
            self._perm_cache = [self.encode(self.coords @ A) for A in self.mats]
        return self._perm_cache

    @property
    def group_elements(self) -> list[np.ndarray]:
        """The image of the acting group, as permutations of element codes."""
        if not hasattr(self, "_group"):
            ident = np.arange(self.size, dtype=np.int64)
            seen = {ident.tobytes(): ident}
            frontier = [ident]
            while frontier:
                nxt = []
                for g in frontier:
                    for s in self.perms:
                        h = s[g]
                        key = h.tobytes()
                        if key not in seen:
                            seen[key] = h
                            nxt.append(h)
                frontier = nxt
            self._group = list(seen.values())
        return self._group

    def order_of(self, x: int) -> int:
        o = 1
        for c, q in zip(self.coords[x], self.cyclic_orders):
            o = max(o, q // math.gcd(int(c), q))
        return o

    @property
    def exponent(self) -> int:
        return max(self.cyclic_orders)

    # submodules ------------------------------------------------------------

    def span(self, gens: Sequence[int], base: np.ndarray | None = None) -> np.ndarray:
        """Subgroup generated by gens (plus ``base``) as a boolean mask."""
        mask = np.zeros(self.size, dtype=bool)
        mask[0] = True
        if base is not None:
            mask |= base
        for g in gens:
            if mask[g]:
                continue
            cur = np.nonzero(mask)[0]
            multiples = self.encode(self.coords[g][None, :] * np.arange(self.order_of(g))[:, None])
            sums = self.add(cur[:, None], multiples[None, :]).ravel()
            mask[sums] = True
        return mask

    def submodule(self, gens: Sequence[int]) -> np.ndarray:
        orbit = set()
        for g in gens:
            orbit.update(int(h[g]) for h in self.group_elements)
        return self.span(sorted(orbit))

    def submodules(self, cap: int = SUBMODULE_CAP) -> list[np.ndarray]:
        """Every submodule, as boolean masks."""
        cyc: dict[bytes, np.ndarray] = {}
        for x in range(self.size):
            m = self.submodule([x])
            cyc.setdefault(m.tobytes(), m)
        cyclic = list(cyc.values())
        zero = np.zeros(self.size, dtype=bool)
        zero[0] = True
        found = {zero.tobytes(): zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for A in frontier:
                for B in cyclic:
                    if (B & ~A).any():
                        S = self.span(np.nonzero(B)[0].tolist(), A)
                        key = S.tobytes()
                        if key not in found:
                            if len(found) >= cap:
                                raise CapExceeded(f"more than {cap} submodules")
                            found[key] = S
                            nxt.append(S)
            frontier = nxt
        return list(found.values())

    def mask_exponent(self, mask: np.ndarray) -> int:
        return max(self.order_of(int(x)) for x in np.nonzero(mask)[0])

    def p_multiple(self, mask: np.ndarray, i: int) -> np.ndarray:
        out = np.zeros(self.size, dtype=bool)
        out[self.scale(np.nonzero(mask)[0], self.p**i)] = True
        return out


def _is_power(q: int, p: int) -> bool:
    while q % p == 0:
        q //= p
    return q == 1


@dataclass
class Layer:
    index: int
    dim: int
    matrices: list[np.ndarray]  # F_p matrices of the group generators, row convention
    simple: bool


def layer(M: GModule, i: int) -> Layer:
    """p^i M / p^(i+1) M with the induced F_p action."""
    p = M.p
    full = np.ones(M.size, dtype=bool)
    top = M.p_multiple(full, i)
    bottom = M.p_multiple(full, i + 1)
    basis: list[int] = []
    span = bottom.copy()
    for x in np.nonzero(top)[0]:
        if not span[x]:
            basis.append(int(x))
            span = M.span([int(x)], span)
    dim = len(basis)
    if dim > LAYER_DIM_CAP:
        raise CapExceeded(f"layer dimension {dim} exceeds cap {LAYER_DIM_CAP}")
    # label every element of top by its coordinates over the basis
    label = np.full(M.size, -1, dtype=np.int64)
    bot = np.nonzero(bottom)[0]
    combos = list(itertools.product(range(p), repeat=dim))
    for ci, c in enumerate(combos):
        v = M.encode(sum((M.coords[b] * k for b, k in zip(basis, c)), np.zeros(M.rank, dtype=np.int64)))
        label[M.add(np.full(len(bot), v), bot)] = ci
    mats = []
    for perm in M.perms:
        A = np.zeros((dim, dim), dtype=np.int64)
        for r, b in enumerate(basis):
            A[r] = combos[label[perm[b]]]
        mats.append(A)
    simple = _is_irreducible(mats, p, dim)
    return Layer(i, dim, mats, simple)


def _is_irreducible(mats: list[np.ndarray], p: int, dim: int) -> bool:
    if dim == 0:
        return False
    for v in itertools.product(range(p), repeat=dim):
        if not any(v):
            continue
        rows = [np.array(v, dtype=np.int64)]
        span = fp.Echelon(np.array(rows), p, dim)
        changed = True
        while changed:
            changed = False
            for A in mats:
                for row in list(span.basis):
                    w = fp.matmul(row.reshape(1, -1), A, p)[0]
                    if not span.contains(w):
                        span = fp.Echelon(np.vstack([span.basis, w]), p, dim)
                        changed = True
        if span.dim < dim:
            return False
    return True


def layers_isomorphic(A: Layer, B: Layer, p: int) -> bool:
    """Search the space of intertwiners T (A_g T = T B_g for all g) for an invertible one."""
    if A.dim != B.dim:
        return False
    d = A.dim
    if d == 0:
        return True
    # unknowns T[r, c] flattened; equations (A_g T - T B_g)[r, c] = 0
    eqs = []
    for Ag, Bg in zip(A.matrices, B.matrices):
        for r in range(d):
            for c in range(d):
                row = np.zeros(d * d, dtype=np.int64)
                for k in range(d):
                    row[k * d + c] += Ag[r, k]
                    row[r * d + k] -= Bg[k, c]
                eqs.append(row % p)
    ns = fp.nullspace(np.array(eqs), p) if eqs else np.eye(d * d, dtype=np.int64)
    for coeffs in itertools.product(range(p), repeat=len(ns)):
        if not any(coeffs):
            continue
        T = fp.matmul(np.array(coeffs).reshape(1, -1), ns, p).reshape(d, d)
        if fp.rank(T, p) == d:
            return True
    return False


@dataclass
class Lemma1Report:
    module: str
    exponent: int
    submodules: int
    premise1: bool
    indecomposable: bool
    results: dict[str, str] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return any(v == VIOLATED for v in self.results.values())


def check_lemma1(M: GModule) -> Lemma1Report:
    """Check both assertions of the coprime module lemma on M by exhaustion."""
    M.validate()
    subs = M.submodules()
    full = np.ones(M.size, dtype=bool)
    e = M.exponent
    proper = [S for S in subs if S.sum() < M.size]
    premise1 = all(M.mask_exponent(S) < e for S in proper)
    # direct decompositions into two nonzero submodules
    decomposition = None
    nonzero_proper = [S for S in proper if S.sum() > 1]
    for A, B in itertools.combinations(nonzero_proper, 2):
        if (A & B).sum() == 1 and A.sum() * B.sum() == M.size:
            decomposition = (int(A.sum()), int(B.sum()))
            break
    indecomposable = decomposition is None
    rep = Lemma1Report(M.name, e, len(subs), premise1, indecomposable)
    rep.details["decomposition_orders"] = decomposition
    k = round(math.log(e, M.p))
    socle = np.array([M.order_of(x) <= M.p for x in range(M.size)])
    rank = round(math.log(int(socle.sum()), M.p))
    homogeneous = M.size == e**rank
    rep.details["homogeneous"] = homogeneous
    if premise1:
        rep.results["1a homogeneous"] = VERIFIED if homogeneous else VIOLATED
        try:
            lays = [layer(M, i) for i in range(k)]
        except CapExceeded as exc:
            rep.results["1b layers"] = f"skipped: {exc}"
            lays = None
        if lays is not None:
            simple = all(L.simple for L in lays)
            iso = all(layers_isomorphic(lays[0], L, M.p) for L in lays[1:])
            rep.details["layer_dims"] = [L.dim for L in lays]
            rep.results["1b layers isomorphic and simple"] = VERIFIED if simple and iso else VIOLATED
        low = M.p_multiple(full, k - 1)
        low_idx = np.nonzero(low)[0]
        ok_c = True
        for g in M.group_elements:
            if np.array_equal(g[low_idx], low_idx) and not np.array_equal(g, np.arange(M.size)):
                ok_c = False
        rep.results["1c trivial on lower layer implies trivial"] = VERIFIED if ok_c else VIOLATED
    else:
        for key in ("1a homogeneous", "1b layers isomorphic and simple", "1c trivial on lower layer implies trivial"):
            rep.results[key] = VACUOUS
    if indecomposable:
        rep.results["2 indecomposable implies smaller exponents"] = VERIFIED if premise1 else VIOLATED
    else:
        rep.results["2 indecomposable implies smaller exponents"] = VACUOUS
    return rep


def module_fixtures() -> list[GModule]:
    """Small modules over coprime group rings used as regression fixtures."""
    B3 = [[0, 1], [-1, -1]]  # order 3 over the integers
    return [
        GModule([9], 3, [[[-1]]], 2, "Z9, inversion"),
        GModule([3, 9], 3, [], 1, "Z3+Z9, trivial"),
        GModule([3, 3], 3, [[[0, 1], [1, 0]]], 2, "Z3^2, swap"),
        GModule([5], 5, [[[2]]], 4, "Z5, x2"),
        GModule([7], 7, [[[2]]], 3, "Z7, x2"),
        GModule([2, 2], 2, [B3], 3, "Z2^2, order 3"),
        GModule([4, 4], 2, [B3], 3, "Z4^2, order 3"),
        GModule([2, 2, 2], 2, [[[0, 1, 0], [0, 0, 1], [1, 1, 0]]], 7, "Z2^3, Singer cycle"),
        GModule([3, 3], 3, [[[1, 0], [0, -1]]], 2, "Z3^2, diag(1,-1)"),
        GModule([27], 3, [], 1, "Z27, trivial"),
        GModule([4, 2], 2, [], 1, "Z4+Z2, trivial"),
        GModule([9, 9], 3, [[[0, -1], [1, 0]]], 4, "Z9^2, order 4"),
        GModule([5, 5], 5, [[[0, -1], [1, -1]]], 3, "Z5^2, order 3"),
    ]


# ---------------------------------------------------------------------------
# centre of a centraliser as a direct factor


@dataclass
class DirectFactorReport:
    L: Subgroup
    ZL: Subgroup
    complement: Subgroup | None
    psi: dict[int, bool]
    homs_searched: int

    @property
    def found(self) -> bool:
        return self.complement is not None

    @property
    def psi_all(self) -> bool:
        return all(self.psi.values())

    @property
    def consistent(self) -> bool:
        return self.found == self.psi_all


def _centre_of_subgroup(S: Subgroup) -> Subgroup:
    G = S.parent
    return Subgroup(G, [x for x in S.members if all(G.op(x, y) == G.op(y, x) for y in S.generators)])


def centre_direct_factor_check(H: FiniteGroup, N: Subgroup | None = None, cap: int = gr.LATTICE_CAP) -> DirectFactorReport:
    """Is Z(L) a direct factor of L = C_H(Z(N)) with an H-normal complement?

    Runs two independent searches: an H-normal complement D of Z(L) in L,
    and, for each prime p, an H-equivariant homomorphism L -> Z(L) that is
    injective on the p-part of Z(L).
    """
    N = H.whole() if N is None else N
    if not N.is_normal(H):
        raise GroupError("N is not normal in H")
    ZN = _centre_of_subgroup(N)
    L = gr.centralizer(H, ZN)
    ZL = _centre_of_subgroup(L)
    complement = None
    for D in gr.normal_subgroups(H, cap):
        if D <= L and len(D.set & ZL.set) == 1 and D.order * ZL.order == L.order:
            complement = D
            break
    psi: dict[int, bool] = {}
    Lg, incl = L.as_group("L")
    pos = {int(x): i for i, x in enumerate(incl.image)}
    zl_local = [pos[z] for z in ZL.members]
    h_gens = [g for _, g in H.generators]
    count = 0
    homs = []
    for phi in gr.iter_homomorphisms(Lg, Lg, candidates=zl_local):
        count += 1
        img = incl.image[phi.image]  # L-local -> H index
        equivariant = True
        for h in h_gens:
            for x in Lg.generators:
                xh = H.conj(int(incl.image[x[1]]), h)
                if int(img[pos[xh]]) != H.conj(int(img[x[1]]), h):
                    equivariant = False
                    break
            if not equivariant:
                break
        if equivariant:
            homs.append(img)
    for p in gr.prime_factors(ZL.order):
        Zp = gr.p_component(ZL, p)
        psi[p] = any(len({int(img[pos[z]]) for z in Zp.members}) == Zp.order for img in homs)
    return DirectFactorReport(L, ZL, complement, psi, count)
