"""Overgroups G = Q/R of H built from a fibered product of t copies of H.

Q = {(h_1..h_t) : h_1 L = ... = h_t L} with L = C_H(Z(N)), and R is an
F_p-subspace of C^t where C is the elementary abelian part of the p-primary
centre of L. H sits in G diagonally.

Two representations:

* explicit: Q and G = Q/R as Cayley tables (small t);
* implicit: elements of G as t-tuples over H in a normal form. A tuple h is
  written h_i = s_i c_i with s_i a fixed representative of h_i C and
  c_i in C; the vector (c_1..c_t) is reduced modulo an echelon basis of R.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import approx
from . import fp
from . import groups as gr
from . import words as wd
from .groups import CapExceeded, FiniteGroup, GroupError, Homomorphism, Subgroup
from .report import ABSENT, FAIL, FINDING, PASS, UNKNOWN, RunReport

EXPLICIT = "explicit"
IMPLICIT = "implicit"
EXPLICIT_CAP = 4096


class CentreLabError(GroupError):
    pass


def elementary_basis(C: Subgroup, p: int) -> list[int]:
    """A basis of the elementary abelian p-group C, greedy in index order."""
    G = C.parent
    basis: list[int] = []
    span = {0}
    for x in C.members:
        if x not in span:
            basis.append(x)
            span = {G.op(a, G.power(x, k)) for a in span for k in range(p)}
    if len(span) != C.order:
        raise CentreLabError("C is not elementary abelian")
    return basis


@dataclass
class FiberedQuotient:
    H: FiniteGroup
    N: Subgroup
    L: Subgroup
    ZL: Subgroup
    p: int
    C: Subgroup
    c_basis: list[int]
    t: int
    R: fp.Echelon  # subspace of F_p^(t*d)
    representation: str
    k: int | None = None
    polynomial: approx.PolySubgroupR | None = None
    warnings: list[str] = field(default_factory=list)
    # explicit
    Q: FiniteGroup | None = None
    R_sub: Subgroup | None = None
    G: FiniteGroup | None = None
    proj: Homomorphism | None = None
    diag: np.ndarray | None = None  # H index -> G index
    # implicit tables
    _rep: np.ndarray | None = None
    _cvec: np.ndarray | None = None
    _c_elem: dict | None = None

    @property
    def d(self) -> int:
        return len(self.c_basis)

    @property
    def H_diag(self) -> Subgroup:
        return Subgroup(self.G, set(self.diag.tolist()))

    # C <-> F_p^d --------------------------------------------------------

    def c_element(self, v) -> int:
        H = self.H
        x = 0
        for b, k in zip(self.c_basis, v):
            x = H.op(x, H.power(b, int(k)))
        return x

    @property
    def c_coords(self) -> dict[int, tuple[int, ...]]:
        if self._c_elem is None:
            self._c_elem = {self.c_element(v): v for v in itertools.product(range(self.p), repeat=self.d)}
        return self._c_elem

    def conj_matrix(self, h: int) -> np.ndarray:
        """Matrix of c -> h c h^-1 on C in row convention."""
        rows = []
        for b in self.c_basis:
            rows.append(self.c_coords[self.H.conj(b, h)])
        return np.array(rows, dtype=np.int64)

    # implicit normal form ------------------------------------------------

    def _tables(self):
        if self._rep is None:
            H = self.H
            rep = np.full(H.order, -1, dtype=np.int32)
            cvec = np.zeros((H.order, self.d), dtype=np.int64)
            Cm = self.C.members
            for h in range(H.order):
                if rep[h] >= 0:
                    continue
                for c in Cm:
                    x = H.op(h, c)
                    rep[x] = h
                    cvec[x] = self.c_coords[c]
            self._rep, self._cvec = rep, cvec
            self._c_lookup = np.zeros([self.p] * self.d, dtype=np.int32) if self.d else None
            for v, e in ((v, e) for e, v in self.c_coords.items()):
                self._c_lookup[tuple(v)] = e
        return self._rep, self._cvec

    def normalize(self, tup: np.ndarray) -> np.ndarray:
        """Canonical representative of tup R, for one tuple or a stack of tuples."""
        rep, cvec = self._tables()
        T = np.asarray(tup)
        s = rep[T]
        v = cvec[T].reshape(*T.shape[:-1], self.t * self.d)
        red = self.R.reduce(v).reshape(*T.shape, self.d)
        c = self._c_lookup[tuple(red[..., a] for a in range(self.d))]
        return self.H.mul[s, c]

    def c_vector(self, tup: np.ndarray) -> np.ndarray | None:
        """The C^t vector of a tuple lying in C^t, else None."""
        if not all(int(x) in self.C for x in np.asarray(tup).ravel()):
            return None
        _, cvec = self._tables()
        return cvec[np.asarray(tup)].reshape(-1)

    def in_R(self, tup: np.ndarray) -> bool:
        v = self.c_vector(tup)
        return v is not None and bool(self.R.contains(v))

    def summary(self) -> dict:
        out = {
            "H": self.H.name, "|H|": self.H.order, "|L|": self.L.order, "|Z(L)|": self.ZL.order,
            "p": self.p, "d": self.d, "t": self.t, "dim R": self.R.dim, "representation": self.representation,
        }
        if self.k is not None:
            out["k"] = self.k
        if self.polynomial is not None:
            out["r"], out["n"] = self.polynomial.r, self.polynomial.n
        if self.G is not None:
            out["|Q|"], out["|G|"] = self.Q.order, self.G.order
        return out


def _centre_of(S: Subgroup) -> Subgroup:
    G = S.parent
    return Subgroup(G, [x for x in S.members if all(G.op(x, y) == G.op(y, x) for y in S.generators)])


def sum_zero(t: int, d: int = 1, p: int = 2) -> np.ndarray:
    """Rows spanning {v in (F_p^d)^t : v_1 + ... + v_t = 0}; for p = 2, d = 1 the even-weight code."""
    rows = []
    for i in range(t - 1):
        for a in range(d):
            v = np.zeros(t * d, dtype=np.int64)
            v[i * d + a] = 1
            v[(t - 1) * d + a] = p - 1
            rows.append(v)
    return np.array(rows, dtype=np.int64).reshape(-1, t * d)


def read_rows(text: str) -> np.ndarray:
    rows = [[int(x) for x in line.split()] for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    return np.array(rows, dtype=np.int64)


def build_counterexample(
    H: FiniteGroup,
    N: Subgroup | None = None,
    p: int = 2,
    *,
    t: int | None = None,
    R_rows: np.ndarray | None = None,
    paper: bool = False,
    explicit_cap: int = EXPLICIT_CAP,
    lattice_cap: int = gr.LATTICE_CAP,
) -> FiberedQuotient:
    """Assemble Q, R and (when small enough) G = Q/R."""
    N = H.whole() if N is None else N
    if not N.is_normal(H):
        raise GroupError("N is not normal in H")
    L = gr.centralizer(H, _centre_of(N))
    ZL = _centre_of(L)
    C = gr.elementary_socle(gr.p_component(ZL, p), p)
    if C.order == 1:
        raise CentreLabError(f"Z(L) has no elements of order {p}")
    basis = elementary_basis(C, p)
    d = len(basis)
    k = None
    poly = None
    warnings = []
    from .structure import centre_direct_factor_check

    chk = centre_direct_factor_check(H, N, lattice_cap)
    if chk.psi.get(p, False):
        warnings.append(f"an equivariant psi_{p} exists; the construction is not expected to block retractions")
    if paper:
        k = len(gr.all_subgroups(H, lattice_cap))
        poly = approx.construct(p, d, k)
        t = poly.t
        rows = poly.echelon.basis
    else:
        if t is None:
            raise CentreLabError("t is required unless paper parameters are requested")
        rows = R_rows if R_rows is not None else np.zeros((0, t * d), dtype=np.int64)
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, t * d)
    R = fp.Echelon(rows, p, t * d)
    size = (H.order // L.order) * L.order**t // p**R.dim
    q_size = (H.order // L.order) * L.order**t
    rep = EXPLICIT if q_size <= explicit_cap else IMPLICIT
    fq = FiberedQuotient(H, N, L, ZL, p, C, basis, t, R, rep, k, poly, warnings)
    if rep == EXPLICIT:
        _build_explicit(fq)
        if fq.G.order != size:
            raise CentreLabError("|G| differs from |Q|/|R|")
    return fq


def _build_explicit(fq: FiberedQuotient) -> None:
    H, t, p = fq.H, fq.t, fq.p
    Q = gr.fibered_product(H, fq.L, t, cap=EXPLICIT_CAP)
    lookup = {tuple(row): i for i, row in enumerate(Q.tuples.tolist())}
    members = set()
    B = fq.R.basis
    for coeffs in itertools.product(range(p), repeat=fq.R.dim):
        v = fp.matmul(np.array(coeffs, dtype=np.int64).reshape(1, -1), B, p)[0] if fq.R.dim else np.zeros(t * fq.d, dtype=np.int64)
        tup = tuple(fq.c_element(v[i * fq.d : (i + 1) * fq.d]) for i in range(t))
        members.add(lookup[tup])
    R_sub = Subgroup(Q, members)
    if not R_sub.is_normal(Q):
        raise CentreLabError("R is not normal in Q")
    G, proj = gr.quotient(Q, R_sub)
    G.name = f"Fib({H.name},{t})/R"
    diag = np.array([proj(lookup[(h,) * t]) for h in range(H.order)], dtype=np.int32)
    fq.Q, fq.R_sub, fq.G, fq.proj, fq.diag = Q, R_sub, G, proj, diag


# ---------------------------------------------------------------------------
# structural checks


def check_R_normal(fq: FiberedQuotient) -> bool:
    """R is stable under conjugation by the generators of Q."""
    if fq.representation == EXPLICIT:
        Q = fq.Q
        return all(Q.conj(r, g) in fq.R_sub for r in fq.R_sub.generators for _, g in Q.generators)
    # coordinate copies of L centralise C^t; diagonal H acts through Aut(C)
    if not fq.R.dim:
        return True
    for _, h in fq.H.generators:
        M = fq.conj_matrix(h)
        V = fq.R.basis.reshape(-1, fq.t, fq.d)
        W = np.einsum("kta,ab->ktb", V, M) % fq.p
        if not fq.R.contains(W.reshape(-1, fq.t * fq.d)).all():
            return False
    return True


def check_diagonal_injective(fq: FiberedQuotient) -> bool:
    if fq.representation == EXPLICIT:
        hom = Homomorphism(fq.H, fq.G, fq.diag)
        return hom.is_homomorphism() and hom.is_injective()
    # diag(h) lies in R only if h is in C; test those directly
    for c in fq.C.members:
        if c and fq.in_R(np.full(fq.t, c)):
            return False
    return True


# ---------------------------------------------------------------------------
# verbal closedness mechanism


@dataclass
class MechanismReport:
    mode: str
    samples: int
    solutions: int
    passed: bool
    closure: wd.ClosureReport | None = None
    failures: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def random_word(rng, s: int, length: int) -> wd.Word:
    names = wd.variable_names(s)
    letters = [(names[int(rng.integers(s))], int(rng.choice([-1, 1]))) for _ in range(length)]
    return wd.Word(wd._merge(tuple(letters)))


def verify_mechanism(
    fq: FiberedQuotient,
    *,
    s_max: int = 2,
    samples: int = 1000,
    max_vars: int = 3,
    max_length: int = 10,
    seed: int = 0,
    map_cap: int = wd.MAP_CAP,
) -> MechanismReport:
    """Explicit: bounded verbal closedness of diag(H) in G.

    Implicit: sampled (word, tuple) pairs. Each tuple is a diagonal tuple
    multiplied coordinatewise by random elements of R, so it solves
    w = w(x) in G; the R-discrepancy must vanish at some coordinate, whose
    slice then solves the equation in H. Random fibered tuples are also
    tested for landing on the diagonal modulo R.
    """
    if fq.representation == EXPLICIT:
        rep = wd.decide_verbally_closed(fq.G, fq.H_diag, s_max, map_cap=map_cap, seed=seed)
        return MechanismReport(EXPLICIT, 0, 0, rep.closed and rep.complete, closure=rep, notes=rep.notes)
    rng = np.random.default_rng(seed)
    H, t = fq.H, fq.t
    out = MechanismReport(IMPLICIT, 0, 0, True)
    Rb = fq.R.basis
    Lm = np.array(fq.L.members, dtype=np.int32)
    for _ in range(samples):
        s = int(rng.integers(1, max_vars + 1))
        w = random_word(rng, s, int(rng.integers(1, max_length + 1)))
        names = wd.variable_names(s)
        x = rng.integers(0, H.order, size=s)
        env = {}
        for j, name in enumerate(names):
            if fq.R.dim:
                coeff = rng.integers(0, fq.p, size=(1, fq.R.dim))
                r = fp.matmul(coeff, Rb, fq.p)[0]
            else:
                r = np.zeros(t * fq.d, dtype=np.int64)
            ctup = fq._c_lookup[tuple(r.reshape(t, fq.d)[:, a] for a in range(fq.d))]
            env[name] = H.mul[np.full(t, x[j]), ctup]
        h = wd.evaluate(w, H, {n: int(v) for n, v in zip(names, x)})
        val = wd.evaluate_many(w, H, env)
        disc = H.mul[np.full(t, H.inverse(h)), val]
        out.samples += 1
        out.solutions += 1
        v = fq.c_vector(disc)
        ok = v is not None and bool(fq.R.contains(v))
        zero = np.nonzero(disc == 0)[0]
        slice_ok = False
        if ok and len(zero):
            i = int(zero[0])
            slice_ok = wd.evaluate(w, H, {n: int(env[n][i]) for n in names}) == h
        if not (ok and len(zero) and slice_ok):
            out.passed = False
            out.failures.append({"word": str(w), "in_R": ok, "zero_coordinates": len(zero)})
        # a random fibered tuple: diagonal modulo R?
        env2 = {}
        for name in names:
            top = int(rng.integers(0, H.order))
            env2[name] = H.mul[np.full(t, top), Lm[rng.integers(0, len(Lm), size=t)]]
        g = wd.evaluate_many(w, H, env2)
        for c in fq.C.members:
            h2 = H.op(int(g[0]), c)
            disc2 = H.mul[np.full(t, H.inverse(h2)), g]
            v2 = fq.c_vector(disc2)
            if v2 is not None and fq.R.contains(v2):
                out.solutions += 1
                zero2 = np.nonzero(disc2 == 0)[0]
                good = len(zero2) > 0 and wd.evaluate(w, H, {n: int(env2[n][zero2[0]]) for n in names}) == h2
                if not good:
                    out.passed = False
                    out.failures.append({"word": str(w), "random_tuple": True})
                break
    out.notes.append(f"{out.solutions} G-solutions examined over {out.samples} sampled words")
    return out


# ---------------------------------------------------------------------------
# retractions


@dataclass
class RetractionReport:
    status: str  # FOUND / ABSENT / UNKNOWN
    rho: Homomorphism | None = None
    echo: dict[int, bool] | None = None
    reason: str = ""


def report_retraction(fq: FiberedQuotient, cap: int = gr.RETRACTION_CAP) -> RetractionReport:
    if fq.representation != EXPLICIT:
        return RetractionReport(
            UNKNOWN,
            reason=f"implicit representation (t = {fq.t}); exhaustive retraction search is infeasible",
        )
    try:
        rho = gr.find_retraction(fq.G, fq.H_diag, cap=cap)
    except CapExceeded as exc:
        return RetractionReport(UNKNOWN, reason=str(exc))
    if rho is None:
        return RetractionReport("ABSENT")
    return RetractionReport("FOUND", rho, star_echo(fq, rho))


def star_echo(fq: FiberedQuotient, rho: Homomorphism) -> dict[int, bool]:
    """For each coordinate i, does rho(proj(L_i)) lie in C_H(C_H(L)) (read through the diagonal)?"""
    H, t = fq.H, fq.t
    back = {int(g): h for h, g in enumerate(fq.diag.tolist())}
    cc = gr.centralizer(H, gr.centralizer(H, fq.L))
    lookup = {tuple(row): i for i, row in enumerate(fq.Q.tuples.tolist())}
    out = {}
    for i in range(t):
        ok = True
        for l in fq.L.members:
            tup = [0] * t
            tup[i] = l
            img = rho(fq.proj(lookup[tuple(tup)]))
            if back[img] not in cc:
                ok = False
                break
        out[i + 1] = ok
    return out


def run_pipeline(
    H: FiniteGroup,
    *,
    N: Subgroup | None = None,
    p: int = 2,
    t: int | None = None,
    R_rows: np.ndarray | None = None,
    paper: bool = False,
    s_max: int = 2,
    samples: int = 1000,
    seed: int = 0,
) -> RunReport:
    rep = RunReport(f"centre-lab H={H.name} p={p} " + ("polynomial parameters" if paper else f"t={t}"))
    fq = build_counterexample(H, N, p, t=t, R_rows=R_rows, paper=paper)
    rep.add("construction", PASS, **fq.summary(), warnings=fq.warnings)
    rep.passed("R normal in Q", check_R_normal(fq))
    rep.passed("diagonal embedding injective", check_diagonal_injective(fq))
    if fq.representation == EXPLICIT:
        expected = fq.Q.order // fq.p**fq.R.dim
        rep.passed("|G| = |Q|/|R|", fq.G.order == expected, G=fq.G.order, Q=fq.Q.order, R=fq.p**fq.R.dim)
    mech = verify_mechanism(fq, s_max=s_max, samples=samples, seed=seed)
    details = {"mode": mech.mode}
    if mech.closure is not None:
        details["closure"] = mech.closure.summary()
        details["per_arity"] = mech.closure.per_arity
    else:
        details.update(samples=mech.samples, solutions=mech.solutions, failures=mech.failures[:5])
    rep.passed("verbal closedness mechanism", mech.passed, **details)
    rr = report_retraction(fq)
    if rr.status == "FOUND":
        rep.add("retraction", FINDING, result="FOUND", star_echo=rr.echo)
        rep.passed("(*) echo", all(rr.echo.values()))
    elif rr.status == "ABSENT":
        rep.add("retraction", ABSENT, result="ABSENT")
    else:
        rep.add("retraction", UNKNOWN, reason=rr.reason)
    return rep
