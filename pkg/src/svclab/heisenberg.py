"""Word maps on UT3(Z), the integer Heisenberg group.

T(x, y, z) is the unitriangular matrix with x, y above the diagonal and z
in the corner, so T(x1,y1,z1) T(x2,y2,z2) = T(x1+x2, y1+y2, z1+z2+x1 y2).
A word w(t_1..t_s) then evaluates to

    T(l.x, l.y, x^T F y + l.z)

with l the exponent-sum vector and F an integer matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import smith as sm
from . import words as wd
from .report import FAIL, FINDING, PASS, RunReport
from .words import Word

FIXTURE_WORDS = (
    ("[t1,t2]", 2),
    ("t1^2", 1),
    ("t1", 1),
    ("t1 t2 t1^-1 t2", 2),
    ("t1^2 t2^3 [t1,t3]", 3),
    ("t1 t2 t3^-2", 3),
)
ENUM_COORDS = 8
SAMPLE_TUPLES = 200_000


class LemmaHypothesisError(ValueError):
    """The bilinear form has rank < 2 on U' x V."""


@dataclass(frozen=True)
class HElement:
    x: int
    y: int
    z: int

    def __mul__(self, o: HElement) -> HElement:
        return HElement(self.x + o.x, self.y + o.y, self.z + o.z + self.x * o.y)

    def inverse(self) -> HElement:
        return HElement(-self.x, -self.y, -self.z + self.x * self.y)

    @property
    def is_central(self) -> bool:
        return self.x == 0 and self.y == 0

    @classmethod
    def one(cls) -> HElement:
        return cls(0, 0, 0)


def _power(g, e: int, one):
    if e < 0:
        g, e = g.inverse(), -e
    out = one
    while e:
        if e & 1:
            out = out * g
        g = g * g
        e >>= 1
    return out


def evaluate_word(w: Word, assignment: dict, one):
    """Letter-by-letter product for any group elements with * and inverse()."""
    out = one
    for sym, e in w.letters:
        out = out * _power(assignment[sym], e, one)
    return out


# ---------------------------------------------------------------------------
# symbolic extraction


@dataclass
class BilinearData:
    s: int
    l: tuple[int, ...]
    F: sm.Matrix
    names: tuple[str, ...]

    def f(self, u, v) -> int:
        return sum(int(u[i]) * self.F[i][j] * int(v[j]) for i in range(self.s) for j in range(self.s))

    def lin(self, u) -> int:
        return sum(a * int(b) for a, b in zip(self.l, u))

    def value(self, xs, ys, zs) -> HElement:
        return HElement(self.lin(xs), self.lin(ys), self.f(xs, ys) + self.lin(zs))

    @property
    def kernel(self) -> sm.Matrix:
        """Basis vectors of U' = ker l."""
        return sm.kernel_basis(self.l)

    @property
    def restricted(self) -> sm.Matrix:
        """Gram matrix of f on ker l x ker l."""
        K = self.kernel
        return [[self.f(a, b) for b in K] for a in K]

    @property
    def restricted_smith(self) -> sm.SmithForm | None:
        R = self.restricted
        return sm.smith(R) if R else None

    @property
    def restricted_rank(self) -> int:
        S = self.restricted_smith
        return S.rank if S else 0

    @property
    def n1(self) -> int:
        """Generator of f(U', V) as a subgroup of Z (0 when f vanishes there)."""
        S = self.restricted_smith
        return S.D[0] if S and S.rank else 0

    @property
    def centre_generator(self) -> int:
        """g with image(w) meet Z(H) = {T(0,0,c) : c in gZ}."""
        return math.gcd(self.n1, sm.gcd_all(self.l))


def extract(w: Word, s: int | None = None, names=None) -> BilinearData:
    """Symbolic triple of w: linear forms in x, y, z and a bilinear form in (x, y)."""
    if names is None:
        if s is None:
            s = max((int(sym[1:]) for sym in w.symbols() if sym[1:].isdigit()), default=0)
        names = wd.variable_names(s)
    names = tuple(names)
    s = len(names)
    pos = {n: i for i, n in enumerate(names)}
    stray = [sym for sym in w.symbols() if sym not in pos]
    if stray:
        raise ValueError(f"coefficient letters are not allowed: {stray}")
    lx, ly, lz = [0] * s, [0] * s, [0] * s
    F = [[0] * s for _ in range(s)]
    for sym, e in w.letters:
        i = pos[sym]
        # current * T(e d_i, e d_i, e(e-1)/2 d_i d_i^T + e d_i)
        for a in range(s):
            F[a][i] += lx[a] * e
        F[i][i] += e * (e - 1) // 2
        lx[i] += e
        ly[i] += e
        lz[i] += e
    assert lx == ly == lz
    return BilinearData(s, tuple(lx), F, names)


def in_normal_form(bd: BilinearData) -> bool:
    """l = m e_i for a single i, the shape w = t_i^m w' with w' a product of commutators."""
    return sum(1 for a in bd.l if a) <= 1


def diagonal_value(bd: BilinearData, u) -> int:
    """f(u, u) by the closed form ((l.u)^2 - sum l_i u_i^2) / 2."""
    lu = bd.lin(u)
    return (lu * lu - sum(a * int(x) * int(x) for a, x in zip(bd.l, u))) // 2


def skew_check(bd: BilinearData, samples: int = 50, seed: int = 0) -> bool:
    """f(u, u) = 0 on ker l: Gram matrix antisymmetric plus random combinations.

    Guaranteed only for words in normal form; otherwise f(u, u) equals
    -sum l_i u_i^2 / 2 on ker l, which need not vanish.
    """
    R = bd.restricted
    k = len(R)
    if any(R[i][j] + R[j][i] for i in range(k) for j in range(k)):
        return False
    rng = np.random.default_rng(seed)
    K = bd.kernel
    for _ in range(samples if k else 0):
        c = [int(x) for x in rng.integers(-20, 21, size=k)]
        u = [sum(c[j] * K[j][i] for j in range(k)) for i in range(bd.s)]
        if bd.lin(u) != 0 or bd.f(u, u) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# affine-bilinear lemma


@dataclass
class AffineImage:
    g: int  # f(u + U', V) = gZ
    n: list[int]  # Smith diagonal of f on U' x V
    m: list[int]  # affine coefficients in Smith coordinates
    rank: int
    F: sm.Matrix
    u: list[int]
    U_basis: sm.Matrix
    V_basis: sm.Matrix

    @property
    def n1(self) -> int:
        return self.n[0]


def _identity_basis(n: int) -> sm.Matrix:
    return sm.identity(n)


def affine_image_subgroup(F, u, U_basis=None, V_basis=None) -> AffineImage:
    """f(u + U', V) for f(a, b) = a^T F b, U' and V spanned by the given basis vectors.

    In Smith coordinates f(u + u', v) = sum n_i x_i y_i + sum m_i y_i, and the
    image is GCD(n_1, m_1, m_2, ...) Z whenever the rank is at least two.
    """
    F = [[int(x) for x in row] for row in F]
    a, b = len(F), len(F[0])
    U_basis = _identity_basis(a) if U_basis is None else [list(map(int, r)) for r in U_basis]
    V_basis = _identity_basis(b) if V_basis is None else [list(map(int, r)) for r in V_basis]
    u = [int(x) for x in u]
    FV = sm.matmul(F, sm.transpose(V_basis))  # a x j
    R = sm.matmul(U_basis, FV)  # k x j
    S = sm.smith(R)
    if S.rank < 2:
        raise LemmaHypothesisError(f"rank of f on U' x V is {S.rank} < 2")
    m = sm.matmul(sm.matmul([u], FV), S.Q)[0]
    g = sm.gcd_all([S.D[0], *m])
    return AffineImage(g, S.D, m, S.rank, F, u, U_basis, V_basis)


def affine_image_oracle(res: AffineImage, box: int) -> set[int]:
    """All values (u + sum a_i U_i)^T F (sum b_j V_j) with |a_i|, |b_j| <= box."""
    rng = np.arange(-box, box + 1, dtype=np.int64)
    A = np.array(list(itertools.product(rng, repeat=len(res.U_basis))), dtype=np.int64)
    B = np.array(list(itertools.product(rng, repeat=len(res.V_basis))), dtype=np.int64)
    UB = np.array(res.U_basis, dtype=np.int64)
    VB = np.array(res.V_basis, dtype=np.int64)
    F = np.array(res.F, dtype=np.int64)
    bound = (sum(map(abs, res.u)) + box * np.abs(UB).sum()) * np.abs(F).sum() * box * np.abs(VB).sum()
    if bound >= 2**62:
        raise OverflowError("box too large for exact int64 evaluation")
    left = (np.array(res.u, dtype=np.int64) + A @ UB) @ F  # |A| x b
    vals = left @ (B @ VB).T
    return set(np.unique(vals).tolist())


def oracle_agrees(res: AffineImage, box: int, max_box: int | None = None) -> tuple[bool, int]:
    """Every box value is a multiple of g and g itself is attained.

    The box grows until g is attained or max_box is passed.
    """
    max_box = max_box or 4 * box
    b = box
    while True:
        vals = affine_image_oracle(res, b)
        if any(v % res.g for v in vals):
            return False, b
        if res.g in vals:
            return True, b
        if b >= max_box:
            return False, b
        b = min(2 * b, max_box)


def random_rank2_instance(rng, dim_max: int = 3, entry: int = 6):
    while True:
        a = int(rng.integers(2, dim_max + 1))
        b = int(rng.integers(2, dim_max + 1))
        k = int(rng.integers(2, a + 1))
        F = rng.integers(-entry, entry + 1, size=(a, b)).tolist()
        U = rng.integers(-2, 3, size=(k, a)).tolist()
        u = rng.integers(-entry, entry + 1, size=a).tolist()
        R = sm.matmul(U, F)
        if sm.smith(R).rank >= 2:
            return F, u, U


# ---------------------------------------------------------------------------
# vectorised direct evaluation


def _eval_arrays(w: Word, names, X, Y, Z):
    """Direct evaluation of w on arrays of triples (one array per variable and slot)."""
    idx = {n: i for i, n in enumerate(names)}
    shape = np.shape(X[0]) if names else ()
    ox, oy, oz = (np.zeros(shape, dtype=np.int64) for _ in range(3))

    def mul(a, b):
        return a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]

    for sym, e in w.letters:
        i = idx[sym]
        g = (X[i], Y[i], Z[i])
        if e < 0:
            g = (-g[0], -g[1], -g[2] + g[0] * g[1])
            e = -e
        p = (np.zeros(shape, dtype=np.int64),) * 3
        while e:
            if e & 1:
                p = mul(p, g)
            g = mul(g, g)
            e >>= 1
        ox, oy, oz = mul((ox, oy, oz), p)
    return ox, oy, oz


def _word_bound(w: Word, box: int) -> int:
    n = sum(abs(e) for _, e in w.letters)
    return (n * box) ** 2 + n * box + 1


# ---------------------------------------------------------------------------
# statement: image meet centre is a subgroup, image is a union of its cosets


@dataclass
class VerbalImageReport:
    word: str
    bd: BilinearData
    rank: int
    g: int
    note: str
    method: str
    window: int
    found: list[int]
    expected: list[int]
    subgroup_agree: bool
    cosets_checked: int = 0
    coset_failures: list[dict] = field(default_factory=list)

    @property
    def coset_ok(self) -> bool:
        return not self.coset_failures


def _central_values(w: Word, bd: BilinearData, box: int, rng) -> tuple[set[int], str]:
    s = bd.s
    if _word_bound(w, box) >= 2**62:
        raise OverflowError("word too long for int64 box enumeration")
    r = np.arange(-box, box + 1, dtype=np.int64)
    if 2 * s <= ENUM_COORDS:
        grid = np.array(list(itertools.product(r, repeat=2 * s)), dtype=np.int64).reshape(-1, 2 * s)
        method = "enumerated"
    else:
        grid = rng.integers(-box, box + 1, size=(SAMPLE_TUPLES, 2 * s))
        method = "sampled"
    X = [grid[:, i] for i in range(s)]
    Y = [grid[:, s + i] for i in range(s)]
    Z = [np.zeros(len(grid), dtype=np.int64)] * s
    x, y, z = _eval_arrays(w, bd.names, X, Y, Z)
    base = set(np.unique(z[(x == 0) & (y == 0)]).tolist())
    # z-coordinates are central: they shift the corner by sum e_i z_i
    sums = [w.exponent_sum(n) for n in bd.names]
    shifts = {sum(a * b for a, b in zip(sums, zz)) for zz in itertools.product(range(-box, box + 1), repeat=s)}
    return {c + d for c in base for d in shifts}, method


def find_preimage(
    bd: BilinearData, w: Word, hat: list[HElement], c: int, search: int = 3
) -> list[HElement] | None:
    """Tuple h~ with w(h~) = w(hat) T(0,0,c), perturbing hat inside ker l.

    h~_i = T(x^_i + u'_i, y^_i + v'_i, z'_i) with u', v' in ker l; z' fixes the
    corner through l. The result is verified by direct evaluation.
    """
    target = evaluate_word(w, dict(zip(bd.names, hat)), HElement.one())
    target = target * HElement(0, 0, c)
    u = np.array([h.x for h in hat], dtype=np.int64)
    v = np.array([h.y for h in hat], dtype=np.int64)
    K = np.array(bd.kernel, dtype=np.int64).reshape(-1, bd.s)
    F = np.array(bd.F, dtype=np.int64)
    gl, coeffs = sm.ext_gcd_vector(bd.l)
    for radius in (search, 2 * search):
        r = np.arange(-radius, radius + 1, dtype=np.int64)
        A = np.array(list(itertools.product(r, repeat=len(K))), dtype=np.int64).reshape(len(r) ** len(K), len(K))
        P = u + A @ K  # candidate x-vectors
        Qv = v + A @ K
        vals = (P @ F) @ Qv.T  # f(p, q)
        need = target.z - vals
        ok = (need == 0) if gl == 0 else (need % gl == 0)
        hits = np.argwhere(ok)
        if len(hits):
            i, j = hits[0]
            rest = int(need[i, j])
            if gl == 0:
                zs = [0] * bd.s
            else:
                zs = [int(cf) * (rest // gl) for cf in coeffs]
            cand = [HElement(int(P[i, a]), int(Qv[j, a]), zs[a]) for a in range(bd.s)]
            if evaluate_word(w, dict(zip(bd.names, cand)), HElement.one()) == target:
                return cand
    return None


def verbal_image_structure(
    w: Word | str, s: int | None = None, box: int = 5, *, coset_samples: int = 20, seed: int = 0
) -> VerbalImageReport:
    if isinstance(w, str):
        w = wd.parse(w)
    bd = extract(w, s)
    rng = np.random.default_rng(seed)
    rank = bd.restricted_rank
    g = bd.centre_generator
    if rank == 0:
        note = "f vanishes on ker l x ker l: nothing to prove beyond l(Z^s)"
    elif rank < 2:
        note = "rank 1 on ker l x ker l: the affine lemma does not apply"
    else:
        note = f"rank {rank} on ker l x ker l"
    found, method = _central_values(w, bd, box, rng)
    window = box * g if g else box
    if g:
        expected = list(range(-window, window + 1, g))
        agree = all(c % g == 0 for c in found) and set(expected) <= found
    else:
        expected = [0]
        agree = found == {0}
    rep = VerbalImageReport(
        str(w), bd, rank, g, note, method, window, sorted(c for c in found if abs(c) <= window), expected, agree
    )
    targets = [c for c in expected if c]
    for _ in range(coset_samples):
        hat = [HElement(*(int(v) for v in rng.integers(-box, box + 1, size=3))) for _ in range(bd.s)]
        for c in targets:
            rep.cosets_checked += 1
            if find_preimage(bd, w, hat, c) is None:
                rep.coset_failures.append({"hat": [(h.x, h.y, h.z) for h in hat], "c": c})
    return rep


# ---------------------------------------------------------------------------
# central product of H with a copy of itself, centres identified


@dataclass(frozen=True)
class CPElement:
    """(T(x,y,z), T~(x~,y~,0)): the corner of the second factor is moved into the first."""

    h: HElement
    xt: int
    yt: int

    def __mul__(self, o: CPElement) -> CPElement:
        return CPElement(self.h * o.h * HElement(0, 0, self.xt * o.yt), self.xt + o.xt, self.yt + o.yt)

    def inverse(self) -> CPElement:
        return CPElement(self.h.inverse() * HElement(0, 0, self.xt * self.yt), -self.xt, -self.yt)

    @classmethod
    def one(cls) -> CPElement:
        return cls(HElement.one(), 0, 0)

    @classmethod
    def pair(cls, h: HElement, ht: HElement) -> CPElement:
        return cls(h * HElement(0, 0, ht.z), ht.x, ht.y)

    @property
    def in_H(self) -> bool:
        return self.xt == 0 and self.yt == 0


@dataclass
class CentralProductReport:
    word: str
    samples: int
    landed: int
    confirmed: int
    failures: list[dict]
    centraliser_ok: bool
    centres_identified: bool

    @property
    def ok(self) -> bool:
        return not self.failures and self.centraliser_ok and self.centres_identified


def central_product_vc_check(
    w: Word | str, s: int | None = None, *, samples: int = 50, box: int = 4, seed: int = 0
) -> CentralProductReport:
    """Instances of w(g) = (h, 1) in the central product, each resolved inside H.

    Second components are drawn from ker l so the value lands in H; then
    h = w(h_1..h_s) c with c = w(h'_1..h'_s) central, and a preimage of h
    in H is exhibited and checked by direct evaluation.
    """
    if isinstance(w, str):
        w = wd.parse(w)
    bd = extract(w, s)
    rng = np.random.default_rng(seed)
    K = bd.kernel
    one = CPElement.one()
    failures, landed, confirmed = [], 0, 0
    for _ in range(samples):
        hs = [HElement(*(int(v) for v in rng.integers(-box, box + 1, size=3))) for _ in range(bd.s)]
        hp = []
        a = rng.integers(-box, box + 1, size=(2, len(K)))
        xs = [sum(int(a[0, j]) * K[j][i] for j in range(len(K))) for i in range(bd.s)]
        ys = [sum(int(a[1, j]) * K[j][i] for j in range(len(K))) for i in range(bd.s)]
        hp = [HElement(xs[i], ys[i], int(rng.integers(-box, box + 1))) for i in range(bd.s)]
        gv = evaluate_word(w, dict(zip(bd.names, [CPElement.pair(x, y) for x, y in zip(hs, hp)])), one)
        if not gv.in_H:
            failures.append({"reason": "value left H", "value": str(gv)})
            continue
        landed += 1
        h = gv.h
        c = evaluate_word(w, dict(zip(bd.names, hp)), HElement.one())
        if not c.is_central or (bd.centre_generator and c.z % bd.centre_generator) or (
            not bd.centre_generator and c.z
        ):
            failures.append({"reason": "c outside image meet centre", "c": c.z})
            continue
        if evaluate_word(w, dict(zip(bd.names, hs)), HElement.one()) * c != h:
            failures.append({"reason": "h differs from w(h) c"})
            continue
        pre = find_preimage(bd, w, hs, c.z) if c.z else hs
        if pre is None:
            failures.append({"reason": "no preimage exhibited", "c": c.z})
            continue
        confirmed += 1
    # C_G(H) has central H-part, and Z(H~) = Z(H)
    gens = [CPElement(HElement(1, 0, 0), 0, 0), CPElement(HElement(0, 1, 0), 0, 0)]
    cent_ok = True
    r = range(-2, 3)
    for x, y, z, xt, yt in itertools.product(r, r, r, r, r):
        g = CPElement(HElement(x, y, z), xt, yt)
        if all(g * k == k * g for k in gens) and not g.h.is_central:
            cent_ok = False
    ident = CPElement.pair(HElement.one(), HElement(0, 0, 1)) == CPElement.pair(HElement(0, 0, 1), HElement.one())
    return CentralProductReport(str(w), samples, landed, confirmed, failures, cent_ok, ident)


# ---------------------------------------------------------------------------


def extraction_agrees(w: Word, s: int | None = None, samples: int = 100, seed: int = 0, bound: int = 10**6) -> bool:
    """Symbolic prediction equals direct evaluation on random integer tuples."""
    bd = extract(w, s)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        vals = [[int(v) for v in rng.integers(-bound, bound + 1, size=3)] for _ in range(bd.s)]
        hs = [HElement(*v) for v in vals]
        direct = evaluate_word(w, dict(zip(bd.names, hs)), HElement.one())
        xs, ys, zs = zip(*vals) if vals else ((), (), ())
        if direct != bd.value(xs, ys, zs):
            return False
    return True


def word_report(w: Word | str, s: int | None = None, box: int = 5, seed: int = 0) -> RunReport:
    if isinstance(w, str):
        w = wd.parse(w)
    rep = RunReport(f"heisenberg-word {w}")
    bd = extract(w, s)
    rep.add("extract", PASS, l=list(bd.l), F=bd.F, kernel=bd.kernel, rank_on_kernel=bd.restricted_rank)
    rep.passed("extraction agrees with direct evaluation", extraction_agrees(w, s, seed=seed))
    skew = skew_check(bd, seed=seed)
    if in_normal_form(bd):
        rep.passed("skew on ker l", skew)
    else:
        rep.add(
            "skew on ker l",
            FINDING,
            skew=skew,
            note="word not in normal form; f(u,u) = -sum l_i u_i^2 / 2 on ker l",
        )
    vi = verbal_image_structure(w, s, box, seed=seed)
    rep.passed(
        "image meet centre is a subgroup",
        vi.subgroup_agree,
        formula=f"{{T(0,0,c) : c in {vi.g}Z}}",
        note=vi.note,
        method=vi.method,
        box_values=vi.found,
    )
    rep.passed(
        "image is a union of cosets",
        vi.coset_ok,
        checked=vi.cosets_checked,
        failures=vi.coset_failures[:5],
    )
    cp = central_product_vc_check(w, s, seed=seed)
    rep.add(
        "central product instances",
        PASS if cp.ok else FAIL,
        samples=cp.samples,
        landed_in_H=cp.landed,
        confirmed=cp.confirmed,
        failures=cp.failures[:5],
        centraliser_central=cp.centraliser_ok,
        centres_identified=cp.centres_identified,
    )
    return rep
