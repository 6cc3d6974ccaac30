"""Groups of the form C ⋉ Q over a dihedral subgroup: decomposition into
character components, the component criterion for retracts, explicit
retractions, and the equation that separates G from H when the criterion
fails.

Throughout, Q is written multiplicatively and C acts by conjugation from the
left; "module" notation (sums and integer multiples) is only used in
comments and rendered strings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import groups as gr
from . import words as wd
from .groups import FiniteGroup, GroupError, Homomorphism, Subgroup

Character = tuple[int, ...]  # signs on the chosen basis of C


class DecompositionError(GroupError):
    pass


@dataclass
class DihedralContext:
    G: FiniteGroup
    C: Subgroup
    Q: Subgroup
    basis: list[int]  # c_1, ..., c_m
    characters: list[Character]
    components: dict[Character, Subgroup]
    c_part: np.ndarray  # g -> the C-element of the coset gQ
    c_exponents: dict[int, tuple[int, ...]]  # C-element -> exponents on the basis
    labels: dict[Character, str] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def chi(self, character: Character, c: int) -> int:
        e = self.c_exponents[c]
        return math.prod(s for s, k in zip(character, e) if k) if any(e) else 1

    def label(self, character: Character) -> str:
        return self.labels.get(character, "(" + ",".join("+" if s > 0 else "-" for s in character) + ")")

    def q_part(self, g: int) -> int:
        return self.G.op(self.G.inverse(int(self.c_part[g])), g)

    def project_by_definition(self, q: int) -> dict[Character, int]:
        """Factor q as the product of its components (searching the product set)."""
        return self._factor_table()[q]

    def _factor_table(self) -> dict[int, dict[Character, int]]:
        if not hasattr(self, "_factors"):
            table: dict[int, dict[Character, int]] = {}
            comps = [(chi, self.components[chi].members) for chi in self.characters]
            for combo in itertools.product(*[m for _, m in comps]):
                q = self.G.prod(combo)
                if q in table:
                    raise DecompositionError("components do not factor Q uniquely")
                table[q] = {chi: x for (chi, _), x in zip(comps, combo)}
            self._factors = table
        return self._factors

    def identity1_lhs(self, character: Character, q: int) -> int:
        """prod_{c in C} (1 + chi(c) c) applied to q."""
        G = self.G
        for c in self.C.members:
            q = G.op(q, G.power(G.conj(q, c), self.chi(character, c)))
        return q

    def component(self, character: Character, q: int) -> int:
        """q_chi via the projector: (identity1_lhs)^(2^-|C| mod exp Q)."""
        e = self.Q.exponent
        scale = pow(2, -self.C.order, e) if e > 1 else 0
        return self.G.power(self.identity1_lhs(character, q), scale)

    def summary(self) -> dict:
        G = self.G
        return {
            "C": [G.names[c] for c in self.C.members],
            "basis": [G.names[c] for c in self.basis],
            "Q_order": self.Q.order,
            "components": {self.label(chi): self.components[chi].order for chi in self.characters},
        }


def squares_subgroup(G: FiniteGroup) -> Subgroup:
    sq = set(G.power_map(2).tolist())
    return G.subgroup(sq)


def find_complement(G: FiniteGroup, Q: Subgroup) -> list[int]:
    """A basis of an elementary abelian 2-subgroup C with C ⋉ Q = G.

    Greedy over involutions in index order: add g if it commutes with the
    current C and is outside CQ. Any elementary abelian 2-subgroup lies in a
    Sylow 2-subgroup, which is a complement here, so the greedy never stalls.
    """
    target = G.order // Q.order
    basis: list[int] = []
    C = {0}
    CQ = set(Q.members)
    orders = G.element_orders
    for g in range(1, G.order):
        if len(C) == target:
            break
        if orders[g] != 2 or g in CQ:
            continue
        if any(G.op(g, c) != G.op(c, g) for c in C):
            continue
        basis.append(g)
        C = C | {G.op(c, g) for c in C}
        CQ = {G.op(c, q) for c in C for q in Q.members}
    if len(C) != target:
        raise DecompositionError("no elementary abelian complement to Q")
    return basis


def decompose(
    G: FiniteGroup,
    n: int | None = None,
    *,
    basis: Sequence[int] | None = None,
    labels: dict[Character, str] | None = None,
) -> DihedralContext:
    """Split G as C ⋉ Q with Q generated by squares; compute character components.

    Raises DecompositionError when G is not of this shape.
    """
    Q = squares_subgroup(G)
    if not Q.is_abelian:
        raise DecompositionError("the subgroup generated by squares is not abelian")
    if Q.order % 2 == 0:
        raise DecompositionError("the subgroup generated by squares has even order")
    if n is not None:
        n1 = wd.half_order(n)
        if n1 % Q.exponent:
            raise DecompositionError(f"exponent {Q.exponent} of Q does not divide n' = {n1}")
    if basis is None:
        basis = find_complement(G, Q)
    basis = list(basis)
    C_members = {0}
    for c in basis:
        if G.element_orders[c] != 2:
            raise DecompositionError(f"{G.names[c]} is not an involution")
        C_members |= {G.op(x, c) for x in C_members}
    C = Subgroup(G, C_members)
    if not C.is_abelian or C.order != 2 ** len(basis) or C.order * Q.order != G.order or len(C.set & Q.set) != 1:
        raise DecompositionError("basis does not span an elementary abelian complement to Q")
    exps: dict[int, tuple[int, ...]] = {}
    for e in itertools.product((0, 1), repeat=len(basis)):
        exps[G.prod(c for c, k in zip(basis, e) if k)] = e
    c_part = np.zeros(G.order, dtype=np.int32)
    for c in C.members:
        for q in Q.members:
            c_part[G.op(c, q)] = c
    chars = list(itertools.product((1, -1), repeat=len(basis)))
    ctx = DihedralContext(G, C, Q, basis, chars, {}, c_part, exps, dict(labels or {}))
    for chi in chars:
        mem = [
            v for v in Q.members
            if all(G.conj(v, c) == G.power(v, ctx.chi(chi, c)) for c in basis)
        ]
        ctx.components[chi] = Subgroup(G, mem)
    return ctx


# ---------------------------------------------------------------------------
# component checks


def check_unique_factorization(ctx: DihedralContext) -> bool:
    try:
        table = ctx._factor_table()
    except DecompositionError:
        return False
    return len(table) == ctx.Q.order


def check_identity1(ctx: DihedralContext) -> tuple[bool, int]:
    """prod_c (1 + chi(c) c) q = 2^|C| q_chi for every chi and q; returns (ok, cases)."""
    G = ctx.G
    cases = 0
    table = ctx._factor_table()
    k = ctx.C.order
    for chi in ctx.characters:
        for q in ctx.Q.members:
            cases += 1
            if ctx.identity1_lhs(chi, q) != G.power(table[q][chi], 2**k):
                return False, cases
    return True, cases


def check_components_normal(ctx: DihedralContext) -> bool:
    return all(ctx.components[chi].is_normal() for chi in ctx.characters)


# ---------------------------------------------------------------------------
# condition 4 and retractions


@dataclass
class Condition4:
    holds: bool
    witness: Character | None
    orders: dict[Character, int]
    target_order: int


def condition4(ctx: DihedralContext, a: int) -> Condition4:
    """Is some component (a^2)_chi of the same order as a^2?"""
    G = ctx.G
    a2 = G.power(a, 2)
    if a2 not in ctx.Q:
        raise DecompositionError("a^2 is not in Q")
    comps = ctx._factor_table()[a2]
    orders = {chi: G.element_orders[comps[chi]] for chi in ctx.characters}
    target = G.element_orders[a2]
    witness = next((chi for chi in ctx.characters if orders[chi] == target), None)
    return Condition4(witness is not None, witness, orders, target)


def _component_projection(ctx: DihedralContext, chi: Character, gen: int) -> np.ndarray:
    """A homomorphism Q -> <gen> fixing <gen> (gen in Q_chi of maximal order), as a table on G-indices of Q."""
    G = ctx.G
    Qchi = ctx.components[chi]
    sub, incl = Qchi.as_group("Qchi")
    pos = {int(x): i for i, x in enumerate(incl.image)}
    cyc = Subgroup(sub, sub.closure([pos[gen]]))
    rho = gr.find_retraction(sub, cyc, cap=max(gr.RETRACTION_CAP, sub.order))
    if rho is None:
        raise DecompositionError("<(a^2)_chi> is not a direct factor of Q_chi")
    table = ctx._factor_table()
    out = {}
    for q in ctx.Q.members:
        out[q] = int(incl.image[rho(pos[table[q][chi]])])
    return out


def build_retraction(ctx: DihedralContext, a: int, b: int, n: int, chi: Character) -> Homomorphism:
    """A retraction of G onto H = <a, b> built from a character with condition 4.

    phi(c q) = b^((1 - chi(c))/2) pi(q), where pi : Q -> <(a^2)_chi> -> <a^2>.
    For even n, phi is multiplied by a homomorphism gamma : G -> G/Q -> <a^(n/2)>
    that is nontrivial on a^(n/2). The result is composed with the inverse of
    its restriction to H.
    """
    G = ctx.G
    H = G.subgroup([a, b])
    if H.order != 2 * n or G.element_orders[a] != n or G.element_orders[b] != 2 or G.conj(a, b) != G.inverse(a):
        raise DecompositionError("a, b do not generate a dihedral group of order 2n")
    a2 = G.power(a, 2)
    a2chi = ctx._factor_table()[a2][chi]
    if G.element_orders[a2chi] != G.element_orders[a2]:
        raise DecompositionError("condition 4 fails for this character")
    to_chi = _component_projection(ctx, chi, a2chi)
    # <a2chi> -> <a^2>, a2chi^k -> a^(2k)
    iso = {0: 0}
    x, y = a2chi, a2
    while x != 0:
        iso[x] = y
        x, y = G.op(x, a2chi), G.op(y, a2)
    pi = {q: iso[to_chi[q]] for q in ctx.Q.members}
    gamma = np.zeros(G.order, dtype=np.int32)
    if n % 2 == 0:
        z = G.power(a, n // 2)
        cz = ctx.c_exponents[int(ctx.c_part[z])]
        k = next(i for i, e in enumerate(cz) if e)
        lam = tuple(-1 if i == k else 1 for i in range(ctx.rank))
        for g in range(G.order):
            gamma[g] = z if ctx.chi(lam, int(ctx.c_part[g])) == -1 else 0
    phi = np.zeros(G.order, dtype=np.int32)
    for g in range(G.order):
        c = int(ctx.c_part[g])
        q = ctx.q_part(g)
        v = G.op(b if ctx.chi(chi, c) == -1 else 0, pi[q])
        phi[g] = G.op(v, int(gamma[g]))
    hom = Homomorphism(G, G, phi)
    if not hom.is_homomorphism():
        raise DecompositionError("phi is not a homomorphism")
    alpha = {h: int(phi[h]) for h in H.members}
    if len(set(alpha.values())) != H.order or not set(alpha.values()) <= H.set:
        raise DecompositionError("phi is not injective on H")
    alpha_inv = {v: k for k, v in alpha.items()}
    rho = np.array([alpha_inv[int(phi[g])] for g in range(G.order)], dtype=np.int32)
    out = Homomorphism(G, G, rho)
    if not gr.is_retraction(out, H):
        raise DecompositionError("constructed map is not a retraction")
    return out


# ---------------------------------------------------------------------------
# the separating equation


def odd_radical(n: int) -> int:
    return math.prod(p for p in gr.prime_factors(n) if p != 2)


def minimal_type(order: int, n: int) -> int:
    """The least l*order with l*order | n' and gcd(l*order, n'/(l*order)) = 1."""
    n1 = wd.half_order(n)
    for l in range(1, n1 + 1):
        d = l * order
        if n1 % d == 0 and math.gcd(d, n1 // d) == 1:
            return d
    raise GroupError(f"no admissible type for component order {order}")


@dataclass
class Equation2:
    equation: wd.MultiSortEquation
    rhs: int  # element of G
    rhs_exponent: int  # rhs = a'^rhs_exponent
    a_prime: int
    x_names: list[str]
    y_names: dict[Character, str]
    terms: dict[Character, wd.Word]
    stages: dict[Character, list[wd.Word]]  # partial products after each factor
    omitted: list[Character]
    module_text: str
    group_text: str

    def translated(self, n: int) -> wd.Word:
        return wd.translate_multisort(self.equation, n)[0]


def _f_word(ctx: DihedralContext, c: int, x_names: Sequence[str]) -> wd.Word:
    e = ctx.c_exponents[c]
    w = wd.Word()
    for name, k in zip(x_names, e):
        if k:
            w = w * wd.letter(name, 1, 2)
    return w


def generate_equation2(
    ctx: DihedralContext,
    a: int,
    n: int,
    *,
    x_names: Sequence[str] | None = None,
    y_names: dict[Character, str] | None = None,
) -> Equation2:
    """The multi-sort equation sum_chi prod_c (1 + chi(c) f_c) y_chi = 2^|C| a'.

    Each factor (1 + chi(c) f_c) acting on q is written q f_c q^chi(c) f_c^-1.
    Within a term, c = 1 comes first, then the c with chi(c) = +1, then the
    rest, each group in index order. Characters whose a'-component is
    trivial contribute the identity and are left out.
    """
    if n % 4 == 0:
        raise GroupError("n must not be a multiple of 4")
    G = ctx.G
    x_names = list(x_names) if x_names is not None else [f"x{i + 1}" for i in range(ctx.rank)]
    a_prime = G.power(a, n // odd_radical(n))
    comps = ctx._factor_table()[a_prime]
    terms: dict[Character, wd.Word] = {}
    stages: dict[Character, list[wd.Word]] = {}
    omitted = []
    ynames: dict[Character, str] = {}
    module_parts, group_parts = [], []
    counter = 0
    for chi in ctx.characters:
        comp = comps[chi]
        if comp == 0:
            omitted.append(chi)
            continue
        counter += 1
        name = (y_names or {}).get(chi, f"y{counter}")
        ynames[chi] = name
        d = minimal_type(G.element_orders[comp], n)
        q = wd.letter(name, 1, d)
        order = [0] + [c for c in ctx.C.members if c and ctx.chi(chi, c) == 1]
        order += [c for c in ctx.C.members if ctx.chi(chi, c) == -1]
        st = []
        factors = []
        for c in order:
            f = _f_word(ctx, c, x_names)
            q = q * f * (q ** ctx.chi(chi, c)) * f.inverse()
            st.append(q)
            sign = "+" if ctx.chi(chi, c) == 1 else "-"
            factors.append(f"(1 {sign} {f if f.letters else '1'})")
        terms[chi] = q
        stages[chi] = st
        module_parts.append("".join(factors) + f"·{name}:[{d}]")
        group_parts.append(str(q))
    lhs = wd.Word()
    for chi in terms:
        lhs = lhs * terms[chi]
    k = ctx.C.order
    o = G.element_orders[a_prime]
    e = pow(2, k, o) if o > 1 else 0
    rhs = G.power(a_prime, e)
    eq = wd.MultiSortEquation(lhs, rhs)
    rhs_text = f"2^{k} a'"
    module_text = " + ".join(module_parts) + f" = {rhs_text}" if module_parts else f"0 = {rhs_text}"
    group_text = " · ".join(f"({p})" for p in group_parts) + f" = a'^{2**k} = a'^{e}"
    return Equation2(eq, rhs, e, a_prime, list(x_names), ynames, terms, stages, omitted, module_text, group_text)


def typed_preimage(G: FiniteGroup, value: int, exponent: int) -> int | None:
    """Some g with g^exponent = value."""
    hits = np.nonzero(G.power_map(exponent) == value)[0]
    return int(hits[0]) if len(hits) else None


def recipe_witness(ctx: DihedralContext, eq2: Equation2, n: int) -> tuple[dict[str, int], dict[str, int]]:
    """Typed witness x_i = c_i, y_chi = a'_chi, and an untyped witness for the translated equation."""
    G = ctx.G
    typed = {name: c for name, c in zip(eq2.x_names, ctx.basis)}
    comps = ctx._factor_table()[eq2.a_prime]
    for chi, name in eq2.y_names.items():
        typed[name] = comps[chi]
    n1 = wd.half_order(n)
    untyped = {}
    for name, v in typed.items():
        d = eq2.equation.types[name]
        g = typed_preimage(G, v, 2 * n1 // d)
        if g is None:
            raise GroupError(f"no preimage for {name}")
        untyped[name] = g
    return typed, untyped


# ---------------------------------------------------------------------------
# D3 x D5 over the diagonal D15

DISPLAY_FULL = (
    "[[((y3^10)^2 x5^15)^2, x3^15], x3^15 x5^15] "
    "[[((y5^6)^2 x3^15)^2, x5^15], x3^15 x5^15]"
)
# the simplified display has a three-argument bracket; two readings
DISPLAY_SHORT_READINGS = {
    "nested": "[[[(y3^20 x5^15)^2, x3^15], [y5^12 (x3^15)^2, x5^15]], x3^15 x5^15]",
    "product": "[[(y3^20 x5^15)^2, x3^15] [y5^12 (x3^15)^2, x5^15], x3^15 x5^15]",
}


@dataclass
class ExampleSetup:
    G: FiniteGroup
    H: Subgroup
    a: int
    b: int
    ctx: DihedralContext
    eq2: Equation2
    translated: wd.Word
    names: dict[str, int]


def example_setup() -> ExampleSetup:
    G = gr.direct_product(gr.dihedral(3), gr.dihedral(5), labels=["3", "5"], name="D3xD5")
    gm = dict(G.generators)
    a = G.op(gm["a3"], gm["a5"])
    b = G.op(gm["b3"], gm["b5"])
    H = G.subgroup([a, b])
    tau, pi = (-1, 1), (1, -1)  # signs on (b3, b5)
    labels = {(1, 1): "epsilon", tau: "tau", pi: "pi", (-1, -1): "delta"}
    ctx = decompose(G, 15, basis=[gm["b3"], gm["b5"]], labels=labels)
    ctx.characters = [tau, pi, (1, 1), (-1, -1)]
    eq2 = generate_equation2(ctx, a, 15, x_names=["x3", "x5"], y_names={tau: "y3", pi: "y5"})
    names = dict(gm, a=a, b=b)
    return ExampleSetup(G, H, a, b, ctx, eq2, eq2.translated(15), names)


def _in_cyclic(G: FiniteGroup, x: np.ndarray, gen: int) -> np.ndarray:
    mem = np.zeros(G.order, dtype=bool)
    mem[list(G.closure([gen]))] = True
    return mem[x]


def classify_h_assignments(ex: ExampleSetup) -> dict[str, dict]:
    """Sort all H-assignments into the four cases by whether x3^15, x5^15 lie in <a>."""
    G, H = ex.G, ex.H
    Hm = np.array(H.members, dtype=np.int32)
    grid = np.indices([len(Hm)] * 4).reshape(4, -1)
    env = {v: Hm[grid[k]] for k, v in enumerate(["x3", "x5", "y3", "y5"])}
    tr = lambda w: wd.translate_multisort(wd.MultiSortEquation(w, 0), 15)[0]  # noqa: E731
    lhs = wd.evaluate_many(ex.translated, G, env)
    tau, pi = (-1, 1), (1, -1)
    inner_tau = wd.evaluate_many(tr(ex.eq2.stages[tau][2]), G, env)
    inner_pi = wd.evaluate_many(tr(ex.eq2.stages[pi][2]), G, env)
    x3 = G.power_map(15)[env["x3"]]
    x5 = G.power_map(15)[env["x5"]]
    in3 = _in_cyclic(G, x3, ex.a)
    in5 = _in_cyclic(G, x5, ex.a)
    a = ex.a
    a3_sub = G.power(a, 3)
    a5_sub = G.power(a, 5)
    out = {}
    cases = {
        "x3^15 in <a>, x5^15 not": in3 & ~in5,
        "x3^15 not in <a>, x5^15 in": ~in3 & in5,
        "both in <a>": in3 & in5,
        "neither in <a>": ~in3 & ~in5,
    }
    x35 = G.mul[x3, x5]
    for name, mask in cases.items():
        L = lhs[mask]
        if name == "x3^15 in <a>, x5^15 not":
            claims = {
                "tau inner commutator is 1": bool((inner_tau[mask] == 0).all()),
                "pi inner commutator in <a^3>": bool(_in_cyclic(G, inner_pi[mask], a3_sub).all()),
                "lhs in <a^3>": bool(_in_cyclic(G, L, a3_sub).all()),
            }
        elif name == "x3^15 not in <a>, x5^15 in":
            claims = {
                "pi inner commutator is 1": bool((inner_pi[mask] == 0).all()),
                "lhs in <a^5>": bool(_in_cyclic(G, L, a5_sub).all()),
            }
        elif name == "both in <a>":
            claims = {"lhs is 1": bool((L == 0).all())}
        else:
            claims = {
                "x3^15 x5^15 in <a>": bool(_in_cyclic(G, x35[mask], a).all()),
                "lhs is 1": bool((L == 0).all()),
            }
        claims["lhs never a"] = bool((L != ex.eq2.rhs).all())
        out[name] = {"assignments": int(mask.sum()), "claims": claims}
    return out


def evaluate_displays(ex: ExampleSetup, witnesses: dict[str, dict[str, int]]) -> dict:
    """Evaluate the printed display equations under both commutator conventions."""
    G = ex.G
    texts = {"full": DISPLAY_FULL}
    texts.update({f"short/{k}": v for k, v in DISPLAY_SHORT_READINGS.items()})
    out = {}
    for conv in (wd.LEFT_NORMED, wd.RIGHT_NORMED):
        for label, text in texts.items():
            w = wd.parse(text, convention=conv)
            for wname, asg in witnesses.items():
                val = wd.evaluate(w, G, asg)
                out[f"{conv} | {label} | {wname}"] = {"value": G.names[val], "equals a": val == ex.a}
    return out


def run_worked_example(*, include_retraction: bool = True):
    """All checks for G = D3 x D5 over the diagonal D15."""
    from .report import ABSENT, FAIL, FINDING, PASS, UNKNOWN, RunReport

    rep = RunReport("dihedral worked example: D3 x D5 over diagonal D15")
    ex = example_setup()
    G, H, ctx, eq2 = ex.G, ex.H, ex.ctx, ex.eq2
    nm = ex.names
    rep.passed("orders", G.order == 60 and H.order == 30, G=G.order, H=H.order)
    comp_names = {ctx.label(chi): [G.names[x] for x in ctx.components[chi].generators] for chi in ctx.characters}
    rep.passed(
        "decomposition",
        set(ctx.C.members) == {0, nm["b3"], nm["b5"], G.op(nm["b3"], nm["b5"])}
        and ctx.Q == G.subgroup([nm["a3"], nm["a5"]])
        and ctx.components[(-1, 1)] == G.subgroup([nm["a3"]])
        and ctx.components[(1, -1)] == G.subgroup([nm["a5"]])
        and ctx.components[(1, 1)].order == 1
        and ctx.components[(-1, -1)].order == 1,
        C=[G.names[c] for c in ctx.C.members], components=comp_names,
    )
    rep.passed("unique factorization", check_unique_factorization(ctx))
    ok, cases = check_identity1(ctx)
    rep.passed("identity (1)", ok, cases=cases)
    c4 = condition4(ctx, ex.a)
    rep.passed(
        "condition 4 fails",
        not c4.holds,
        component_orders={ctx.label(k): v for k, v in c4.orders.items()}, order_a2=c4.target_order,
    )
    types = eq2.equation.types
    rep.passed(
        "equation shape",
        types == {"x3": 2, "x5": 2, "y3": 3, "y5": 5}
        and sorted(ctx.label(c) for c in eq2.omitted) == ["delta", "epsilon"]
        and eq2.rhs == ex.a and eq2.rhs_exponent == 1,
        types=types, module=eq2.module_text, rhs=f"a'^{eq2.rhs_exponent}",
    )
    tr = {v: wd.translate_multisort(wd.MultiSortEquation(wd.letter(v, 1, d), 0), 15)[0] for v, d in types.items()}
    rep.passed(
        "translation exponents",
        str(tr["x3"]) == "x3^15" and str(tr["x5"]) == "x5^15" and str(tr["y3"]) == "y3^10" and str(tr["y5"]) == "y5^6",
        translated=str(ex.translated),
    )
    typed, untyped = recipe_witness(ctx, eq2, 15)
    val = wd.evaluate(ex.translated, G, untyped)
    rep.passed(
        "solvable in G (construction witness)",
        val == ex.a,
        witness={k: G.names[v] for k, v in untyped.items()}, value=G.names[val],
    )
    literal = {"x3": nm["b3"], "x5": nm["b5"], "y3": G.power(nm["a3"], 2), "y5": nm["a5"]}
    val = wd.evaluate(ex.translated, G, literal)
    rep.passed(
        "solvable in G (literal witness y3 = a3^2)",
        val == ex.a,
        witness={k: G.names[v] for k, v in literal.items()}, value=G.names[val], expected=G.names[ex.a],
    )
    sol_h = wd.solve((ex.translated, eq2.rhs), G, domain=H, coefficients={})
    n_vars = len(ex.translated.symbols())
    rep.add(
        "unsolvable in H (translated, exhaustive)",
        ABSENT if sol_h is None else FAIL,
        assignments=H.order**n_vars,
    )
    native = wd.solve_multisort(eq2.equation, G, domain=H)
    native_g = wd.solve_multisort(eq2.equation, G)
    rep.passed(
        "multi-sort semantics agree",
        native is None and native_g is not None,
        solution_in_G={k: G.names[v] for k, v in (native_g or {}).items()},
    )
    cls = classify_h_assignments(ex)
    rep.passed(
        "case analysis over H",
        all(all(c["claims"].values()) for c in cls.values()) and sum(c["assignments"] for c in cls.values()) == 30**4,
        cases=cls,
    )
    if include_retraction:
        try:
            rho = gr.find_retraction(G, H)
            rep.add("retraction search", ABSENT if rho is None else FAIL)
        except gr.CapExceeded as exc:
            rep.add("retraction search", UNKNOWN, reason=str(exc))
    disp = evaluate_displays(ex, {"construction": untyped, "literal": literal})
    rep.add("printed displays", FINDING, evaluations=disp)
    return rep
