"""Run-report builders for each lab; the CLI and the acceptance suite share them."""

from __future__ import annotations



from . import approx
from . import centre_lab as cl
from . import dihedral as dh
from . import groups as gr
from . import heisenberg as he
from . import structure as st
from . import words as wd
from .groups import CapExceeded, FiniteGroup, GroupError, Subgroup
from .report import ABSENT, FAIL, FINDING, PASS, UNKNOWN, RunReport


# ---------------------------------------------------------------------------
# subgroup selectors


def select_subgroup(G: FiniteGroup, selector: str | None) -> Subgroup:
    """whole | centre | trivial | derived | diagonal[-anything] | comma-separated element words."""
    sel = (selector or "whole").strip()
    if sel == "whole":
        return G.whole()
    if sel == "trivial":
        return G.trivial()
    if sel in ("centre", "center"):
        return gr.centre(G)
    if sel == "derived":
        return gr.normal_closure(G, [G.commutator(x, y) for _, x in G.generators for _, y in G.generators])
    if sel == "diagonal" or sel.startswith("diagonal-"):
        labels = getattr(G, "labels", None)
        if not labels:
            raise GroupError("diagonal selector needs a direct product")
        return gr.diagonal_subgroup(G, labels)
    gens = []
    env = dict(G.generators)
    for part in sel.split(","):
        try:
            gens.append(wd.evaluate(wd.parse(part), G, coefficients=env))
        except (wd.WordSyntaxError, wd.UnboundSymbol) as exc:
            raise GroupError(f"cannot read subgroup generator {part!r}: {exc}") from None
    return G.subgroup(gens)


def _names(G: FiniteGroup, xs) -> list[str]:
    return [G.names[int(x)] for x in xs]


# ---------------------------------------------------------------------------
# group-core and words


def group_report(G: FiniteGroup) -> RunReport:
    rep = RunReport(f"group {G.name}")
    try:
        G.validate()
        ok = True
    except GroupError:
        ok = False
    rep.passed(
        "validation",
        ok,
        order=G.order,
        generators={s: G.names[g] for s, g in G.generators},
        exponent=G.exponent,
        abelian=G.is_abelian,
    )
    Z = gr.centre(G)
    rep.add("centre", PASS, order=Z.order, elements=_names(G, Z.members))
    try:
        M = gr.monolith(G)
        rep.add("monolith", PASS, order=M.order, abelian=M.is_abelian, monolithic=M.order > 1)
    except CapExceeded as exc:
        rep.add("monolith", UNKNOWN, reason=str(exc))
    return rep


def solve_report(G: FiniteGroup, eq_text: str, *, domain: Subgroup | None = None, convention: str = wd.LEFT_NORMED) -> RunReport:
    where = "G" if domain is None else f"subgroup of order {domain.order}"
    rep = RunReport(f"solve over {where}: {eq_text.strip()}")
    lhs, rhs = wd.parse_equation(eq_text, convention)
    env = dict(G.generators)
    try:
        if lhs.types:
            sol = wd.solve_multisort(wd.MultiSortEquation(lhs, rhs), G, domain=domain)
        else:
            sol = wd.solve((lhs, rhs), G, domain=domain)
    except CapExceeded as exc:
        rep.add("search", UNKNOWN, reason=str(exc))
        return rep
    n_vars = len(lhs.variables(env))
    size = (domain.order if domain is not None else G.order) ** n_vars
    if sol is None:
        rep.add("search", ABSENT, assignments=size)
    else:
        check = wd.evaluate(lhs, G, sol, env) == wd.evaluate(rhs, G, coefficients=env)
        rep.passed("search", check, result="FOUND", solution={k: G.names[v] for k, v in sol.items()})
    return rep


def closure_report(G: FiniteGroup, H: Subgroup, s_max: int, *, extra_words=(), seed: int = 0) -> RunReport:
    rep = RunReport(f"verbal-closure |G| = {G.order}, |H| = {H.order}, s <= {s_max}")
    cr = wd.decide_verbally_closed(G, H, s_max, seed=seed, extra_words=extra_words)
    details = {"summary": cr.summary(), "per_arity": cr.per_arity, "notes": cr.notes}
    if cr.closed:
        rep.add("verbal closedness", PASS if cr.complete else UNKNOWN, result="CLOSED", **details)
    else:
        w, h = cr.witness
        rep.add("verbal closedness", FINDING, result="NOT CLOSED", word=str(w), value=G.names[h], **details)
    return rep


def retract_report(G: FiniteGroup, H: Subgroup, cap: int = gr.RETRACTION_CAP) -> RunReport:
    rep = RunReport(f"retract |G| = {G.order}, |H| = {H.order}")
    try:
        rho = gr.find_retraction(G, H, cap=cap)
    except CapExceeded as exc:
        rep.add("retraction", UNKNOWN, reason=str(exc))
        return rep
    if rho is None:
        rep.add("retraction", ABSENT)
    else:
        rep.passed(
            "retraction",
            gr.is_retraction(rho, H),
            result="FOUND",
            generator_images={s: G.names[rho(g)] for s, g in G.generators},
        )
    return rep


# ---------------------------------------------------------------------------
# structure


def structure_report(H: FiniteGroup, *, C: Subgroup | None = None, N: Subgroup | None = None, modules: bool = False) -> RunReport:
    rep = RunReport(f"structure {H.name}")
    M = gr.monolith(H)
    rep.add(
        "nonabelian monolith",
        PASS,
        holds=st.theorem1_predicate(H),
        monolith_order=M.order,
        monolith_abelian=M.is_abelian,
    )
    if C is not None:
        t2 = st.theorem2_predicate(H, C)
        rep.add(
            "self-centralizing indecomposable coprime normal subgroup",
            PASS,
            holds=t2.holds,
            self_centralizing=t2.self_centralizing,
            indecomposable=t2.indecomposable,
            coprime=t2.coprime,
            reading=t2.reading,
        )
    df = st.centre_direct_factor_check(H, N)
    rep.passed(
        "centre of centraliser as direct factor",
        df.consistent,
        L_order=df.L.order,
        ZL_order=df.ZL.order,
        complement=df.found,
        psi=df.psi,
        homomorphisms_searched=df.homs_searched,
    )
    if modules:
        lemma1_into(rep, st.module_fixtures())
    return rep


def lemma1_into(rep: RunReport, fixtures) -> None:
    for M in fixtures:
        r = st.check_lemma1(M)
        rep.passed(f"module {M.name}", not r.violated, submodules=r.submodules, results=r.results)


# ---------------------------------------------------------------------------
# approximation lemma


def approx_report(
    p: int,
    d: int,
    k: int,
    *,
    r: int | None = None,
    n: int | None = None,
    J=None,
    samples: int = 2000,
    seed: int = 0,
) -> tuple[RunReport, approx.PolySubgroupR]:
    R = approx.construct(p, d, k, r=r, n=n)
    rep = RunReport(f"approx-lemma p={p} d={d} k={k}" + ("" if r is None else f" r={r} n={n}"))
    rep.add("construction", FINDING if R.violations else PASS, **R.summary())
    a = approx.check_property_a(R, samples=samples, seed=seed)
    rep.passed("property a", a.passed, exhaustive=a.exhaustive, checked=a.checked, detail=a.describe())
    b = approx.check_property_b_all(R, samples=samples, seed=seed)
    rep.passed(
        "property b",
        b.passed,
        exhaustive=b.exhaustive,
        subsets=b.subsets,
        cases=b.cases,
        failure=b.failure,
    )
    J = tuple(range(1, k + 1)) if J is None else tuple(J)
    dec = approx.complement_and_projection(R, J)
    details = {"J": J, "J_prime": dec.J_prime, "complement": dec.complement, **dec.checks}
    if R.t <= 16:
        details["n"] = dec.n.tolist()
    rep.passed("property b'", all(dec.checks.values()), **details)
    return rep, R


# ---------------------------------------------------------------------------
# dihedral lab


def dihedral_report(G: FiniteGroup, H: Subgroup, n: int, *, cap: int = wd.SEARCH_CAP) -> RunReport:
    rep = RunReport(f"dihedral-analyze n={n} |G| = {G.order}")
    a = next((x for x in H.members if G.element_orders[x] == n), None)
    b = None
    if a is not None:
        cyc = G.closure([a])
        b = next((x for x in H.members if G.element_orders[x] == 2 and x not in cyc), None)
    if a is None or b is None or H.order != 2 * n:
        rep.add("H is dihedral of order 2n", FAIL)
        return rep
    rep.add("H is dihedral of order 2n", PASS, a=G.names[a], b=G.names[b])
    try:
        ctx = dh.decompose(G, n)
    except dh.DecompositionError as exc:
        rep.add("decomposition", FAIL, reason=str(exc))
        return rep
    rep.add("decomposition", PASS, **ctx.summary())
    ok, cases = dh.check_identity1(ctx)
    rep.passed("identity (1)", ok, cases=cases)
    c4 = dh.condition4(ctx, a)
    rep.add(
        "condition 4",
        PASS,
        holds=c4.holds,
        witness=None if c4.witness is None else ctx.label(c4.witness),
        component_orders={ctx.label(k): v for k, v in c4.orders.items()},
        order_a2=c4.target_order,
    )
    if c4.holds:
        try:
            rho = dh.build_retraction(ctx, a, b, n, c4.witness)
            rep.passed("constructed retraction", gr.is_retraction(rho, H))
        except dh.DecompositionError as exc:
            rep.add("constructed retraction", FAIL, reason=str(exc))
        return rep
    eq2 = dh.generate_equation2(ctx, a, n)
    tr = eq2.translated(n)
    rep.add("separating equation", PASS, module=eq2.module_text, group=eq2.group_text, translated=str(tr))
    typed, untyped = dh.recipe_witness(ctx, eq2, n)
    val = wd.evaluate(tr, G, untyped)
    rep.passed("solvable in G", val == eq2.rhs, witness={k: G.names[v] for k, v in untyped.items()})
    try:
        sol = wd.solve((tr, eq2.rhs), G, domain=H, cap=cap)
        rep.add(
            "unsolvable in H",
            ABSENT if sol is None else FAIL,
            assignments=H.order ** len(tr.symbols()),
        )
    except CapExceeded as exc:
        rep.add("unsolvable in H", UNKNOWN, reason=str(exc))
    return rep


def condition4_fixture() -> tuple[FiniteGroup, Subgroup]:
    """<b>_2 acting by inversion on Z15 x Z5, over D15 = <b, a1>."""
    Qg = gr.direct_product(gr.cyclic(15), gr.cyclic(5), labels=["1", "2"], name="Z15xZ5")
    C = gr.cyclic(2, "b")
    qg = dict(Qg.generators)
    act = {1: {qg["a1"]: Qg.inverse(qg["a1"]), qg["a2"]: Qg.inverse(qg["a2"])}}
    S = gr.semidirect_product(C, Qg, act, name="Z2x(Z15xZ5)")
    g = dict(S.generators)
    return S, S.subgroup([g["b"], g["a1"]])


def semidirect_identity_report() -> RunReport:
    rep = RunReport("semidirect-product power identity")
    cases = []
    for n in (9, 15):
        D = gr.dihedral(n)
        g = dict(D.generators)
        cases.append((f"D{n}", D, D.subgroup([g["b"]]), D.subgroup([g["a"]]), n))
    G = gr.direct_product(gr.dihedral(3), gr.dihedral(5), labels=["3", "5"], name="D3xD5")
    g = dict(G.generators)
    cases.append(("D3xD5", G, G.subgroup([g["b3"], g["b5"]]), G.subgroup([g["a3"], g["a5"]]), 15))
    for label, G, C, Q, n in cases:
        for d in wd.admissible_types(n):
            res = wd.check_semidirect_identity(G, C, Q, d, wd.half_order(n))
            rep.passed(
                f"{label} d={d}",
                res["checked"] and res["equal"],
                exponent=2 * wd.half_order(n) // d,
                size=len(res.get("rhs", [])),
                problems=res.get("problems"),
            )
    return rep


# ---------------------------------------------------------------------------


def heisenberg_reports(box: int = 5, seed: int = 0) -> RunReport:
    rep = RunReport("heisenberg fixture words")
    for text, s in he.FIXTURE_WORDS:
        rep.extend(he.word_report(text, s, box, seed), prefix=f"{text}: ")
    return rep


def paper_examples(seed: int = 0) -> RunReport:
    rep = RunReport("paper-examples")
    rep.extend(dh.run_worked_example(), prefix="D3xD5: ")
    S, H = condition4_fixture()
    rep.extend(retract_report(S, H), prefix="condition-4 fixture: ")
    rep.extend(semidirect_identity_report(), prefix="power identity: ")
    for p, d, k in ((2, 1, 1), (3, 1, 1)):
        r, _ = approx_report(p, d, k, seed=seed)
        rep.extend(r, prefix=f"approx ({p},{d},{k}): ")
    D4 = gr.dihedral(4)
    rep.extend(cl.run_pipeline(D4, t=3, R_rows=cl.sum_zero(3, 1, 2), seed=seed), prefix="centre-lab D4 t=3: ")
    rep.extend(heisenberg_reports(seed=seed), prefix="heisenberg ")
    A4 = gr.alternating(4)
    rep.extend(structure_report(gr.alternating(5)), prefix="structure A5: ")
    rep.extend(structure_report(A4, C=_v4(A4)), prefix="structure A4: ")
    rep.extend(structure_report(D4), prefix="structure D4: ")
    rep.extend(structure_report(gr.dihedral(15)), prefix="structure D15: ")
    sub = RunReport("modules")
    lemma1_into(sub, st.module_fixtures())
    rep.extend(sub, prefix="modules: ")
    return rep


def _v4(A4: FiniteGroup) -> Subgroup:
    """The normal Klein four-subgroup of A4."""
    return next(N for N in gr.normal_subgroups(A4) if N.order == 4)
