import pytest

from svclab import dihedral as dh
from svclab import groups as gr
from svclab import words as wd
from svclab.runs import condition4_fixture


@pytest.fixture(scope="module")
def example():
    return dh.example_setup()


@pytest.fixture(scope="module")
def fixture4():
    S, H = condition4_fixture()
    g = dict(S.generators)
    return S, H, g["a1"], g["b"], dh.decompose(S, 15)


def _gens(G):
    return dict(G.generators)


# decomposition


def test_d3_times_d5_splits_over_klein_four(example):
    G, ctx, nm = example.G, example.ctx, example.names
    assert set(ctx.C.members) == {0, nm["b3"], nm["b5"], G.op(nm["b3"], nm["b5"])}
    assert ctx.Q == G.subgroup([nm["a3"], nm["a5"]])
    assert len(ctx.characters) == 4


def test_d3_times_d5_components(example):
    G, ctx, nm = example.G, example.ctx, example.names
    tau, pi = (-1, 1), (1, -1)
    assert ctx.components[tau] == G.subgroup([nm["a3"]])
    assert ctx.components[pi] == G.subgroup([nm["a5"]])
    assert ctx.components[(1, 1)].order == 1
    assert ctx.components[(-1, -1)].order == 1


def test_d15_itself_has_two_characters():
    D = gr.dihedral(15)
    ctx = dh.decompose(D, 15)
    assert ctx.C.order == 2 and len(ctx.characters) == 2
    assert ctx.components[(-1,)] == D.subgroup([_gens(D)["a"]])
    assert ctx.components[(1,)].order == 1


def test_decompose_rejects_groups_outside_the_variety():
    with pytest.raises(dh.DecompositionError):
        dh.decompose(gr.dihedral(4))
    with pytest.raises(dh.DecompositionError):
        dh.decompose(gr.alternating(4))


@pytest.mark.parametrize(
    "make",
    [lambda: gr.dihedral(15), lambda: gr.dihedral(9), lambda: dh.example_setup().G, lambda: condition4_fixture()[0]],
)
def test_components_factor_uniquely_and_satisfy_identity_one(make):
    ctx = dh.decompose(make())
    assert dh.check_unique_factorization(ctx)
    assert dh.check_components_normal(ctx)
    ok, cases = dh.check_identity1(ctx)
    assert ok and cases == len(ctx.characters) * ctx.Q.order


# condition 4 and retractions


def test_condition4_fails_for_the_diagonal(example):
    c4 = dh.condition4(example.ctx, example.a)
    assert not c4.holds
    assert sorted(c4.orders.values()) == [1, 1, 3, 5]
    assert c4.target_order == 15


def test_condition4_holds_in_the_fixture(fixture4):
    S, H, a, b, ctx = fixture4
    c4 = dh.condition4(ctx, a)
    assert c4.holds and c4.orders[c4.witness] == 15


def test_fixture_retraction_is_validated_on_every_element(fixture4):
    S, H, a, b, ctx = fixture4
    chi = dh.condition4(ctx, a).witness
    rho = dh.build_retraction(ctx, a, b, 15, chi)
    assert S.order == 150
    assert gr.is_retraction(rho, H)


def test_group_retracts_onto_itself():
    D = gr.dihedral(15)
    g = _gens(D)
    ctx = dh.decompose(D, 15)
    c4 = dh.condition4(ctx, g["a"])
    assert c4.holds
    rho = dh.build_retraction(ctx, g["a"], g["b"], 15, c4.witness)
    assert rho.image.tolist() == list(range(D.order))


def test_even_order_path_uses_the_gamma_correction():
    D = gr.dihedral(6)
    g = _gens(D)
    ctx = dh.decompose(D, 6)
    assert ctx.C.order == 4  # D6 = D3 x Z2
    c4 = dh.condition4(ctx, g["a"])
    rho = dh.build_retraction(ctx, g["a"], g["b"], 6, c4.witness)
    assert gr.is_retraction(rho, D.whole())


def test_even_order_inside_a_larger_group():
    G = gr.direct_product(gr.dihedral(6), gr.cyclic(3), labels=["", "z"])
    g = _gens(G)
    H = G.subgroup([g["a"], g["b"]])
    ctx = dh.decompose(G, 6)
    c4 = dh.condition4(ctx, g["a"])
    assert c4.holds
    rho = dh.build_retraction(ctx, g["a"], g["b"], 6, c4.witness)
    assert gr.is_retraction(rho, H)
    assert wd.decide_verbally_closed(G, H, 1).closed


# the separating equation


def test_generated_equation_shape(example):
    eq2 = example.eq2
    assert eq2.equation.types == {"x3": 2, "x5": 2, "y3": 3, "y5": 5}
    assert sorted(example.ctx.label(c) for c in eq2.omitted) == ["delta", "epsilon"]
    assert eq2.rhs == example.a and eq2.rhs_exponent == 1


def test_translated_exponents(example):
    syms = {}
    for s, e in example.translated.letters:
        syms.setdefault(s, set()).add(abs(e))
    assert {15, 30} >= syms["x3"] | syms["x5"]
    assert syms["y3"] == {20} and syms["y5"] == {12}  # y3^10 and y5^6, each squared


def test_factor_expansion_rule(example):
    """q f q^chi f^-1 is (q f)^2 when chi = +1 and a commutator when chi = -1."""
    G = example.G
    for f in range(G.order):
        if G.op(f, f) != 0:
            continue
        for q in example.ctx.Q.members:
            plus = G.prod([q, f, q, G.inverse(f)])
            assert plus == G.power(G.op(q, f), 2)
            minus = G.prod([q, f, G.inverse(q), G.inverse(f)])
            assert minus == wd.evaluate(wd.parse("[u,v]", wd.RIGHT_NORMED), G, {"u": q, "v": f})


def test_construction_witness_solves_the_equation(example):
    typed, untyped = dh.recipe_witness(example.ctx, example.eq2, 15)
    G = example.G
    assert wd.evaluate(example.translated, G, untyped) == example.a
    assert wd.solve_multisort(example.eq2.equation, G) is not None


def test_rank_zero_equation_is_a_single_power():
    Z = gr.cyclic(15)
    ctx = dh.decompose(Z, 15)
    assert ctx.rank == 0
    eq2 = dh.generate_equation2(ctx, _gens(Z)["a"], 15)
    assert eq2.equation.lhs.letters == (("y1", 2),)
    assert eq2.equation.types == {"y1": 15}
    assert eq2.rhs == Z.power(_gens(Z)["a"], 2)  # 2^|C| a' with |C| = 1
    assert wd.solve_multisort(eq2.equation, Z) is not None


def test_equation_rejects_multiples_of_four():
    with pytest.raises(gr.GroupError):
        dh.generate_equation2(dh.decompose(gr.dihedral(15)), 1, 12)


def test_minimal_type():
    assert dh.minimal_type(3, 15) == 3
    assert dh.minimal_type(1, 15) == 1
    assert dh.minimal_type(3, 9) == 9
    assert dh.odd_radical(60) == 15


def test_condition4_failure_gives_separating_equation_on_d3_times_d5(example):
    G, H = example.G, example.H
    assert wd.solve_multisort(example.eq2.equation, G) is not None
    assert wd.solve_multisort(example.eq2.equation, G, domain=H) is None
