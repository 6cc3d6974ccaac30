import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import involutions_and_one
from svclab import groups as gr


def perm_dihedral(n):
    """D_n as raw permutation tuples of the n-gon, composed by hand."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    comp = lambda p, q: tuple(p[q[i]] for i in range(n))  # noqa: E731
    elems = {tuple(range(n))}
    frontier = list(elems)
    while frontier:
        nxt = []
        for x in frontier:
            for g in (rot, ref):
                y = comp(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return list(elems), comp


def perm_order(p, comp):
    e, x, k = tuple(range(len(p))), p, 1
    while x != e:
        x, k = comp(x, p), k + 1
    return k


SMALL_GROUPS = {
    "Z1": lambda: gr.cyclic(1),
    "Z6": lambda: gr.cyclic(6),
    "Z2xZ4": lambda: gr.direct_product(gr.cyclic(2), gr.cyclic(4)),
    "S3": lambda: gr.symmetric(3),
    "D4": lambda: gr.dihedral(4),
    "D5": lambda: gr.dihedral(5),
    "D6": lambda: gr.dihedral(6),
    "Q8": gr.quaternion,
    "A4": lambda: gr.alternating(4),
    "S4": lambda: gr.symmetric(4),
    "Z3xS3": lambda: gr.direct_product(gr.cyclic(3), gr.symmetric(3)),
}
_CACHE = {}


def small(name):
    if name not in _CACHE:
        _CACHE[name] = SMALL_GROUPS[name]()
    return _CACHE[name]


group_names = st.sampled_from(sorted(SMALL_GROUPS))


# constructors


def test_dihedral_15_has_order_30_and_a_of_order_15():
    D = gr.dihedral(15)
    g = dict(D.generators)
    assert D.order == 30
    assert D.element_order(g["a"]) == 15
    assert D.element_order(g["b"]) == 2
    assert D.conj(g["a"], g["b"]) == D.inverse(g["a"])


def test_d3_times_d5_has_order_60(d3xd5):
    assert d3xd5.order == 60


def test_fibered_product_over_whole_group_is_full_power():
    D = gr.dihedral(4)
    assert gr.fibered_product(D, D.whole(), 3).order == 512


def test_fibered_product_over_centre_counts_cosets():
    D = gr.dihedral(4)
    Z = gr.centre(D)
    assert gr.fibered_product(D, Z, 3).order == 4 * 2**3


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 12])
def test_dihedral_matches_permutation_model(n):
    D = gr.dihedral(n)
    elems, comp = perm_dihedral(n)
    assert D.order == len(elems) == 2 * n
    assert Counter(D.element_orders) == Counter(perm_order(p, comp) for p in elems)
    centre_size = sum(all(comp(x, y) == comp(y, x) for y in elems) for x in elems)
    assert gr.centre(D).order == centre_size


def test_symmetric_and_alternating_orders():
    assert gr.symmetric(4).order == 24
    assert gr.alternating(5).order == 60
    assert gr.quaternion().order == 8


def test_bad_tables_are_rejected():
    with pytest.raises(gr.GroupError):
        gr.FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(gr.GroupError):
        gr.FiniteGroup([[1, 0], [0, 1]])
    # a Latin square with identity 0 that is not associative
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(gr.GroupError):
        gr.FiniteGroup(loop)


def test_semidirect_action_must_be_automorphic():
    Z2, Z4 = gr.cyclic(2, "b"), gr.cyclic(4)
    with pytest.raises(gr.GroupError):
        gr.semidirect_product(Z2, Z4, {1: {1: 2}})
    D = gr.semidirect_product(Z2, Z4, {1: {1: Z4.inverse(1)}})
    assert D.order == 8 and gr.centre(D).order == 2


def test_central_product_identifies_centres():
    D = gr.dihedral(4)
    z = D.power(dict(D.generators)["a"], 2)
    G = gr.central_product(D, D, {z: z})
    assert G.order == 32
    assert gr.centre(G).order == 2
    with pytest.raises(gr.GroupError):
        gr.central_product(D, D, {z: dict(D.generators)["a"]})


# centre, centralizer, lattice


def test_centre_of_d4_is_a_squared(d4):
    a = dict(d4.generators)["a"]
    assert set(gr.centre(d4).members) == {0, d4.power(a, 2)}


def test_centre_of_d15_is_trivial():
    assert gr.centre(gr.dihedral(15)).order == 1


def test_klein_four_is_self_centralizing_in_a4(a4):
    V = a4.subgroup(involutions_and_one(a4))
    assert V.order == 4
    assert gr.centralizer(a4, V) == V


def test_monolith_of_a5_is_a5():
    A5 = gr.alternating(5)
    M = gr.monolith(A5)
    assert M.order == 60 and not M.is_abelian


def test_monolith_of_d4_is_its_centre(d4):
    assert gr.monolith(d4) == gr.centre(d4)


def test_klein_four_is_not_monolithic():
    V = gr.direct_product(gr.cyclic(2), gr.cyclic(2))
    assert gr.monolith(V).order == 1


def test_normal_subgroup_counts():
    # D4 has 6 normal subgroups, S4 has 4, A5 has 2
    assert len(gr.normal_subgroups(gr.dihedral(4))) == 6
    assert len(gr.normal_subgroups(gr.symmetric(4))) == 4
    assert len(gr.normal_subgroups(gr.alternating(5))) == 2


def test_subgroup_count_of_d4_is_ten(d4):
    assert len(gr.all_subgroups(d4)) == 10


def test_lattice_cap_is_enforced():
    with pytest.raises(gr.CapExceeded):
        gr.normal_subgroups(gr.symmetric(5), cap=100)


# quotients and primary parts


def test_quotient_of_d4_cubed_by_even_weight_centre_has_order_128(d4):
    G = gr.direct_product(d4, d4, d4)
    z = d4.power(dict(d4.generators)["a"], 2)
    o = d4.order
    R = G.subgroup([z * o * o + z * o, z * o * o + z])
    assert R.order == 4 and R.is_normal()
    Gq, proj = gr.quotient(G, R)
    assert Gq.order == 128
    assert proj.is_homomorphism()


def test_quotient_rejects_non_normal(d4):
    b = dict(d4.generators)["b"]
    with pytest.raises(gr.GroupError):
        gr.quotient(d4, d4.subgroup([b]))


def test_elementary_socle_of_d4_centre(d4):
    Z = gr.centre(d4)
    assert gr.elementary_socle(Z, 2) == Z


def test_p_component_of_z12():
    Z12 = gr.cyclic(12)
    P = gr.p_component(Z12.whole(), 2)
    assert P.order == 4
    assert gr.p_component(Z12.whole(), 3).order == 3
    assert gr.elementary_socle(P, 2).order == 2


# retractions


def test_projection_of_direct_product_is_a_retraction():
    G = gr.direct_product(gr.symmetric(3), gr.cyclic(4))
    H = G.subgroup(h * 4 for h in range(6))  # S3 x {1}; pairs (h, k) sit at h*|K| + k
    assert H.order == 6
    rho = gr.find_retraction(G, H)
    assert rho is not None and gr.is_retraction(rho, H)


def test_diagonal_d15_is_not_a_retract(d3xd5, diag15):
    assert diag15.order == 30
    assert gr.find_retraction(d3xd5, diag15) is None


def test_retraction_cap_gives_unknown_not_absent(d3xd5, diag15):
    with pytest.raises(gr.CapExceeded):
        gr.find_retraction(d3xd5, diag15, cap=10)


def test_whole_group_retracts_to_itself(d4):
    rho = gr.find_retraction(d4, d4.whole())
    assert np.array_equal(rho.image, np.arange(d4.order))


def test_centre_of_d4_is_not_a_retract(d4):
    # a retraction onto Z(D4) would make D4 = Z x K with K of order 4
    assert gr.find_retraction(d4, gr.centre(d4)) is None


# properties


@settings(max_examples=30, deadline=None)
@given(group_names)
def test_group_axioms_hold(name):
    G = small(name)
    G.validate()
    M = G.mul
    ar = np.arange(G.order)
    # full associativity, not only through generators
    assert np.array_equal(M[M[:, :, None], ar[None, None, :]], M[ar[:, None, None], M[None, :, :]])
    assert (M[np.arange(G.order), G.inv] == 0).all()
    assert (M[G.inv, np.arange(G.order)] == 0).all()


@settings(max_examples=40, deadline=None)
@given(group_names, st.lists(st.integers(min_value=0, max_value=10**6), max_size=3))
def test_triple_centralizer_equals_single(name, picks):
    G = small(name)
    S = G.subgroup(p % G.order for p in picks)
    C1 = gr.centralizer(G, S)
    C3 = gr.centralizer(G, gr.centralizer(G, C1))
    assert C1 == C3


@settings(max_examples=30, deadline=None)
@given(group_names, st.integers(min_value=0, max_value=10**6))
def test_quotient_projection_is_a_homomorphism(name, pick):
    G = small(name)
    normals = gr.normal_subgroups(G)
    N = normals[pick % len(normals)]
    Gq, proj = gr.quotient(G, N)
    assert Gq.order * N.order == G.order
    assert proj.is_homomorphism()
    assert proj.kernel() == N
    # canonical representatives are minimal indices of their cosets
    for g in range(G.order):
        coset = [G.op(g, n) for n in N.members]
        assert Gq.names[proj(g)] == (G.names[min(coset)] if min(coset) else "1")


@settings(max_examples=30, deadline=None)
@given(group_names, st.lists(st.integers(min_value=0, max_value=10**6), max_size=2))
def test_found_retractions_are_idempotent(name, picks):
    G = small(name)
    H = G.subgroup(p % G.order for p in picks)
    rho = gr.find_retraction(G, H)
    if rho is not None:
        assert rho.is_homomorphism()
        assert all(rho(h) == h for h in H.members)
        assert np.array_equal(rho.image[rho.image], rho.image)
        assert set(rho.image.tolist()) == H.set


@settings(max_examples=20, deadline=None)
@given(group_names)
def test_monolith_lies_in_every_nontrivial_normal_subgroup(name):
    G = small(name)
    M = gr.monolith(G)
    if M.order > 1:
        assert all(M <= N for N in gr.normal_subgroups(G) if N.order > 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=1, max_value=8))
def test_direct_product_orders_and_centres(m, n):
    G = gr.direct_product(gr.dihedral(m + 2), gr.cyclic(n))
    assert G.order == 2 * (m + 2) * n
    Zd = gr.centre(gr.dihedral(m + 2)).order
    assert gr.centre(G).order == Zd * n


def test_conjugacy_classes_partition_the_group():
    for name in SMALL_GROUPS:
        G = small(name)
        cls = G.conjugacy_classes
        assert sorted(itertools.chain.from_iterable(cls)) == list(range(G.order))
