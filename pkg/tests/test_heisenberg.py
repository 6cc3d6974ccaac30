import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svclab import heisenberg as he
from svclab import smith as sm
from svclab import words as wd

T = he.HElement
ints = st.integers(min_value=-10**12, max_value=10**12)
elements = st.builds(T, ints, ints, ints)


# Smith form


def test_smith_of_a_known_matrix():
    S = sm.smith([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert S.D == [2, 6, 12]
    assert S.is_valid()


def test_smith_of_rank_deficient_and_empty_shapes():
    S = sm.smith([[0, 0], [0, 0]])
    assert S.D == [0, 0] and S.is_valid()
    S = sm.smith([[3, 6, 9]])
    assert S.D == [3] and S.rank == 1 and S.is_valid()


@settings(max_examples=120, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_smith_is_valid_on_random_matrices(m, n, seed):
    A = np.random.default_rng(seed).integers(-50, 51, size=(m, n)).tolist()
    S = sm.smith(A)
    assert S.is_valid()
    assert sm.matmul(sm.matmul(S.P, A), S.Q) == S.diagonal_matrix()


def test_determinant_against_cofactor_expansion():
    A = [[2, -1, 0, 3], [1, 4, 2, 0], [0, 5, -3, 1], [7, 0, 1, 2]]

    def cof(M):
        if len(M) == 1:
            return M[0][0]
        return sum((-1) ** j * M[0][j] * cof([r[:j] + r[j + 1:] for r in M[1:]]) for j in range(len(M)))

    assert sm.det(A) == cof(A)


def test_kernel_basis_spans_the_kernel():
    K = sm.kernel_basis([2, 4, 6])
    assert len(K) == 2
    assert all(2 * k[0] + 4 * k[1] + 6 * k[2] == 0 for k in K)
    # a primitive lattice basis: the 2x2 minors have gcd 1
    minors = [K[0][i] * K[1][j] - K[0][j] * K[1][i] for i in range(3) for j in range(i + 1, 3)]
    assert sm.gcd_all(minors) == 1
    assert sm.kernel_basis([0, 0]) == sm.identity(2)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=5))
def test_extended_gcd_vector(l):
    g, c = sm.ext_gcd_vector(l)
    assert g == sm.gcd_all(l) and g >= 0
    assert sum(a * b for a, b in zip(l, c)) == g


# the group law


def test_multiplication_law():
    assert T(1, 2, 3) * T(4, 5, 6) == T(5, 7, 3 + 6 + 1 * 5)
    assert T(2, 3, 1).inverse() == T(-2, -3, -1 + 6)


@settings(max_examples=100, deadline=None)
@given(elements, elements, elements)
def test_law_is_associative_and_inverses_round_trip(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a * b) * b.inverse() == a
    assert a * a.inverse() == T.one()


def test_matrix_model_agrees():
    def mat(g):
        return np.array([[1, g.x, g.z], [0, 1, g.y], [0, 0, 1]], dtype=object)

    rng = np.random.default_rng(5)
    for _ in range(100):
        a, b = (T(*(int(v) for v in rng.integers(-99, 100, size=3))) for _ in range(2))
        assert (mat(a).dot(mat(b)) == mat(a * b)).all()


# extraction


def test_commutator_extraction_is_the_skew_form():
    bd = he.extract(wd.parse("[t1,t2]"))
    assert bd.l == (0, 0)
    assert bd.F == [[0, 1], [-1, 0]]


def test_square_extraction():
    bd = he.extract(wd.parse("t1^2"))
    assert bd.l == (2,)
    assert bd.F == [[1]]


def test_single_letter_extraction():
    bd = he.extract(wd.parse("t1"))
    assert bd.l == (1,) and bd.F == [[0]]


def test_coefficients_are_rejected():
    with pytest.raises(ValueError):
        he.extract(wd.parse("t1 a"), names=["t1"])


@pytest.mark.parametrize("text, s", he.FIXTURE_WORDS)
def test_extraction_matches_direct_evaluation(text, s):
    assert he.extraction_agrees(wd.parse(text), s, samples=100, seed=1)


word_letters = st.lists(
    st.tuples(st.sampled_from(["t1", "t2", "t3"]), st.integers(-3, 3).filter(bool)), min_size=1, max_size=7
)


@settings(max_examples=60, deadline=None)
@given(word_letters, st.integers(0, 2**32 - 1))
def test_extraction_matches_evaluation_on_random_words(letters, seed):
    w = wd.Word(wd._merge(tuple(letters)))
    if not w.letters:
        return
    assert he.extraction_agrees(w, None, samples=20, seed=seed, bound=1000)


@settings(max_examples=60, deadline=None)
@given(word_letters, st.lists(st.integers(-30, 30), min_size=3, max_size=3))
def test_diagonal_value_closed_form(letters, u):
    w = wd.Word(wd._merge(tuple(letters)))
    if not w.letters:
        return
    bd = he.extract(w)
    u = u[: bd.s]
    assert bd.f(u, u) == he.diagonal_value(bd, u)


# skew symmetry on ker l


def test_skew_on_whole_lattice_for_commutator():
    assert he.skew_check(he.extract(wd.parse("[t1,t2]")))


def test_skew_vacuous_for_square():
    bd = he.extract(wd.parse("t1^2"))
    assert bd.kernel == [] and he.skew_check(bd)


def test_skew_on_kernel_for_normal_form_word():
    bd = he.extract(wd.parse("t1 t2 t1^-1 t2"))
    assert bd.l == (0, 2) and he.in_normal_form(bd)
    assert he.skew_check(bd)


def test_skew_fails_off_normal_form():
    # l = (1, 1, -2): f(u, u) = -(u1^2 + u2^2 - 2 u3^2)/2 on ker l
    bd = he.extract(wd.parse("t1 t2 t3^-2"))
    assert not he.in_normal_form(bd)
    u = [1, -1, 0]
    assert bd.lin(u) == 0 and bd.f(u, u) == -1
    assert not he.skew_check(bd)


# affine-bilinear lemma


def test_affine_image_with_odd_offset_is_everything():
    # restricted form diag(2, 6), affine part m = (3, 0)
    res = he.affine_image_subgroup([[1, 0], [0, 6]], [3, 0], U_basis=[[2, 0], [0, 1]])
    assert res.n == [2, 6] and res.m == [3, 0] and res.g == 1
    vals = he.affine_image_oracle(res, 20)
    assert set(range(-50, 51)) <= vals


def test_zero_offset_gives_n1():
    res = he.affine_image_subgroup([[2, 0], [0, 6]], [0, 0])
    assert res.g == res.n1 == 2


def test_unimodular_form_gives_everything():
    res = he.affine_image_subgroup([[1, 0], [0, 1]], [5, 7])
    assert res.g == 1


def test_rank_one_is_outside_the_lemma():
    with pytest.raises(he.LemmaHypothesisError):
        he.affine_image_subgroup([[1, 2], [2, 4]], [1, 0])


def test_gcd_formula_against_box_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        F, u, U = he.random_rank2_instance(rng)
        res = he.affine_image_subgroup(F, u, U_basis=U)
        ok, box = he.oracle_agrees(res, 3, 12)
        assert ok, (F, u, U, res.g, box)


# image meets the centre


def test_commutator_image_contains_the_centre():
    rep = he.verbal_image_structure("[t1,t2]", 2, box=5, coset_samples=3)
    assert rep.g == 1 and rep.subgroup_agree and rep.coset_ok


def test_square_image_meets_centre_in_even_corners():
    rep = he.verbal_image_structure("t1^2", 1, box=5, coset_samples=3)
    assert rep.g == 2 and rep.subgroup_agree and rep.coset_ok
    assert all(c % 2 == 0 for c in rep.found)


def test_single_letter_image_is_everything():
    rep = he.verbal_image_structure("t1", 1, box=3, coset_samples=3)
    assert rep.g == 1 and rep.subgroup_agree


def test_centre_generator_formula():
    assert he.extract(wd.parse("t1^2 t2^3 [t1,t3]")).centre_generator == 1
    assert he.extract(wd.parse("t1^4")).centre_generator == 4
    assert he.extract(wd.parse("[t1,t2]^3")).centre_generator == 3


# central product


@pytest.mark.parametrize("text, s", [("[t1,t2]", 2), ("t1", 1), ("t1^2", 1)])
def test_central_product_instances_resolve_in_h(text, s):
    rep = he.central_product_vc_check(text, s, samples=30, box=3, seed=2)
    assert rep.ok, rep.failures[:3]
    assert rep.landed == rep.confirmed == 30


def test_central_product_element_law():
    rng = np.random.default_rng(4)
    C = he.CPElement
    for _ in range(50):
        a, b, c = (C(T(*(int(v) for v in rng.integers(-9, 10, size=3))), *(int(v) for v in rng.integers(-9, 10, size=2))) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * a.inverse() == C.one()
