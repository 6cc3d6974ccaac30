import numpy as np
import pytest

from svclab import centre_lab as cl
from svclab import groups as gr
from svclab import words as wd


@pytest.fixture(scope="module")
def d4_t3():
    return cl.build_counterexample(gr.dihedral(4), t=3, R_rows=cl.sum_zero(3))


def test_sum_zero_rows_span_the_even_weight_code():
    rows = cl.sum_zero(3)
    assert rows.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert cl.sum_zero(3, 2, 3).shape == (4, 6)


def test_read_rows_skips_comments():
    assert cl.read_rows("# R\n1 0 1\n\n0 1 1\n").tolist() == [[1, 0, 1], [0, 1, 1]]


def test_d4_explicit_instance(d4_t3):
    fq = d4_t3
    assert fq.representation == cl.EXPLICIT
    assert fq.L.order == 8 and fq.ZL.order == 2 and fq.d == 1
    assert fq.Q.order == 512 and fq.G.order == 128
    assert cl.check_R_normal(fq)
    assert cl.check_diagonal_injective(fq)
    assert fq.warnings == []


def test_d4_explicit_one_variable_closure(d4_t3):
    rep = cl.verify_mechanism(d4_t3, s_max=1)
    assert rep.passed and rep.closure.closed_up_to == 1


def test_d4_explicit_retraction_is_absent(d4_t3):
    # frozen after the first exhaustive run
    assert cl.report_retraction(d4_t3).status == "ABSENT"


def test_quaternion_instance_has_the_same_size():
    fq = cl.build_counterexample(gr.quaternion(), t=3, R_rows=cl.sum_zero(3))
    assert fq.G.order == 128
    assert cl.check_R_normal(fq) and cl.check_diagonal_injective(fq)


def test_trivial_R_with_one_copy_is_the_group_itself():
    H = gr.dihedral(4)
    fq = cl.build_counterexample(H, t=1, R_rows=np.zeros((0, 1), dtype=np.int64))
    assert fq.G.order == H.order
    rr = cl.report_retraction(fq)
    assert rr.status == "FOUND"
    assert all(rr.echo.values())


def test_abelian_groups_retract():
    H = gr.cyclic(4)
    fq = cl.build_counterexample(H, t=3, R_rows=cl.sum_zero(3))
    assert fq.G.order == 4**3 // 4
    assert fq.warnings  # psi_2 exists for an abelian group
    rr = cl.report_retraction(fq)
    assert rr.status == "FOUND" and all(rr.echo.values())


def test_single_variable_word_passes_trivially(d4_t3):
    diag = d4_t3.H_diag
    w = wd.parse("x")
    for h in diag.members:
        assert wd.solve((w, h), d4_t3.G, domain=diag) == {"x": h}


def test_trivial_centre_is_rejected():
    with pytest.raises(cl.CentreLabError):
        cl.build_counterexample(gr.dihedral(15), t=3)


def test_t_is_required_without_polynomial_mode():
    with pytest.raises(cl.CentreLabError):
        cl.build_counterexample(gr.dihedral(4))


def test_normal_forms_in_implicit_mode_match_explicit_quotient(d4_t3):
    H = gr.dihedral(4)
    fq = cl.build_counterexample(H, t=3, R_rows=cl.sum_zero(3), explicit_cap=1)
    assert fq.representation == cl.IMPLICIT
    assert cl.check_R_normal(fq) and cl.check_diagonal_injective(fq)
    # two tuples are equal in G exactly when their normal forms agree
    tuples = d4_t3.Q.tuples
    rng = np.random.default_rng(1)
    for _ in range(300):
        i, j = (int(v) for v in rng.integers(0, len(tuples), size=2))
        same_explicit = d4_t3.proj(i) == d4_t3.proj(j)
        same_implicit = np.array_equal(fq.normalize(tuples[i]), fq.normalize(tuples[j]))
        assert same_explicit == same_implicit
    rep = cl.verify_mechanism(fq, samples=200, seed=3)
    assert rep.passed
    assert cl.report_retraction(fq).status == "UNKNOWN"


def test_polynomial_parameters_for_d4():
    fq = cl.build_counterexample(gr.dihedral(4), paper=True)
    assert fq.k == 10
    assert (fq.polynomial.r, fq.polynomial.n, fq.t) == (10, 11, 2047)
    assert fq.representation == cl.IMPLICIT
    assert cl.check_R_normal(fq) and cl.check_diagonal_injective(fq)
    rep = cl.verify_mechanism(fq, samples=300, seed=0)
    assert rep.passed, rep.failures[:3]
    assert cl.report_retraction(fq).status == "UNKNOWN"
