import json
from pathlib import Path

import pytest

from svclab import groups as gr
from svclab import groupspec
from svclab.cli import main

ROOT = Path(__file__).resolve().parents[1]
SPECS = ROOT / "specs"
FIXTURES = ROOT / "fixtures"


def spec(name):
    return str(SPECS / name)


# group specs


@pytest.mark.parametrize(
    "name, order",
    [
        ("a4.json", 12),
        ("a5.json", 60),
        ("condition4.json", 150),
        ("d15.json", 30),
        ("d3xd5.json", 60),
        ("d4.json", 8),
        ("d4_central_d4.json", 32),
        ("d4_fibered3.json", 512),
        ("q8.json", 8),
        ("s3.json", 6),
    ],
)
def test_every_shipped_group_builds(name, order):
    G = groupspec.load(SPECS / name)
    assert G.order == order


def test_shipped_list_is_complete():
    assert len(list(SPECS.glob("*.json"))) == 10


def test_json_errors_carry_position():
    with pytest.raises(groupspec.SpecError, match="line 2, column"):
        groupspec.loads('{"kind": "cyclic",\n "n": }')


def test_unknown_kind_and_missing_field():
    with pytest.raises(groupspec.SpecError, match="unknown group kind"):
        groupspec.loads('{"kind": "sporadic"}')
    with pytest.raises(groupspec.SpecError, match="'n'"):
        groupspec.loads('{"kind": "dihedral"}')
    with pytest.raises(groupspec.SpecError):
        groupspec.loads("[1, 2]")


def test_group_errors_are_reported_as_spec_errors():
    with pytest.raises(groupspec.SpecError):
        groupspec.loads('{"kind": "table", "table": [[0, 1], [0, 1]]}')


def test_elements_by_word_and_by_index():
    G = groupspec.loads('{"kind": "dihedral", "n": 4}')
    a = dict(G.generators)["a"]
    assert groupspec.element(G, "a^2") == G.power(a, 2)
    assert groupspec.element(G, 3) == 3
    with pytest.raises(groupspec.SpecError):
        groupspec.element(G, 99)
    with pytest.raises(groupspec.SpecError):
        groupspec.element(G, "q")


def test_semidirect_and_quotient_kinds():
    doc = {
        "kind": "semidirect",
        "C": {"kind": "cyclic", "n": 2, "gen": "c"},
        "Q": {"kind": "cyclic", "n": 7, "gen": "q"},
        "action": {"c": {"q": "q^-1"}},
    }
    G = groupspec.build(doc)
    assert G.order == 14 and gr.centre(G).order == 1
    Q = groupspec.build({"kind": "quotient", "group": {"kind": "dihedral", "n": 4}, "normal": ["a^2"]})
    assert Q.order == 4 and Q.is_abelian


def test_order_cap_is_enforced():
    with pytest.raises(gr.CapExceeded):
        groupspec.load(SPECS / "d4_fibered3.json", cap=100)


# command line


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_group_command(capsys):
    code, out, _ = run(capsys, "group", "--g", spec("d4.json"))
    assert code == 0
    assert "order: 8" in out and "result: ok" in out


def test_retract_absent_for_the_diagonal(capsys):
    code, out, _ = run(capsys, "retract", "--g", spec("d3xd5.json"), "--h", "diagonal-d15")
    assert code == 0
    assert "[ABSENT ] retraction" in out


def test_json_output_is_machine_readable(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(
        capsys, "retract", "--g", spec("d3xd5.json"), "--h", "diagonal-d15", "--format", "json", "--report", report
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert [c["status"] for c in doc["checks"]] == ["ABSENT"]
    assert json.loads(report.read_text()) == doc


def test_bad_inputs_exit_with_two(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": ')
    code, _, err = run(capsys, "group", "--g", bad)
    assert code == 2 and "line 1" in err
    code, _, err = run(capsys, "group", "--g", tmp_path / "missing.json")
    assert code == 2 and err.startswith("error:")
    code, _, err = run(capsys, "solve", "--g", spec("d4.json"), "--eq", "[x,y = a")
    assert code == 2


def test_solve_from_a_file(capsys):
    code, out, _ = run(
        capsys, "solve", "--g", spec("d3xd5.json"), "--eq", FIXTURES / "eq15.txt", "--domain", "H", "--h", "diagonal-d15"
    )
    assert code == 0
    assert "[ABSENT ] search" in out and "assignments: 810000" in out


def test_solve_finds_a_solution(capsys):
    code, out, _ = run(capsys, "solve", "--g", spec("d4.json"), "--eq", "[x,y] = a^2")
    assert code == 0 and "FOUND" in out


def test_approx_lemma_export(capsys, tmp_path):
    target = tmp_path / "R.txt"
    code, out, _ = run(capsys, "approx-lemma", "--p", 2, "--d", 1, "--k", 1, "--J", 1, "--export", target)
    assert code == 0
    assert "J_prime: [1, 2]" in out
    rows = [ln.split() for ln in target.read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    assert len(rows) == 2 and all(len(r) == 3 for r in rows)


def test_heisenberg_word(capsys):
    code, out, _ = run(capsys, "heisenberg-word", "--word", "[t1,t2]")
    assert code == 0
    assert "F: [[0, 1], [-1, 0]]" in out and "FAIL" not in out


def test_heisenberg_word_with_square(capsys):
    code, out, _ = run(capsys, "heisenberg-word", "--word", "t1^2", "--box", 4, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all(c["status"] != "FAIL" for c in doc["checks"])


def test_centre_lab_small_instance(capsys):
    code, out, _ = run(capsys, "centre-lab", "--g", spec("d4.json"), "--t", 3, "--smax", 1)
    assert code == 0
    assert "|G|: 128" in out and "[ABSENT ] retraction" in out


def test_centre_lab_with_rows_from_a_file(capsys):
    code, out, _ = run(
        capsys, "centre-lab", "--g", spec("d4.json"), "--t", 3, "--R-file", FIXTURES / "d4_even_weight_t3.txt", "--smax", 1
    )
    assert code == 0 and "|G|: 128" in out


def test_dihedral_analyze(capsys):
    code, out, _ = run(capsys, "dihedral-analyze", "--n", 15, "--overgroup-spec", spec("d3xd5.json"))
    assert code == 0
    assert "holds: false" in out
    assert "[ABSENT ] unsolvable in H" in out


def test_verbal_closure_finds_a_witness_for_the_centre_of_d4(capsys):
    code, out, _ = run(capsys, "verbal-closure", "--g", spec("d4.json"), "--h", "centre", "--smax", 1)
    assert code == 0
    assert "NOT CLOSED" in out and "t1^2" in out


def test_verbal_closure_with_extra_word(capsys):
    code, out, _ = run(
        capsys,
        "verbal-closure", "--g", spec("d3xd5.json"), "--h", "diagonal-d15", "--smax", 1,
        "--word", "t2 t1^-1 t2^-1 t1 t2^3",
    )
    assert code == 0 and "NOT CLOSED" in out


def test_structure(capsys):
    code, out, _ = run(capsys, "structure", "--g", spec("a5.json"))
    assert code == 0
    assert "holds: true" in out


def test_structure_with_modules(capsys):
    code, out, _ = run(capsys, "structure", "--g", spec("a4.json"), "--h", "whole", "--modules")
    assert code == 0 and "FAIL" not in out


def test_missing_group_flag_is_an_error():
    with pytest.raises(SystemExit):
        main(["group"])
