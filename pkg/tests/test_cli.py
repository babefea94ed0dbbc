import json

import numpy as np
import pytest
from click.testing import CliRunner
from hypothesis import given, settings
from hypothesis import strategies as st

from pencil_resolvent import cli as cli_mod
from pencil_resolvent import errors
from pencil_resolvent.cli import cli, dump_document, emit_growth_csv, parse_document
from pencil_resolvent.pencil import BasicSolution, OperatorPencil
from pencil_resolvent.resolvent import LaurentExpansion, laurent_coeffs
from pencil_resolvent.zoo import FamilySpec, random_regular


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, list(args))

    return invoke


def write(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def pairs(m):
    return [[[float(x.real), float(x.imag)] for x in row] for row in np.asarray(m, dtype=complex)]


# --- commands ---------------------------------------------------------------------

@pytest.mark.parametrize("region", ["near-zero", "near-infinity"])
def test_reproduce_example3(run, region):
    res = run("reproduce", "--family", "example3", "--region", region, "--json")
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["summary"]["max_golden_deviation"] <= 1e-8
    assert data["passed"]


def test_analyze_jordan_block(run):
    res = run("analyze", "--family", "jordan_block", "--m", "2", "--json")
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["ascent_descent"]["ascent"] == "2"
    assert data["ascent_descent"]["descent"] == "2"


def test_analyze_example1_text(run):
    res = run("analyze", "--family", "example1")
    assert res.exit_code == 0, res.output
    assert "exceeds 10" in res.output
    assert "probe_limit: 10" in res.output


@pytest.mark.parametrize("command", ["chains", "project", "solve", "laurent", "validate"])
def test_commands_pass_on_example3(run, command):
    res = run(command, "--family", "example3", "--json")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["passed"]


def test_report_echoes_settings(run):
    data = json.loads(run("solve", "--family", "example3", "--json").output)
    s = data["settings"]
    assert s["tolerances"] == {"rank_rel": 1e-10, "residual_abs": 1e-9, "angle_tol": 1e-8}
    assert s["probe_depth"] == 24 and s["oracle_nodes"] == 512
    assert s["annulus"] == [0.0, 2.0]


def test_params_option(run):
    res = run("reproduce", "--family", "example3", "--params", "beta=3.0", "--json")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["settings"]["source"]["params"]["beta"] == 3.0


def test_inline_document(run, tmp_path):
    doc = {"pencil": {"a0": pairs([[0, 1], [0, 0]]), "a1": pairs(np.eye(2))}}
    res = run("solve", "--file", write(tmp_path, doc), "--json")
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["settings"]["source"] == "inline"
    assert np.allclose(np.array(data["basic_solution"]["R_-1"])[..., 0], np.eye(2))


def test_validate_with_samples(run, tmp_path):
    doc = {"pencil": {"family": "example3", "params": {"beta": [2.0, 0.0]}},
           "samples": [[0.3, 0], [0, 0.5], [-0.8, 0]]}
    res = run("validate", "--file", write(tmp_path, doc))
    assert res.exit_code == 0, res.output


def test_out_writes_report(run, tmp_path):
    out = tmp_path / "report.json"
    res = run("project", "--family", "jordan_block", "--m", "3", "--json", "--out", str(out))
    assert res.exit_code == 0
    assert json.loads(out.read_text())["command"] == "project"


# --- exit codes -----------------------------------------------------------------------

def test_failed_check_exits_one(run):
    # absolute residuals cannot hold once coefficients reach 2**60
    res = run("laurent", "--family", "example3", "--region", "near-infinity", "--k-max", "60")
    assert res.exit_code == 1
    assert "result: FAIL" in res.output


def test_sample_outside_hint(run, tmp_path):
    doc = {"pencil": {"family": "example3"}, "annulus_hint": {"s": 0, "r": 1.0},
           "samples": [[1.5, 0]]}
    res = run("validate", "--file", write(tmp_path, doc))
    assert res.exit_code == 6
    assert "OutsideAnnulus" in res.output


@pytest.mark.parametrize("doc", [
    {"pencil": {"a0": [[1, 0], [0, 1]], "a1": pairs(np.eye(2))}},
    {"pencil": {"a0": pairs(np.eye(2)), "a1": pairs(np.eye(3))}},
    {"pencil": {"family": "example3", "params": {"beta": 2.0}}},
    {"pencil": {"family": "example3"}, "samples": [0.5]},
    {"pencil": {"family": "example3"}, "colour": "red"},
    {"pencil": {}},
    "not json",
])
def test_malformed_documents_exit_two(run, tmp_path, doc):
    res = run("solve", "--file", write(tmp_path, doc))
    assert res.exit_code == 2, res.output


def test_invalid_params_exit_three(run):
    assert run("solve", "--family", "example3", "--params", "beta=0").exit_code == 3


def test_not_complementary_exit_four(run, tmp_path):
    # A(z) = diag(1 + z, 0) is singular for every z
    doc = {"pencil": {"a0": pairs(np.diag([1, 0])), "a1": pairs(np.diag([1, 0]))}}
    res = run("project", "--file", write(tmp_path, doc))
    assert res.exit_code == 4


def test_missing_source_exits_two(run):
    assert run("solve").exit_code == 2


@pytest.mark.parametrize("exc,code", [
    (errors.SingularNode(3, 1.0), 5),
    (errors.SingularShift("z is an eigenvalue"), 5),
    (errors.NotInvertibleOnSubspace("A1 L"), 4),
    (errors.NoReference("none"), 7),
])
def test_error_exit_table(monkeypatch, exc, code):
    def boom(*args, **kwargs):
        raise exc

    monkeypatch.setitem(cli_mod.COMMANDS, "analyze", boom)
    assert cli_mod.execute("analyze", family="jordan_block", m=2, echo=lambda *a, **k: None) == code


def test_reproduce_needs_family(run, tmp_path):
    doc = {"pencil": {"a0": pairs(np.eye(2)), "a1": pairs(np.eye(2))}}
    assert run("reproduce", "--file", write(tmp_path, doc)).exit_code == 7


# --- documents ---------------------------------------------------------------------------

def test_round_trip_is_bit_exact():
    p = random_regular(4, 3)
    q = parse_document(dump_document(p)).pencil()
    assert np.array_equal(p.a0, q.a0) and np.array_equal(p.a1, q.a1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2 ** 32 - 1))
def test_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    scale = 10.0 ** rng.uniform(-300, 300, (2, n, n))
    a0 = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * scale[0]
    a1 = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) * scale[1]
    p = OperatorPencil(a0, a1)
    q = parse_document(dump_document(p)).pencil()
    assert np.array_equal(p.a0, q.a0) and np.array_equal(p.a1, q.a1)


def test_annulus_hint_infinite_radius():
    for r in (None, "inf"):
        doc = parse_document(json.dumps({"pencil": {"family": "example3"},
                                         "annulus_hint": {"s": 2, "r": r}}))
        assert doc.annulus_hint.s == 2 and doc.annulus_hint.r == float("inf")


def test_family_document():
    doc = parse_document(json.dumps({"pencil": {"family": "example3", "truncation": 8,
                                                "params": {"beta": [1, 1]}}}))
    assert doc.family == FamilySpec("example3", {"beta": 1 + 1j}, 8)
    assert doc.pencil().n == 8


def test_tolerance_overrides():
    doc = parse_document(json.dumps({"pencil": {"family": "example3"},
                                     "tolerances": {"rank_rel": 1e-12}}))
    assert doc.tolerances == {"rank_rel": 1e-12}
    with pytest.raises(errors.ParseError):
        parse_document(json.dumps({"pencil": {"family": "example3"},
                                   "tolerances": {"fuzz": 1}}))


# --- growth CSV ----------------------------------------------------------------------------

def test_csv_trivial_pencil(tmp_path):
    p = OperatorPencil(np.zeros((2, 2)), np.eye(2))
    exp = laurent_coeffs(BasicSolution(np.eye(2), np.zeros((2, 2))), p, 1, 0)
    path = tmp_path / "growth.csv"
    text = emit_growth_csv(exp, path)
    assert path.read_bytes() == text.encode("ascii")
    assert text == "j,norm_fro,root_norm\n-1,1.4142135623730951,1.4142135623730951\n0,0,\n"


def test_csv_example3_growth(run, tmp_path):
    path = tmp_path / "growth.csv"
    res = run("laurent", "--family", "example3", "--l-max", "40", "--out", str(path))
    assert res.exit_code == 0, res.output
    lines = path.read_bytes().split(b"\n")
    assert b"\r" not in path.read_bytes()
    rows = [line.split(b",") for line in lines[1:] if line]
    roots = {int(r[0]): float(r[2]) for r in rows if r[2]}
    assert roots[40] == pytest.approx(0.5, rel=0.1)


def test_csv_full_precision():
    exp = LaurentExpansion({-1: np.array([[1 / 3]]), 0: np.array([[0.1]])})
    rows = emit_growth_csv(exp).splitlines()
    assert rows[1] == "-1,0.33333333333333331,0.33333333333333331"
    assert float(rows[2].split(",")[1]) == 0.1


def test_csv_empty_expansion():
    with pytest.raises(ValueError):
        emit_growth_csv({})


def test_csv_unwritable_path(tmp_path):
    exp = LaurentExpansion({-1: np.eye(1)})
    with pytest.raises(OSError):
        emit_growth_csv(exp, tmp_path / "missing" / "growth.csv")
