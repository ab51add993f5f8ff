import io
import json
import shutil
import subprocess

import pytest

from confalg.cli import FORMAT_VERSION, load_definitions, main, parse_element
from confalg.errors import ConfAlgError, FormatError
from confalg.representations import check_rep, check_well_defined

ABELIAN = {
    "version": FORMAT_VERSION,
    "algebras": {
        "ab": {"kind": "lie", "basis": ["p"], "table": []},
        "vir": {"kind": "lie", "basis": ["x"], "table": [["x", "x", "x", "D + 2*l"]]},
    },
    "modules": {"tors": {"generators": ["u", "w"], "relations": {"w": "D"}}},
    "representations": {
        "onto_torsion": {"algebra": "ab", "module": "tors", "action": [["p", "u", "w", "1"]]},
        "trivial": {"algebra": "ab", "module": {"generators": ["z"]}, "action": []},
        "vir1": {"algebra": "vir", "module": {"generators": ["v"]}, "action": [["x", "v", "v", "D + l"]]},
    },
}


def run(*argv, text=None, tmp_path=None):
    args = list(argv)
    if text is not None:
        path = tmp_path / "defs.json"
        path.write_text(text)
        args += ["--file", str(path)]
    buf = io.StringIO()
    code = main(args + ["--json"], out=buf)
    return code, json.loads(buf.getvalue())


def strip_timing(cert):
    return {k: v for k, v in cert.items() if k != "timing"}


# -- check ---------------------------------------------------------------------------------------


def test_check_axioms_passes_and_fails():
    code, cert = run("check", "virasoro", "--axioms")
    assert code == 0 and cert["status"] == "pass"
    assert cert["results"][0]["check"] == "lie"
    code, cert = run("check", "diff_x3")
    assert code == 1 and cert["status"] == "fail"
    assert cert["results"][0]["witnesses"]


def test_check_units_reports_absence_without_failing():
    code, cert = run("check", "split_null", "--units")
    assert code == 0
    notes = cert["results"][0]["notes"]
    assert "left unit: one" in notes and "right unit: none-within-bound" in notes


def test_check_solvable_and_central_pbw():
    assert run("check", "solv_xy", "--solvable")[0] == 0
    code, cert = run("check", "virasoro", "--solvable")
    assert code == 1 and cert["results"][0]["witnesses"] == [{"terminal_rank": 1}]
    assert run("check", "curr_solv2", "--central-pbw", "1")[0] == 0
    assert run("check", "solv_xy", "--central-pbw", "x=2,y=1")[0] == 0
    code, cert = run("check", "virasoro", "--central-pbw", "x=2")
    assert code == 1 and cert["results"][0]["witnesses"][0]["m"] == 2


def test_check_file_representations(tmp_path):
    text = json.dumps(ABELIAN, indent=2)
    for name in ("onto_torsion", "trivial", "vir1"):
        code, cert = run("check", name, text=text, tmp_path=tmp_path)
        assert code == 0, cert
        assert [r["check"] for r in cert["results"]] == ["representation", "well-definedness"]


def test_ill_defined_action_is_a_precondition_error_with_a_line(tmp_path):
    bad = json.loads(json.dumps(ABELIAN))
    bad["representations"]["onto_torsion"]["action"] = [["p", "w", "w", "1"]]
    code, cert = run("check", "ab", text=json.dumps(bad, indent=2), tmp_path=tmp_path)
    assert code == 3 and cert["status"] == "precondition-error"
    assert "(line " in cert["error"] and cert["witness"]["generator"] == "w"


# -- build-rep -----------------------------------------------------------------------------------------


def test_build_rep_adjoin_unit_round_trip(tmp_path):
    out = tmp_path / "rep.json"
    code, cert = run("build-rep", "curr_m2", "--method", "adjoin-unit", "--out", str(out))
    assert code == 0 and cert["rank"] == 5 and cert["faithful"] and cert["free"]
    defs = load_definitions(out.read_text())
    R = defs.representations["curr_m2.adjoin-unit"]
    assert R.rank == 5 and check_rep(R).passed and check_well_defined(R).passed
    code, again = run("check", "curr_m2.adjoin-unit", "--file", str(out))
    assert code == 0 and again["status"] == "pass"


def test_build_rep_zero_window_is_flagged():
    code, cert = run("build-rep", "curr_q", "--method", "adjoin-unit", "--Mprime", "0")
    assert code == 0 and not cert["faithful"]
    assert any("not guaranteed" in n for n in cert["notes"])
    assert cert["kernel_witness"] == "e"


def test_build_rep_double_and_solvable():
    code, cert = run("build-rep", "curr_sl2", "--method", "double")
    assert code == 0 and cert["rank"] == 4 and cert["faithful"]
    code, cert = run("build-rep", "solv_xy", "--method", "solvable", "--K", "1")
    assert code == 0 and cert["rank"] == 4 and cert["faithful"]
    assert cert["representation"]["modules"]["solv_xy.solvable.module"]["generators"] == ["u", "t0.x", "t1.x", "t0.y"]


def test_build_rep_with_a_file_pairing(tmp_path):
    defs = {
        "version": FORMAT_VERSION,
        "representations": {
            "V": {"algebra": "curr_solv2", "module": {"generators": ["u"]}, "action": []},
            "M": {"algebra": "curr_solv2", "module": {"generators": ["a", "b"]},
                  "action": [["a", "b", "b", "1"], ["b", "a", "b", "-1"]]},
        },
        "pairings": {"P": {"algebra": "curr_solv2", "V": "V", "M": "M",
                           "table": [["a", "u", "a", "1"], ["b", "u", "b", "1"]]}},
    }
    code, cert = run("build-rep", "curr_solv2", "--method", "double", "--pairing", "P",
                     text=json.dumps(defs, indent=2), tmp_path=tmp_path)
    assert code == 0 and cert["rank"] == 3 and cert["faithful"]


def test_build_rep_precondition_errors():
    code, cert = run("build-rep", "virasoro", "--method", "central-pbw", "--N", "x=1")
    assert code == 3 and cert["status"] == "precondition-error"
    assert cert["witness"]["m"] == 1
    code, cert = run("build-rep", "virasoro", "--method", "double")
    assert code == 3 and cert["witness"][0]["residual"] == "(D + l + m)*x"
    code, cert = run("build-rep", "virasoro", "--method", "solvable")
    assert code == 3
    code, cert = run("build-rep", "virasoro", "--method", "adjoin-unit")
    assert code == 3


def test_central_pbw_needs_bounds():
    assert run("build-rep", "curr_sl2", "--method", "central-pbw")[0] == 2


# -- eval and growth ----------------------------------------------------------------------------------------


@pytest.mark.parametrize("obj,expr,value", [
    ("virasoro", "lprod(x, x)", "(D + 2*l)*x"),
    ("virasoro", "nprod(x, x, 1)", "2*x"),
    ("virasoro", "braced(x, x, 0)", "-D*x"),
    ("weyl", "lprod(x, x)", "x^2 + l*x"),
    ("virasoro", "central(x, 0, 3, x)", "-3 * t^2 (x)"),
    ("curr_m2", "lprod(E12, E21)", "E11"),
])
def test_eval_values(obj, expr, value):
    code, cert = run("eval", obj, expr)
    assert code == 0 and cert["value"] == value


def test_eval_act_on_file_representation(tmp_path):
    code, cert = run("eval", "vir", "act(vir1, x, D*v)", text=json.dumps(ABELIAN), tmp_path=tmp_path)
    assert code == 0 and cert["value"] == "(D^2 + 2*l*D + l^2)*v"


def test_eval_errors():
    code, cert = run("eval", "virasoro", "lprod(x, q)")
    assert code == 2 and "q" in cert["error"]
    assert run("eval", "nosuch", "lprod(x, x)")[0] == 2
    assert run("eval", "virasoro", "lprod(x")[0] == 2


def test_growth():
    code, cert = run("growth", "weyl", "--n", "6")
    assert code == 0 and cert["ranks"] == [1, 2, 3, 4, 5, 6]
    code, cert = run("growth", "curr_m2", "--n", "3", "--generators", "E12,E21")
    assert cert["ranks"] == [2, 4, 4]


# -- files and certificates -------------------------------------------------------------------------------


def test_certificates_are_reproducible(tmp_path):
    _, a = run("build-rep", "solv_xy", "--method", "solvable")
    _, b = run("build-rep", "solv_xy", "--method", "solvable")
    assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)
    _, c = run("build-rep", "solv_xy", "--method", "solvable", "--K", "2")
    assert c["inputs_digest"] != a["inputs_digest"]


@pytest.mark.parametrize("text,fragment", [
    ('{"version": "confalg-definitions/1",\n "algebras": {\n  "a": {"kind": "lie", "basis": ["x"],\n'
     '   "table": [["x", "y", "x", "1"]]}}}', "line 3"),
    ('{"version": "confalg-definitions/1",\n "algebras": {\n  "a": {"kind": "lie", "basis": ["x"],\n'
     '   "table": [["x", "x", "x", "D +"]]}}}', "line 4"),
    ('{"version": "confalg-definitions/1",\n  "algebras": [1, 2,]}', "line 2"),
    ('{"version": "other"}', "version"),
])
def test_malformed_files_report_their_location(text, fragment):
    with pytest.raises(ConfAlgError) as err:
        load_definitions(text)
    assert fragment in str(err.value)


def test_missing_file_is_an_input_error(tmp_path):
    assert main(["check", "virasoro", "--file", str(tmp_path / "absent.json")], out=io.StringIO()) == 2


def test_text_output():
    buf = io.StringIO()
    assert main(["check", "virasoro"], out=buf) == 0
    assert buf.getvalue().startswith("check virasoro: pass\n  lie: pass\n")


def test_parse_element_shadows_variables():
    assert str(parse_element("2*D*x + x", ["x"])) == "(2*D + 1)*x"
    with pytest.raises(FormatError):
        parse_element("D + 1", ["x"])


@pytest.mark.skipif(shutil.which("confalg") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["confalg", "eval", "virasoro", "lprod(x, x)"], capture_output=True, text=True)
    assert proc.returncode == 0 and "(D + 2*l)*x" in proc.stdout
