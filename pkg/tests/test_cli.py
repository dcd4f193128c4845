import json
import subprocess
import sys

import pytest

from qtrinomial.cli import main
from qtrinomial.catalog import builtin_document, dump_pair_document, load_pair_document


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, text", [
    (["tri", "--def", "eq1", "--L", "2", "--B", "0", "--A", "0"], "1 + q + q^2"),
    (["tri", "--def", "eq1", "--L", "2", "--B", "0", "--A", "0", "--units", "t"], "1 + t^2 + t^4"),
    (["tri", "--def", "T", "--n", "0", "--L", "2", "--A", "1", "--units", "q"], "q^(1/2) + q^(3/2)"),
    (["tri", "--def", "Q", "--n", "0", "--L", "1", "--A", "2"], "0"),
    (["tri", "--def", "Q", "--n", "0", "--L", "1", "--A", "1", "--order", "4", "--units", "t"],
     "1 + t^2 + t^4 + O(t^5)"),
])
def test_tri_golden(capsys, argv, text):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == text


def test_tri_both_routes(capsys):
    code, out, _ = run(capsys, "tri", "--def", "both", "--n", "1", "--L", "4", "--A", "2",
                       "--order", "20", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["agree"] and doc["mismatch_exp_t"] is None


def test_tri_needs_B(capsys):
    code, _, err = run(capsys, "tri", "--def", "eq1", "--L", "2", "--A", "0")
    assert code == 2 and "--B" in err


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "cor1", "--pair", "builtin:A1-trinomial:0", "--order", "100")
    assert code == 0 and out.splitlines()[-1] == "verdict: pass"


def test_verify_fail_names_index(capsys):
    code, out, _ = run(capsys, "verify", "tripair", "--pair", "builtin:A1-trinomial-as-printed:0",
                       "--Lmax", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["verdict"] == "fail"
    first = next(c for c in doc["checks"] if c["status"] == "fail")
    assert first["index"] == 1 and set(first["mismatch"]) == {"exp_t", "lhs", "rhs"}


def test_verify_insufficient_order(capsys):
    code, out, _ = run(capsys, "verify", "cor1", "--pair", "builtin:A1-trinomial:0",
                       "--order", "100", "--L-cap", "20")
    assert code == 3 and "verdict: insufficient-order" in out


def test_verify_usage_errors(capsys):
    assert run(capsys, "verify", "pair", "--pair", "builtin:nope")[0] == 2
    assert run(capsys, "verify", "cor1", "--pair", "builtin:A1-trinomial:1")[0] == 2
    assert run(capsys, "verify", "lemma2", "--pair", "builtin:A1")[0] == 2
    assert run(capsys, "verify", "pair", "--pair", "builtin:A1-trinomial:0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "sideways", "--pair", "builtin:A1"])
    assert exc.value.code == 2


def test_verify_bad_document(capsys, tmp_path):
    path = tmp_path / "bad.json"
    doc = json.loads(dump_pair_document(builtin_document("A1")))
    doc["gamma"] = 0
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "verify", "pair", "--pair", str(path))
    assert code == 2 and "gamma" in err


def test_binomial_pair_with_n(capsys):
    code, out, _ = run(capsys, "verify", "tripair", "--pair", "builtin:A1", "--n", "1",
                       "--Lmax", "6", "--order", "60", "--format", "json")
    assert code == 0 and json.loads(out)["config"]["n"] == 1


def test_lemma2_term_level(capsys):
    code, out, _ = run(capsys, "verify", "lemma2", "--pair", "builtin:A1", "--n", "0",
                       "--Lmax", "4", "--order", "40", "--term-level", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["config"]["term_level"] is True
    assert [c["index"] for c in doc["checks"]] == [0, 1, 2, 2, 3, 3, 4, 4, 4]


def test_ab_lemma_conventions(capsys):
    args = ["verify", "ab-lemma", "--pair", "builtin:A1-trinomial:0", "--M", "5", "--order", "60"]
    assert run(capsys, *args, "--lhs-limit", "M")[0] == 0
    assert run(capsys, *args, "--lhs-limit", "order-bounded")[0] == 1


def test_text_and_json_agree(capsys):
    args = ["verify", "tripair", "--pair", "builtin:A1-trinomial-as-printed:1", "--Lmax", "3",
            "--order", "40"]
    _, text, _ = run(capsys, *args)
    _, js, _ = run(capsys, *args, "--format", "json")
    doc = json.loads(js)
    lines = text.splitlines()
    assert lines[-1] == f"verdict: {doc['verdict']}"
    for line, check in zip(lines[1:-1], doc["checks"]):
        assert line.strip().startswith(f"index {check['index']}: {check['status']}")
        if "mismatch" in check:
            m = check["mismatch"]
            assert f"at t^{m['exp_t']} (lhs {m['lhs']}, rhs {m['rhs']})" in line


def test_json_is_byte_stable(capsys):
    args = ["verify", "cor2", "--pair", "builtin:A1-trinomial:1", "--order", "60", "--format", "json"]
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second and json.loads(first)["timing_ms"] is None


def test_timing_flag(capsys):
    _, out, _ = run(capsys, "verify", "pair", "--pair", "builtin:A1", "--Lmax", "2",
                    "--order", "20", "--format", "json", "--timing")
    assert isinstance(json.loads(out)["timing_ms"], float)


def test_catalog_list_and_show(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "A1" in out.split()
    code, out, _ = run(capsys, "catalog", "show", "A1", "--beta", "3", "--order", "8")
    assert code == 0 and "beta_3 = 1/(q)_6 = 1 + q + 2*q^2 + 3*q^3 + 5*q^4 + O(q^(9/2)) (order 8)" in out


def test_catalog_export_round_trip(capsys):
    code, out, _ = run(capsys, "catalog", "export", "A1")
    assert code == 0 and load_pair_document(out) == builtin_document("A1")


def test_catalog_unknown(capsys):
    assert run(capsys, "catalog", "show", "A7")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qtrinomial", "tri", "--def", "eq1", "--L", "1",
                           "--B", "0", "--A", "1", "--units", "q"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1"
