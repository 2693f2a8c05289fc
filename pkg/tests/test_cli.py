import io
import json

import pytest

from stablerkhs import cli, sign_matrix, verification


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_verify_passes():
    code, out, _ = run(["verify"])
    assert code == 0
    assert "Lemma 3 (p=1,2): PASS" in out
    assert out.count("PASS") == len(verification.CHECKS)


def test_verify_reports_corrupted_closed_form(monkeypatch):
    monkeypatch.setattr(sign_matrix, "opnorm_inf1_closed", lambda spec: 13)
    code, out, err = run(["verify"])
    assert code == 1
    assert "Lemma 3 (p=1,2): FAIL" in out
    assert "Lemma 3" in err


def test_verify_fail_fast(monkeypatch):
    monkeypatch.setattr(sign_matrix, "opnorm_inf1_closed", lambda spec: 13)
    code, out, _ = run(["verify", "--fail-fast"])
    assert code == 1
    assert out.strip().splitlines()[-1].startswith("Lemma 1")


def test_fig1_csv():
    code, out, _ = run(["fig1", "--p-max", "3"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,n,fig1_bound,gram_ratio_exact"
    assert lines[1] == "1,8,0.886227,0.666667"
    assert lines[2] == "2,32,0.626657,0.533333"
    bounds = [float(line.split(",")[2]) for line in lines[1:]]
    assert bounds == sorted(bounds, reverse=True)


def test_fig1_exact_and_json():
    code, out, _ = run(["fig1", "--p-max", "2", "--exact", "--format", "json-lines"])
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[1]["gram_ratio_exact"] == "8/15"


def test_output_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["lambda", "--k", "4", "--budget", "200", "--seed", "3", "--output", str(a)])
    run(["lambda", "--k", "4", "--budget", "200", "--seed", "3", "--output", str(b)])
    assert a.read_bytes() == b.read_bytes() and a.read_bytes()


def test_norms_and_gram_tables():
    code, out, _ = run(["norms", "--p-max", "2", "--exact"])
    assert code == 0
    assert out.splitlines()[1].startswith("1,3,8,24,12,")
    code, out, _ = run(["gram", "--p-max", "2"])
    assert out.splitlines()[2].startswith("2,32,1920,1024,0.533333")


def test_kernel_probe_counterexample_s():
    code, out, _ = run(["kernel-probe", "counterexample-s", "--blocks", "10", "--exact", "--format", "json-lines"])
    d = json.loads(out)
    assert code == 0
    assert d["l1_partial"][-1] == [10, "7381/2520"]
    assert d["verdict"] == "bounded_nonsummable_structural"


def test_kernel_probe_verdicts():
    _, out, _ = run(["kernel-probe", "stable-spline", "--alpha", "0.9", "--T", "800"])
    assert out.strip().endswith("verdict,,summable_certificate")
    _, out, _ = run(["kernel-probe", "constant", "--c", "1", "--T", "100"])
    assert out.strip().endswith("verdict,,divergent_witness")


@pytest.mark.parametrize(
    "argv",
    [
        ["kernel-probe", "nope"],
        ["fig1", "--p-max", "0"],
        ["kernel-probe", "stable-spline", "--alpha", "1.5"],
        ["lambda", "--k", "20"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    code, _, err = run(argv)
    assert code == 2
    assert "usage error" in err


def test_unknown_kernel_lists_available():
    _, _, err = run(["kernel-probe", "nope"])
    assert "counterexample-s" in err and "stable-spline" in err


def test_unwritable_output(tmp_path):
    code, _, err = run(["fig1", "--output", str(tmp_path / "missing" / "x.csv")])
    assert code == 2 and "cannot write" in err
