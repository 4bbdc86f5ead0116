"""End-to-end tests of the batch CLI: exit codes, artifacts, determinism."""

import json

import pytest

from padiczeta.cli import EXIT_BUDGET, EXIT_OK, EXIT_SCHEMA, EXIT_VERIFY, main

LINE_X2_SPEC = {
    "schema": 1,
    "p": 3,
    "n": 2,
    "constraints": ["x1"],
    "target": "x2^2",
    "support": {"type": "unit_polydisc"},
    "max_level": 5,
    "character_conductor_cap": 2,
    "resolution_data": [[2, 1]],
}


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(LINE_X2_SPEC))
    return path


def run(command, spec, out, *extra):
    return main([command, "--spec", str(spec), "--out", str(out), *extra])


def test_count_csv(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("count", spec_file, out, "--max-level", "4") == EXIT_OK
    lines = (out / "counts.csv").read_text().splitlines()
    assert lines[0] == "m,N_m,scaled_num,scaled_den"
    assert [line.split(",")[1] for line in lines[1:]] == ["1", "1", "3", "3", "9"]


def test_poincare_identity(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("poincare", spec_file, out, "--max-level", "8") == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["identity_checked"] and summary["identity_passed"]
    fn = json.loads((out / "poincare.json").read_text())
    assert fn["numerator"] == [[1, 1], [1, 3]]
    assert fn["denominator"] == [[1, 1], [0, 1], [-1, 3]]


def test_zeta_poles_and_candidate_match(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("zeta", spec_file, out) == EXIT_OK
    poles = json.loads((out / "poles.json").read_text())
    assert poles["rho_exact"] == [1, 2]
    assert poles["m_rho"] == 1
    assert poles["candidate_match"] == [[2, 1, 1]]
    table = (out / "zeta_trivial.csv").read_text().splitlines()
    assert table[0] == "m,re,im,exact_num,exact_den,stabilized"
    assert table[1].split(",")[3:5] == ["2", "3"]  # c_0 = 2/3 exactly


def test_sps_verify_passes(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("sps-verify", spec_file, out, "--max-level", "4") == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] is True
    header = (out / "expsum.csv").read_text().splitlines()[0]
    assert header == "m,u,re_direct,im_direct,re_form1,im_form1,abs,normalized"


def test_smooth_bad_reduction(tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(
        json.dumps(
            {
                "schema": 1,
                "p": 3,
                "n": 2,
                "constraints": ["3*x1 - 9*x2"],
                "target": "x2^2",
                "max_level": 4,
            }
        )
    )
    out = tmp_path / "out"
    assert run("smooth", spec, out) == EXIT_OK
    payload = json.loads((out / "certificates.json").read_text())
    assert payload["level"] == 2
    assert len(payload["charts"]) == 9
    summary = json.loads((out / "summary.json").read_text())
    assert summary["identity_ok"] and summary["image_counts_ok"]


def test_delta_check(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("delta-check", spec_file, out, "--max-level", "9", "--r-max", "4") == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["passed"] and summary["r0"] <= 4


def test_decay_report(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("decay", spec_file, out, "--max-level", "6") == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["expsum_verdict"] == "Bounded"
    rows = (out / "decay.csv").read_text().splitlines()[1:]
    assert all(abs(float(r.split(",")[2]) - 1.0) < 1e-9 for r in rows)


def test_probe(spec_file, tmp_path):
    out = tmp_path / "out"
    assert run("probe", spec_file, out) == EXIT_OK
    payload = json.loads((out / "probe.json").read_text())
    assert payload["clean"] is True


def test_malformed_polynomial_exit_code(tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"schema": 1, "p": 3, "n": 2, "constraints": ["x1"], "target": "x1^"}))
    assert run("count", spec, tmp_path / "out") == EXIT_SCHEMA


def test_unknown_field_rejected(tmp_path):
    spec = tmp_path / "bad.json"
    payload = dict(LINE_X2_SPEC)
    payload["typo_field"] = True
    spec.write_text(json.dumps(payload))
    assert run("count", spec, tmp_path / "out") == EXIT_SCHEMA


def test_missing_schema_version(tmp_path):
    spec = tmp_path / "bad.json"
    payload = dict(LINE_X2_SPEC)
    del payload["schema"]
    spec.write_text(json.dumps(payload))
    assert run("count", spec, tmp_path / "out") == EXIT_SCHEMA


@pytest.mark.parametrize(
    "mutation",
    [
        {"support": "everything"},
        {"support": {"type": "disc"}},
        {"support": {"type": "cosets", "level": 1}},
        {"max_level": "five"},
        {"resolution_data": [["a", 1]]},
    ],
)
def test_malformed_fields_exit_schema(tmp_path, mutation):
    payload = dict(LINE_X2_SPEC)
    payload.update(mutation)
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps(payload))
    assert run("count", spec, tmp_path / "out") == EXIT_SCHEMA


def test_budget_exit_code(spec_file, tmp_path):
    assert run("count", spec_file, tmp_path / "out", "--max-level", "9", "--budget", "50") == EXIT_BUDGET


def test_wrong_resolution_data_exit_code(tmp_path):
    spec = tmp_path / "wrong.json"
    payload = dict(LINE_X2_SPEC)
    payload["resolution_data"] = [[3, 1]]
    spec.write_text(json.dumps(payload))
    assert run("zeta", spec, tmp_path / "out") == EXIT_VERIFY


def test_rerun_is_byte_identical(spec_file, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run("zeta", spec_file, out1) == EXIT_OK
    assert run("zeta", spec_file, out2) == EXIT_OK
    for name in ("zeta_trivial.csv", "zeta_trivial.json", "poles.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    assert run("expsum", spec_file, out1, "--max-level", "4") == EXIT_OK
    assert run("expsum", spec_file, out2, "--max-level", "4") == EXIT_OK
    assert (out1 / "expsum.csv").read_bytes() == (out2 / "expsum.csv").read_bytes()


def test_coset_support_spec(tmp_path):
    spec = tmp_path / "coset.json"
    payload = dict(LINE_X2_SPEC)
    payload["support"] = {"type": "cosets", "level": 1, "centers": [[0, 1]]}
    spec.write_text(json.dumps(payload))
    out = tmp_path / "out"
    assert run("sps-verify", spec, out, "--max-level", "3") == EXIT_OK
