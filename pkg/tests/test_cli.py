"""End-to-end CLI tests, run in-process via ``main(argv)``.

Artifacts land on stdout (or ``--out``); everything human-readable goes to
stderr, so stdout capture doubles as a determinism check.
"""

import json

import numpy as np
import pytest

from schurdil.cli import main
from schurdil.serialize import dumps, mat_to_json


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stdout_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def stderr_error(capsys, *argv):
    code, out, err = run(capsys, *argv)
    obj = json.loads(err.splitlines()[-1])
    assert obj["schema"] == "schurdil.error/1"
    assert obj["exit_code"] == code
    return code, obj


def test_gen_omega_exact_table(capsys):
    obj = stdout_json(capsys, "gen", "omega", "--omega", "i")
    assert obj["n"] == 2
    assert obj["m"]["re"] == [1.0, 0.0, 0.0, 1.0]
    assert obj["m"]["im"] == [0.0, 1.0, -1.0, 0.0]


def test_gen_rejects_double_phase_spec(capsys):
    code, obj = stderr_error(capsys, "gen", "omega", "--omega", "i", "--angle", "90")
    assert code == 1
    assert "exactly one" in obj["message"]


def test_rep_pipeline(tmp_path, capsys):
    rep_file = tmp_path / "rep.json"
    code, gen_out, _ = run(
        capsys, "gen", "planted", "--n", "3", "--spec", "2", "--seed", "5",
        "--rep-out", str(rep_file),
    )
    assert code == 0

    obj = stdout_json(capsys, "rep", "validate", str(rep_file))
    assert obj["ok"] is True
    assert max(obj["unitarity_residuals"]) < 1e-10

    # rebuilding the table from the representation file reproduces gen's bytes
    _, build_out, _ = run(capsys, "rep", "build-multiplier", str(rep_file))
    assert build_out == gen_out

    gauged = stdout_json(capsys, "rep", "gauge", str(rep_file))
    first = gauged["d"][0]["blocks"][0]
    block = np.array(first["re"]).reshape(2, 2) + 1j * np.array(first["im"]).reshape(2, 2)
    assert np.allclose(block, np.eye(2), atol=1e-12)


def test_schur_apply_norm_cp(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    assert run(capsys, "gen", "omega", "--omega", "i", "--out", str(phi_file))[0] == 0

    ones = tmp_path / "ones.json"
    ones.write_text(dumps(mat_to_json(np.ones((2, 2), dtype=complex))))
    applied = stdout_json(capsys, "schur", "apply", str(phi_file), str(ones))
    # entrywise product with the all-ones matrix returns the table itself
    assert applied["re"] == [1.0, 0.0, 0.0, 1.0]
    assert applied["im"] == [0.0, 1.0, -1.0, 0.0]

    nb = stdout_json(capsys, "schur", "norm", str(phi_file))
    assert 1 - 1e-6 <= nb["lower"] <= nb["upper"] <= 1 + 1e-6

    cp = stdout_json(capsys, "schur", "cp-check", str(phi_file))
    assert cp["ok"] is True
    assert cp["min_eigenvalue"] >= -1e-10


def test_schur_apply_requires_matrix(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "omega", "--omega", "i", "--out", str(phi_file))
    code, obj = stderr_error(capsys, "schur", "apply", str(phi_file))
    assert code == 1
    assert "matrix" in obj["message"]


def test_dilate_build_verify_pair(tmp_path, capsys):
    rep_file = tmp_path / "rep.json"
    run(capsys, "gen", "pauli", "--rep-out", str(rep_file))
    dil_file = tmp_path / "dil.json"
    code, _, err = run(
        capsys, "dilate", "build", str(rep_file), "--window", "3", "--out", str(dil_file)
    )
    assert code == 0
    assert "ambient dimension" in err

    verify = stdout_json(capsys, "dilate", "verify", str(dil_file), "--kmax", "3")
    assert verify["ok"] is True
    assert [e["k"] for e in verify["entries"]] == [0, 1, 2, 3]
    assert all(e["pass"] for e in verify["entries"])

    code, obj = stderr_error(capsys, "dilate", "verify", str(dil_file), "--kmax", "4")
    assert code == 1
    assert "window exceeded" in obj["message"]

    pair = stdout_json(capsys, "dilate", "pair", str(dil_file), "--k", "2", "--samples", "4")
    assert pair["max_residual"] < 1e-10


def test_dilate_verify_report_dir(tmp_path, capsys):
    rep_file = tmp_path / "rep.json"
    run(capsys, "gen", "omega", "--omega", "i", "--rep-out", str(rep_file))
    dil_file = tmp_path / "dil.json"
    run(capsys, "dilate", "build", str(rep_file), "--window", "2", "--out", str(dil_file))
    outdir = tmp_path / "figs"
    code, _, _ = run(
        capsys, "dilate", "verify", str(dil_file), "--report-dir", str(outdir)
    )
    assert code == 0
    csv_path = outdir / "dilation_residuals.csv"
    assert csv_path.exists()
    assert (outdir / "dilation_residuals.png").exists()
    assert "k" in csv_path.read_text().splitlines()[0]


def test_search_scalar_target(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "omega", "--angle", "45", "--out", str(phi_file))
    obj = stdout_json(
        capsys, "search", str(phi_file), "--spec", "1", "--restarts", "4", "--seed", "0"
    )
    assert obj["converged"] is True
    assert obj["residual"] <= 1e-8
    assert obj["attempts"][0]["blocks"] == [1]


def test_search_ladder_escalates(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "identity-fourier", "--n", "3", "--out", str(phi_file))
    obj = stdout_json(
        capsys, "search", str(phi_file), "--ladder", "1;1,1,1",
        "--restarts", "4", "--seed", "1",
    )
    # scalars cannot zero the off-diagonal entries; the second rung can
    assert len(obj["attempts"]) == 2
    assert obj["attempts"][0]["converged"] is False
    assert obj["attempts"][1]["converged"] is True


def test_search_nonconvergence_exit_code(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "identity-fourier", "--n", "3", "--out", str(phi_file))
    code, obj = stderr_error(
        capsys, "search", str(phi_file), "--spec", "1", "--restarts", "2", "--iters", "40"
    )
    assert code == 2
    assert obj["kind"] == "convergence"
    assert "does not certify" in obj["message"]


def test_brute_hits_grid_point(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "omega", "--angle", "30", "--out", str(phi_file))
    obj = stdout_json(capsys, "brute", str(phi_file), "--spec", "1", "--grid", "360")
    assert obj["residual"] < 1e-12


def test_roundtrip_deterministic_bytes(tmp_path, capsys):
    argv = [
        "roundtrip", "--n", "2", "--spec", "2", "--window", "2",
        "--seed", "7", "--restarts", "4",
    ]
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert run(capsys, *argv, "--out", str(first))[0] == 0
    assert run(capsys, *argv, "--out", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()
    obj = json.loads(first.read_text())
    assert obj["ok"] is True
    assert obj["dilation"]["boundary_residual"] >= 0.0


def test_missing_file_is_io_error(tmp_path, capsys):
    code, obj = stderr_error(capsys, "dilate", "build", str(tmp_path / "absent.json"))
    assert code == 3
    assert obj["kind"] == "io"


def test_malformed_json_is_validation_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, obj = stderr_error(capsys, "rep", "validate", str(bad))
    assert code == 1
    assert "not valid JSON" in obj["message"]


def test_usage_error_maps_to_validation(capsys):
    code, obj = stderr_error(capsys, "gen", "no-such-instance")
    assert code == 1
    assert "usage error" in obj["message"]


def test_bad_spec_string(tmp_path, capsys):
    phi_file = tmp_path / "phi.json"
    run(capsys, "gen", "omega", "--omega", "i", "--out", str(phi_file))
    code, obj = stderr_error(capsys, "search", str(phi_file), "--spec", "2,x")
    assert code == 1
    assert "bad algebra spec" in obj["message"]
