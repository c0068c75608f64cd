"""End-to-end CLI behavior through the in-process entry point."""

import json

import numpy as np
import pytest

from ginv import idempotent_from_matrix, perturb_idempotent
from ginv.cli import cli
from ginv.serialize import (
    config_to_json,
    dump_file,
    dumps,
    matrix_from_json,
    matrix_to_json,
)

E1_A = np.diag([1.0, 2.0, 0.0]).astype(complex)
E1_P = np.diag([1.0, 1.0, 0.0]).astype(complex)
E1_Q = np.diag([0.0, 0.0, 1.0]).astype(complex)


def write(tmp_path, name, obj):
    path = tmp_path / name
    dump_file(obj, str(path))
    return str(path)


def instance_file(tmp_path, a=E1_A, p=E1_P, q=E1_Q, name="instance.json"):
    return write(
        tmp_path,
        name,
        {"a": matrix_to_json(a), "p": matrix_to_json(p), "q": matrix_to_json(q)},
    )


def scenario_file(tmp_path, delta=None, p_prime=None, name="scenario.json"):
    obj = {
        "a": matrix_to_json(E1_A),
        "p": matrix_to_json(E1_P),
        "q": matrix_to_json(E1_Q),
    }
    if delta is not None:
        obj["delta_a"] = matrix_to_json(delta)
    if p_prime is not None:
        obj["p_prime"] = matrix_to_json(p_prime)
    return write(tmp_path, name, obj)


def config_file(tmp_path, **kw):
    from ginv import EnsembleConfig

    base = dict(n_range=(2, 4), rank_range=(1, 3), count=3, seed=0, theorems=("thm3.4",))
    base.update(kw)
    return write(tmp_path, "config.json", config_to_json(EnsembleConfig(**base)))


def run(capsys, argv):
    code = cli(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_compute_diagonal_instance(tmp_path, capsys):
    path = instance_file(tmp_path)
    code, out, _ = run(capsys, ["compute", "--in", path])
    assert code == 0
    result = json.loads(out)
    b = matrix_from_json(result["b"])
    assert np.allclose(b, np.diag([1.0, 0.5, 0.0]), atol=1e-12)
    assert result["flags"]["strict_12"] is True


def test_compute_writes_out_file(tmp_path, capsys):
    path = instance_file(tmp_path)
    out_path = tmp_path / "result.json"
    code, out, _ = run(capsys, ["compute", "--in", path, "--out", str(out_path)])
    assert code == 0
    assert out == ""
    result = json.loads(out_path.read_text())
    assert result["flags"]["outer_pql"] is True


def test_compute_exact(tmp_path, capsys):
    obj = {
        "a": {"rows": 3, "cols": 3, "exact": True,
              "data": ["1", "0", "0", "0", "2", "0", "0", "0", "0"]},
        "p": {"rows": 3, "cols": 3, "exact": True,
              "data": ["1", "0", "0", "0", "1", "0", "0", "0", "0"]},
        "q": {"rows": 3, "cols": 3, "exact": True,
              "data": ["0", "0", "0", "0", "0", "0", "0", "0", "1"]},
    }
    path = write(tmp_path, "exact.json", obj)
    code, out, _ = run(capsys, ["compute", "--in", path, "--exact"])
    assert code == 0
    result = json.loads(out)
    assert result["exact"] is True
    assert result["b"]["data"][4] == ["1/2", "0"]
    assert result["checks"]["bab_equals_b"] is True
    assert result["checks"]["aba_equals_a"] is True
    b_float = matrix_from_json(result["b_float"])
    assert np.allclose(b_float, np.diag([1.0, 0.5, 0.0]), atol=1e-15)


def test_compute_nonexistent_instance(tmp_path, capsys):
    # p projects onto the kernel of a, so no inverse with that column space
    p = np.diag([0.0, 0.0, 1.0]).astype(complex)
    q = np.diag([1.0, 1.0, 0.0]).astype(complex)
    path = instance_file(tmp_path, p=p, q=q)
    code, out, err = run(capsys, ["compute", "--in", path])
    assert code == 1
    assert "does not exist" in err


def test_exists_reports_either_way(tmp_path, capsys):
    path = instance_file(tmp_path)
    code, out, _ = run(capsys, ["exists", "--in", path])
    assert code == 0
    assert json.loads(out)["exists"] is True

    bad = instance_file(
        tmp_path,
        p=np.diag([0.0, 0.0, 1.0]).astype(complex),
        q=np.diag([1.0, 1.0, 0.0]).astype(complex),
        name="bad.json",
    )
    code, out, _ = run(capsys, ["exists", "--in", bad])
    assert code == 0
    report = json.loads(out)
    assert report["exists"] is False
    assert report["trivial_kernel_intersection"] is False


def test_gap_command(tmp_path, capsys):
    m = write(tmp_path, "m.json", matrix_to_json(np.array([[1.0], [0.0]])))
    n = write(tmp_path, "n.json", matrix_to_json(np.array([[0.0], [1.0]])))
    code, out, _ = run(capsys, ["gap", "--m", m, "--n", n])
    assert code == 0
    assert json.loads(out)["gap"] == 1.0
    code, out, _ = run(capsys, ["gap", "--m", m, "--n", m])
    assert code == 0
    assert json.loads(out)["gap"] == 0.0


def test_gap_ambient_mismatch(tmp_path, capsys):
    m = write(tmp_path, "m.json", matrix_to_json(np.eye(2)))
    n = write(tmp_path, "n.json", matrix_to_json(np.eye(3)))
    code, _, err = run(capsys, ["gap", "--m", m, "--n", n])
    assert code == 2
    assert "input error" in err


def test_perturb_stable_shift(tmp_path, capsys):
    delta = np.diag([0.1, 0.0, 0.0]).astype(complex)
    path = scenario_file(tmp_path, delta=delta)
    code, out, _ = run(capsys, ["perturb", "--in", path])
    assert code == 0
    result = json.loads(out)
    upd = matrix_from_json(result["update"])
    assert np.allclose(upd, np.diag([1.0 / 1.1, 0.5, 0.0]), atol=1e-12)
    assert set(result["checks"]) == {"thm2.4", "lemma2.6", "thm2.7", "cor2.8"}
    for body in result["checks"].values():
        assert body["consistent"] is True


def test_perturb_singular_shift(tmp_path, capsys):
    delta = np.zeros((3, 3), dtype=complex)
    delta[0, 0] = -1.0
    path = scenario_file(tmp_path, delta=delta)
    code, out, _ = run(capsys, ["perturb", "--in", path])
    assert code == 0  # the checks that apply are consistent; none failed
    result = json.loads(out)
    assert result["update"] is None
    assert "singular" in result["update_error"]
    assert result["checks"]["thm2.4"]["consistent"] is True
    assert "error" in result["checks"]["thm2.7"]


def test_verify_bound_on_scenario(tmp_path, capsys):
    p_prime = perturb_idempotent(idempotent_from_matrix(E1_P), 0.05, seed=1)
    path = scenario_file(tmp_path, p_prime=p_prime.m)
    code, out, _ = run(capsys, ["verify", "thm3.4", "--in", path])
    assert code == 0
    result = json.loads(out)
    assert result["kind"] == "bound"
    assert result["report"]["holds"] is True
    # --theorem spelling works too
    code, out, _ = run(capsys, ["verify", "--theorem", "thm3.4", "--in", path])
    assert code == 0


def test_verify_equivalence_on_scenario(tmp_path, capsys):
    delta = np.diag([0.1, 0.0, 0.0]).astype(complex)
    path = scenario_file(tmp_path, delta=delta)
    code, out, _ = run(capsys, ["verify", "thm2.4", "--in", path])
    assert code == 0
    result = json.loads(out)
    assert result["kind"] == "equiv"
    assert result["report"]["consistent"] is True


def test_verify_failing_bound_exits_one(tmp_path, capsys):
    p_prime = perturb_idempotent(idempotent_from_matrix(E1_P), 0.05, seed=1)
    path = scenario_file(tmp_path, p_prime=p_prime.m)
    code, out, _ = run(capsys, ["verify", "selftest-bad-bound", "--in", path])
    assert code == 1
    assert json.loads(out)["report"]["holds"] is False


def test_verify_config_with_csv(tmp_path, capsys):
    config = config_file(tmp_path)
    csv_path = tmp_path / "rows.csv"
    out_path = tmp_path / "campaign.json"
    code, _, _ = run(
        capsys,
        ["verify", "thm3.4", "--config", config, "--csv", str(csv_path), "--out", str(out_path)],
    )
    assert code == 0
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "theorem,n,kappa,hyp,lhs,rhs,margin"
    assert len(lines) == 4
    assert all(line.startswith("thm3.4,") for line in lines[1:])
    campaign = json.loads(out_path.read_text())
    assert campaign["ok"] is True
    assert campaign["stats"]["thm3.4"]["holds"] == 3


def test_verify_seed_override(tmp_path, capsys):
    config = config_file(tmp_path)
    code, out, _ = run(capsys, ["verify", "thm3.4", "--config", config, "--seed", "42"])
    assert code == 0
    assert json.loads(out)["seed"] == 42


def test_verify_argument_errors(tmp_path, capsys):
    config = config_file(tmp_path)
    code, _, err = run(capsys, ["verify", "thm3.4"])
    assert code == 2 and "input error" in err
    code, _, err = run(capsys, ["verify", "--config", config])
    assert code == 2
    code, _, err = run(capsys, ["verify", "thm0.0", "--config", config])
    assert code == 2 and "unknown check id" in err


def test_ensemble_runs_and_is_deterministic(tmp_path, capsys):
    config = config_file(tmp_path, count=2, theorems=("thm2.4", "thm3.4"))
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert cli(["ensemble", "--config", config, "--out", str(out1)]) == 0
    assert cli(["ensemble", "--config", config, "--out", str(out2)]) == 0
    capsys.readouterr()
    d1 = json.loads(out1.read_text())
    d2 = json.loads(out2.read_text())
    d1.pop("wall_time")
    d2.pop("wall_time")
    assert d1 == d2


def test_ensemble_selftest_fails(tmp_path, capsys):
    config = config_file(tmp_path, theorems=("selftest-bad-bound",))
    code, out, _ = run(capsys, ["ensemble", "--config", config])
    assert code == 1
    campaign = json.loads(out)
    assert campaign["ok"] is False
    assert len(campaign["stats"]["selftest-bad-bound"]["failures"]) >= 1


def test_env_tolerance_must_be_numeric(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GINV_DEFAULT_TOL", "not-a-number")
    path = instance_file(tmp_path)
    code, _, err = run(capsys, ["compute", "--in", path])
    assert code == 2
    assert "GINV_DEFAULT_TOL" in err


def test_env_tolerance_applies(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("GINV_DEFAULT_TOL", "1e-6")
    path = instance_file(tmp_path)
    code, out, _ = run(capsys, ["compute", "--in", path])
    assert code == 0
    assert json.loads(out)["flags"]["outer_pql"] is True


def test_missing_file_is_an_input_error(tmp_path, capsys):
    code, _, err = run(capsys, ["compute", "--in", str(tmp_path / "nope.json")])
    assert code == 2
    assert "input error" in err


def test_argparse_errors_surface_as_exit_codes(capsys):
    assert cli([]) == 2
    assert cli(["compute"]) == 2
    capsys.readouterr()
