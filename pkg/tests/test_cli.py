import json

import numpy as np
import pytest

from darbouxcov.cli import run
from darbouxcov.zs import random_hermitian, write_matrix


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out


def test_verify_covariance_exit_zero(capsys):
    code, out = _run(capsys, "verify-covariance")
    doc = json.loads(out.out)
    assert code == 0 and doc["passed"]
    assert doc["manifest"]["tolerance"] == 0.0
    assert doc["manifest"]["params"]["b3"] == "(b3)"


def test_printed_normalization_fails(capsys):
    code, _ = _run(capsys, "verify-covariance", "--variant", "printed")
    assert code == 2  # no variants for this verb
    code, _ = _run(capsys, "verify-covariance", "--config", "/nonexistent.yaml")
    assert code == 2


def test_g_form_printed_exit_one(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("g_form: printed\n")
    code, out = _run(capsys, "verify-covariance", "--config", str(cfg))
    assert code == 1 and not json.loads(out.out)["passed"]


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("b3: 1\nbogus: 2\n")
    code, out = _run(capsys, "verify-covariance", "--config", str(cfg))
    assert code == 2 and "bogus" in out.err


def test_nc_check(capsys):
    assert _run(capsys, "nc-check", "--n", "7")[0] == 0
    assert _run(capsys, "nc-check", "--n", "3", "--y-power", "3")[0] == 1


def test_nc_combination(tmp_path, capsys):
    f = tmp_path / "comb.yaml"
    f.write_text("relations: []\n")
    assert _run(capsys, "nc-check", "--combination", str(f))[0] == 1
    f.write_text("relations: ['beta^2 -> alpha^3']\n")
    assert _run(capsys, "nc-check", "--combination", str(f))[0] == 0


def test_euler_and_projector(tmp_path, capsys):
    write_matrix(tmp_path / "H.txt", np.diag([1.0, 2.0]))
    write_matrix(tmp_path / "u0.txt", [[0.5, 1], [1, 0]])
    code, out = _run(capsys, "euler-top", "--H", str(tmp_path / "H.txt"), "--u0", str(tmp_path / "u0.txt"))
    assert code == 0
    assert json.loads(out.out)["report"]["steps"] == 1000
    rng = np.random.default_rng(3)
    write_matrix(tmp_path / "rho.txt", random_hermitian(4, rng))
    write_matrix(tmp_path / "H4.txt", random_hermitian(4, rng))
    code, _ = _run(
        capsys, "projector-dt", "--rho", str(tmp_path / "rho.txt"), "--H", str(tmp_path / "H4.txt"),
        "--nu", "0.7", "--mu=-0.5+0.1j", "--lambda", "1.3",
    )
    assert code == 0
    code, _ = _run(capsys, "projector-dt", "--rho", str(tmp_path / "rho.txt"), "--H", str(tmp_path / "H.txt"),
                   "--nu", "1", "--mu", "2", "--lambda", "3")
    assert code == 2


def test_frechet_verb(tmp_path, capsys):
    rng = np.random.default_rng(4)
    for name in ("u0", "h", "H"):
        write_matrix(tmp_path / f"{name}.txt", random_hermitian(3, rng))
    args = ["--u0", str(tmp_path / "u0.txt"), "--h", str(tmp_path / "h.txt"), "--H", str(tmp_path / "H.txt")]
    assert _run(capsys, "frechet", *args)[0] == 0
    assert _run(capsys, "frechet", "--potential", "u2", *args)[0] == 0


def test_dress_writes_csv_and_json(tmp_path, capsys):
    cfg = tmp_path / "d.yaml"
    cfg.write_text("grid: {nx: 120, nt: 120}\n")
    out = tmp_path / "w.csv"
    code, _ = _run(capsys, "dress", "--config", str(cfg), "--out", str(out), "--tolerance", "1e-4")
    assert code == 0
    head = out.read_text().splitlines()[0]
    assert head == "x,t,w,residual"
    doc = json.loads(out.with_suffix(".json").read_text())
    assert doc["report"]["max_residual"] < 1e-4


def test_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["boussinesq", "--out", str(a)])
    run(["boussinesq", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("verb", ["compatibility"])
def test_compatibility_reports_mismatch(verb, capsys):
    code, out = _run(capsys, verb)
    assert code == 1
    assert "3" in json.dumps(json.loads(out.out)["report"])
