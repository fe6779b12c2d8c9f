import json

import pytest

from loglab.cli import RunConfig, main
from loglab.exceptions import ConfigError


def _run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_solve_log(tmp_path):
    assert _run(tmp_path, "solve-log", "--mu", "1.0", "--n", "128") == 0
    doc = json.loads((tmp_path / "solve_log.json").read_text())
    assert doc["sign_constant"] is True
    assert doc["converged"] is True
    assert (tmp_path / "solve_log_solution.csv").exists()


def test_solve_frac(tmp_path):
    assert _run(tmp_path, "solve-frac", "--s", "0.1", "--lambda", "0.25", "--n", "128") == 0
    doc = json.loads((tmp_path / "solve_frac.json").read_text())
    assert doc["kind"] == "fraclap" and doc["s"] == 0.1


def test_nonconvergence_exit(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[solver]\nmax_iter = 1\n")
    assert _run(tmp_path, "solve-log", "--mu", "1.0", "--n", "64", "--config", str(cfg)) == 3


def test_eigen(tmp_path):
    assert _run(tmp_path, "eigen", "--which", "laplace", "--n", "127") == 0
    assert _run(tmp_path, "eigen", "--n", "128") == 0
    doc = json.loads((tmp_path / "eigen_loglap.json").read_text())
    assert doc["ordering_ok"] is True


def test_expand(tmp_path):
    assert _run(tmp_path, "expand", "--n", "256") == 0
    lines = (tmp_path / "expand.csv").read_text().strip().split("\n")
    assert lines[0] == "s,error,floor,ratio" and len(lines) == 5


def test_sweep_writes_csv(tmp_path):
    code = _run(tmp_path, "sweep", "--lambda", "0.25", "--s-list", "0.2,0.1", "--n", "32")
    assert code in (0, 2)
    assert (tmp_path / "sweep.csv").read_text().count("\n") == 3
    doc = json.loads((tmp_path / "sweep.json").read_text())
    assert doc["checks"]["identity_ok"] is True


def test_sweep_rerun_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["sweep", "--lambda", "0.25", "--s-list", "0.2,0.1", "--n", "32", "--out", str(a)])
    main(["sweep", "--lambda", "0.25", "--s-list", "0.2,0.1", "--n", "32", "--out", str(b)])
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_sweep_requires_lambda(tmp_path, capsys):
    assert _run(tmp_path, "sweep", "--n", "32") == 1
    assert "lambda" in capsys.readouterr().err


def test_verify_constants_reports_rho(tmp_path):
    code = _run(tmp_path, "verify", "--suite", "constants")
    doc = json.loads((tmp_path / "verify_constants.json").read_text())
    assert "rho_1" in doc
    assert doc["checks"]["a_1_ok"] and doc["checks"]["kappa_limit_ok"]
    # exit code follows the rho checks
    assert code == (0 if all(doc["checks"].values()) else 2)


def test_verify_inequalities_small(tmp_path):
    assert _run(tmp_path, "verify", "--suite", "inequalities", "--samples", "10", "--n", "64") == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["solve-log", "--bogus"],
        ["solve-log", "--mu", "5"],
        ["solve-log", "--mu", "1", "--n", "2"],
        ["solve-frac", "--s", "0.3", "--lambda", "0.25"],
        ["solve-frac", "--lambda", "0.25"],
        ["sweep", "--lambda", "0.25", "--s-list", "0.1,0.2"],
        ["sweep", "--lambda", "0.25", "--s-list", "a,b"],
        ["verify", "--suite", "nope"],
        ["solve-log", "--config", "/nonexistent/file.ini"],
    ],
)
def test_invalid_inputs_exit_1(tmp_path, argv, capsys):
    assert _run(tmp_path, *argv) == 1
    assert capsys.readouterr().err


def test_config_conflict_and_unknown_fields(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[problem]\nlambda = 0.25\nmu = 1.5\n")
    assert _run(tmp_path, "solve-log", "--config", str(bad)) == 1
    assert "inconsistent" in capsys.readouterr().err
    bad.write_text("[problem]\nlambdaa = 0.25\n")
    assert _run(tmp_path, "solve-log", "--config", str(bad)) == 1
    assert "problem.lambdaa" in capsys.readouterr().err
    bad.write_text("[grid]\nn = many\n")
    assert _run(tmp_path, "solve-log", "--config", str(bad)) == 1
    assert "grid.n" in capsys.readouterr().err


def test_dump_config_round_trip(tmp_path):
    path = tmp_path / "dump.ini"
    argv = ["sweep", "--lambda", "0.25", "--s-list", "0.2,0.1,0.05", "--n", "300", "--seed", "4", "--dump-config", str(path)]
    assert main(argv) == 0
    cfg = RunConfig.load(path)
    assert cfg == RunConfig(n=300, lam=0.25, s_list=(0.2, 0.1, 0.05), seed=4)
    assert RunConfig.loads(cfg.dumps()) == cfg


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(lam=0.25, mu=1.0 + 1e-9).validate()
    assert RunConfig(lam=0.25, mu=1.0).validate().effective_mu == 1.0
    assert RunConfig(mu=2.0).effective_lam == 0.5
    with pytest.raises(ConfigError):
        RunConfig(s=0.3).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=2).validate()
