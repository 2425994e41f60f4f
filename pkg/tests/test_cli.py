import csv
import io
import json
import math
import subprocess
import sys

import pytest

from gaussepe.cli import COLUMNS, RunConfig, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


CHAIN = ["chain-scan", "--L", "64", "--betas", "4,8", "--ells", "1:12"]
PIFLUX = ["piflux-scan", "--Lx", "8", "--Ly", "4", "--betas", "2,4", "--ells", "1,2,3,4"]


def test_chain_scan_columns_and_rows(capsys):
    code, out, _ = run(CHAIN, capsys)
    assert code == 0
    assert out.splitlines()[0] == "model,beta,ell,epe,vne,l_eff"
    rows = table(out)
    assert len(rows) == 24
    first = rows[0]
    assert first["ell"] == "1" and math.isfinite(float(first["epe"]))
    assert "\r" not in out


def test_chain_scan_plateau_and_growth(capsys):
    code, out, _ = run(["chain-scan", "--L", "256", "--betas", "8", "--ells", "20,40,60"], capsys)
    rows = table(out)
    epe = [float(r["epe"]) for r in rows]
    vne = [float(r["vne"]) for r in rows]
    assert abs(epe[2] - epe[1]) < 1e-3
    assert vne[2] - vne[1] > 0.5 * (vne[1] - vne[0])


def test_ssh_scan_columns(capsys):
    code, out, _ = run(["ssh-scan", "--L-cells", "20", "--ratios", "2", "--temperatures", "0.05,0.2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "model,temperature,t2_over_t1,epe,half_mi"
    rows = table(out)
    assert [r["temperature"] for r in rows] == ["0.05", "0.2"]
    assert float(rows[0]["epe"]) == pytest.approx(math.log(2), rel=0.01)


def test_piflux_scan_rows(capsys):
    code, out, _ = run(PIFLUX, capsys)
    assert code == 0
    assert out.splitlines()[0] == "model,beta,ell_x,epe_density,inv_l_dirac,collapse_ordinate"
    rows = table(out)
    models = [r["model"] for r in rows]
    assert "pi_flux_eps" in models and models.count("pi_flux") == 8
    eps_row = rows[models.index("pi_flux_eps")]
    assert eps_row["beta"] == "inf" and float(eps_row["epe_density"]) > 0
    # maximal strip ell_x = L_x / 2 is accepted
    assert any(r["ell_x"] == "4" and r["model"] == "pi_flux" for r in rows)


def test_piflux_full_matrix_matches_sectors(capsys):
    _, a, _ = run(PIFLUX, capsys)
    _, b, _ = run(PIFLUX + ["--full-matrix"], capsys)
    ra, rb = table(a), table(b)
    assert len(ra) == len(rb)
    for x, y in zip(ra, rb):
        for col in ("epe_density", "collapse_ordinate"):
            assert abs(float(x[col]) - float(y[col])) < 1e-9


def test_toy_ratio_column(capsys):
    code, out, _ = run(["toy"], capsys)
    rows = table(out)
    assert out.splitlines()[0] == ",".join(COLUMNS["toy"])
    for r in rows:
        assert float(r["epe_over_mi_s"]) == pytest.approx(1.0, abs=2e-3)


def test_jsonl_format(capsys):
    code, out, _ = run(CHAIN + ["--format", "jsonl"], capsys)
    lines = out.splitlines()
    assert len(lines) == 24
    rec = json.loads(lines[0])
    assert list(rec) == COLUMNS["chain-scan"]


@pytest.mark.parametrize("argv", [CHAIN, PIFLUX, ["ssh-scan", "--L-cells", "10", "--ratios", "0.5,2"]])
def test_determinism_across_threads(argv, tmp_path, capsys):
    outs = []
    for n in (1, 2, 4, 1):
        path = tmp_path / f"o{n}_{len(outs)}.csv"
        assert main(argv + ["--threads", str(n), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert all(o == outs[0] for o in outs)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"L": 32, "betas": [4.0], "ells": [1, 2, 3]}))
    _, out, _ = run(["chain-scan", "--config", str(cfg)], capsys)
    rows = table(out)
    assert [r["ell"] for r in rows] == ["1", "2", "3"]
    _, out, _ = run(["chain-scan", "--config", str(cfg), "--ells", "5"], capsys)
    assert [r["ell"] for r in table(out)] == ["5"]


def test_fit_on_chain_output(tmp_path, capsys):
    path = tmp_path / "chain.csv"
    assert main(["chain-scan", "--L", "512", "--betas", "64", "--ells", "8:64", "--out", str(path)]) == 0
    code, out, _ = run(["fit", str(path), "--x", "l_eff", "--log-x", "--y", "epe"], capsys)
    assert code == 0
    row = table(out)[0]
    assert float(row["slope"]) == pytest.approx(1 / 3, rel=0.05)
    assert row["x"] == "ln(l_eff)"


def test_fit_window(tmp_path, capsys):
    path = tmp_path / "d.csv"
    path.write_text("x,y\n0,0\n1,1\n2,2\n3,9\n4,12\n5,15\n")
    code, out, _ = run(["fit", str(path), "--x", "x", "--y", "y", "--window", "3", "5"], capsys)
    assert float(table(out)[0]["slope"]) == pytest.approx(3.0)


def test_fit_empty_file_is_error(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("")
    code, _, err = run(["fit", str(path)], capsys)
    assert code == 2 and "empty" in err


# ---------------------------------------------------------------- exit codes


@pytest.mark.parametrize(
    "argv",
    [
        ["chain-scan", "--tau", "1"],
        ["chain-scan", "--L", "16", "--ells", "1:20"],
        ["chain-scan", "--betas", "-1"],
        ["piflux-scan", "--Lx", "8", "--Ly", "5"],
        ["ssh-scan", "--temperatures", "0"],
        ["fit", "x.csv", "--window", "1", "0"],
    ],
)
def test_config_errors(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text("{not json")
    assert run(["toy", "--config", str(cfg)], capsys)[0] == 2
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["toy", "--config", str(cfg)], capsys)[0] == 2


def test_numerical_failure_exit(capsys):
    # periodic y puts allowed momenta on the Dirac nodes, so the ground state is degenerate
    code, _, err = run(["piflux-scan", "--Lx", "8", "--Ly", "4", "--bc-y", "periodic", "--ells", "1,2"], capsys)
    assert code == 3 and "boundary" in err


def test_io_errors(tmp_path, capsys):
    assert run(["fit", str(tmp_path / "missing.csv")], capsys)[0] == 4
    assert run(["toy", "--out", str(tmp_path / "no" / "dir" / "x.csv")], capsys)[0] == 4


def test_run_config_defaults():
    cfg = RunConfig("chain-scan")
    assert cfg.betas == [8.0, 16.0, 32.0, 64.0] and cfg.ells == list(range(1, 257))
    cfg = RunConfig("piflux-scan")
    assert cfg.betas == [4.0, 8.0, 16.0] and len(cfg.ells) >= 8 and max(cfg.ells) == 100
    assert RunConfig("ssh-scan").L_cells == 60


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gaussepe", "toy", "--lambdas", "0.5", "--cs", "0.3"], capture_output=True, text=True)
    assert res.returncode == 0
    row = table(res.stdout)[0]
    assert float(row["weight"]) == pytest.approx(0.12, abs=1e-12)
    assert float(row["epe"]) == pytest.approx(0.0674802, abs=1e-7)
