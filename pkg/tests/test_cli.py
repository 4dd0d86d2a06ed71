import json
import subprocess
import sys

import numpy as np
import pytest

from rankset import PopulationFrame
from rankset.cli import main
from rankset.io import write_population


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def population(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.normal(size=400)
    path = tmp_path / "pop.csv"
    write_population(PopulationFrame.from_arrays(x, x + rng.normal(0, 0.5, 400)), path)
    return path


def test_simulate_is_byte_identical_across_processes():
    argv = ["-m", "rankset", "simulate", "--H", "3", "--nsamp", "2,2,2",
            "--dist", "normal", "--rho", "0.8", "--delta", "0", "--seed", "1"]
    a = subprocess.run([sys.executable, *argv], capture_output=True, check=True).stdout
    b = subprocess.run([sys.executable, *argv], capture_output=True, check=True).stdout
    assert a == b
    assert a.decode().splitlines()[0] == "rank,y"
    assert len(a.decode().splitlines()) == 7


def test_naive_df_reported_in_json(tmp_path, capsys):
    for name, n, seed in (("d1.csv", 6, 1), ("d2.csv", 8, 2)):
        main(["simulate", "--H", "3", "--nsamp", f"{n},{n},{n}", "--seed", str(seed),
              "--out", str(tmp_path / name)])
    code, out, _ = run(["test", "t", "--data", str(tmp_path / "d1.csv"), "--data2",
                        str(tmp_path / "d2.csv"), "--mu0", "0", "--df-method", "naive"], capsys)
    assert code == 0
    res = json.loads(out)
    assert res["df"] == 36
    assert set(res) >= {"estimate", "ci", "statistic", "df", "p_value", "method"}
    assert res["alternative"] == "two.sided"


def test_sample_output_feeds_test_and_design(population, tmp_path, capsys):
    out_csv = tmp_path / "rss.csv"
    code, _, _ = run(["sample", "--pop", str(population), "--H", "3", "--nsamp", "4,6,5",
                      "--seed", "9", "--out", str(out_csv)], capsys)
    assert code == 0
    assert out_csv.read_text().splitlines()[0] == "rank,ID,y"
    for method in ("z", "t", "elr", "sign"):
        code, out, err = run(["test", method, "--data", str(out_csv)], capsys)
        assert code == 0, err
        assert json.loads(out)["method"] == method
    code, out, _ = run(["design", "--data", str(out_csv)], capsys)
    report = json.loads(out)
    assert report["original"] == [4, 6, 5]
    assert {"integer_neyman", "adjusted_neyman", "lrc", "additions"} <= set(report)


def test_sample_is_deterministic(population, capsys):
    argv = ["sample", "--pop", str(population), "--H", "3", "--nsamp", "2,2,2", "--seed", "4"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_prop_design_key(tmp_path, capsys):
    path = tmp_path / "prop.csv"
    main(["prop-simulate", "--H", "3", "--nsamp", "10,15,20", "--p", "0.4", "--seed", "2",
          "--out", str(path)])
    code, out, _ = run(["design", "--data", str(path), "--prop"], capsys)
    assert code == 0
    alloc = json.loads(out)["neyman_proportion"]
    assert sum(alloc) == pytest.approx(45)
    code, out, _ = run(["test", "prop", "--data", str(path), "--p0", "0.3"], capsys)
    assert code == 0 and json.loads(out)["method"] == "prop"


def test_missing_values_are_dropped(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("rank,y\n1,1.0\n1,2.0\n1,NA\n2,3.0\n2,4.5\n")
    code, out, err = run(["test", "z", "--data", str(path), "--mu0", "2"], capsys)
    assert code == 0 and "dropping 1" in err
    assert json.loads(out)["estimate"] == pytest.approx(2.625)


def test_auc_command(tmp_path, capsys):
    for name, delta, seed in (("a.csv", 0.0, 1), ("b.csv", 1.0, 2)):
        main(["simulate", "--H", "3", "--nsamp", "5,10,15", "--delta", str(delta),
              "--seed", str(seed), "--out", str(tmp_path / name)])
    code, out, _ = run(["test", "auc", "--data", str(tmp_path / "a.csv"), "--data2",
                        str(tmp_path / "b.csv")], capsys)
    res = json.loads(out)
    assert code == 0 and 0 <= res["ci"][0] < res["estimate"] < res["ci"][1] <= 1


@pytest.mark.parametrize(
    "argv, code",
    [
        (["simulate", "--H", "3"], 2),
        (["test", "anova", "--data", "x.csv"], 2),
        (["test", "z", "--data", "/nonexistent/file.csv"], 3),
        (["simulate", "--H", "3", "--nsamp", "1,1", "--seed", "0"], 3),
    ],
)
def test_exit_codes(argv, code, capsys):
    assert run(argv, capsys)[0] == code


def test_bad_data_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("rank,y\n1,oops\n")
    code, out, err = run(["test", "z", "--data", str(path)], capsys)
    assert code == 3 and out == "" and "line 2" in err


def test_infeasible_exit_code(tmp_path, capsys):
    path = tmp_path / "zeros.csv"
    path.write_text("rank,y\n1,0\n1,0\n2,0\n2,0\n")
    code, _, err = run(["test", "prop", "--data", str(path), "--p0", "0.5"], capsys)
    assert code == 4 and "error" in err


def test_population_too_small_is_infeasible(tmp_path, capsys):
    path = tmp_path / "tiny.csv"
    write_population(PopulationFrame.from_arrays(np.arange(5.0), np.arange(5.0)), path)
    code, _, _ = run(["sample", "--pop", str(path), "--H", "3", "--nsamp", "2,2,2"], capsys)
    assert code == 4


def test_bench_command(tmp_path, capsys):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({"scenario": "one_sample_mean", "replicates": 5, "seed": 3}))
    csv_out = tmp_path / "bench.csv"
    code, out, _ = run(["bench", "--config", str(cfg), "--format", "csv", "--out", str(csv_out)], capsys)
    assert code == 0
    assert out == csv_out.read_text()
    assert out.splitlines()[0] == "method,mean_n,coverage,mean_ci_length"
    code, again, _ = run(["bench", "--config", str(cfg), "--format", "csv"], capsys)
    assert again == out
