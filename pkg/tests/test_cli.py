import json
import subprocess
import sys

import numpy as np
import pytest

from specindep import InnovationSpec, simulate_pair
from specindep.cli import CsvParseError, main, read_pair_csv
from specindep.simulate import WHITE_NOISE


@pytest.fixture
def white_csv(tmp_path):
    path = tmp_path / "white.csv"
    path.write_text(simulate_pair(WHITE_NOISE, 128, InnovationSpec(seed=2024)).to_csv())
    return path


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_test_defaults_on_independent_noise(capsys, white_csv):
    code, out, _ = _run(capsys, "test", str(white_csv))
    res = json.loads(out)
    assert code == 0
    assert res["p_value"] > 0.01
    assert res["kernel"] == "bartlett" and res["bandwidth"] == 12 and res["statistic"] == "far"
    assert res["level"] == 0.05 and res["far_order"] == 5
    assert set(res) >= {"raw_T", "standardized", "p_value", "n", "fits", "input_sha256"}


def test_test_flags_echoed(capsys, white_csv):
    code, out, _ = _run(capsys, "test", str(white_csv), "--kernel=tukey", "--bw-exp=0.4",
                        "--stat=far")
    res = json.loads(out)
    assert res["bandwidth"] == 20 and res["kernel"] == "tukey"
    assert [f["p"] for f in res["fits"]] == [5, 5]


def test_identical_columns_reject(capsys, tmp_path):
    x = np.random.default_rng(1).standard_normal(128).tolist()
    path = tmp_path / "copy.csv"
    path.write_text("\n".join(f"{v!r},{v!r}" for v in x))
    code, out, _ = _run(capsys, "test", str(path), "--exit-on-reject")
    assert json.loads(out)["p_value"] < 0.01 and code == 2
    code, _, _ = _run(capsys, "test", str(path))
    assert code == 0


def test_json_keeps_full_precision(capsys, white_csv):
    _, out, _ = _run(capsys, "test", str(white_csv), "--stat", "parametric")
    res = json.loads(out)
    from specindep import SpectralIndependenceTest
    X = read_pair_csv(white_csv.read_text().splitlines())
    est = SpectralIndependenceTest(statistic="parametric").fit(X)
    assert res["raw_T"] == est.statistic_ and res["p_value"] == est.pvalue_


def test_csv_parsing():
    assert read_pair_csv(["a,b", "1,2", "3,4"]).tolist() == [[1, 2], [3, 4]]
    assert read_pair_csv(["1,2", "", "3,4"], "no").tolist() == [[1, 2], [3, 4]]
    assert read_pair_csv(["1,2", "3,4"], "yes").tolist() == [[3, 4]]
    with pytest.raises(CsvParseError, match="line 3"):
        read_pair_csv(["x1,x2", "1,2", "3"])
    with pytest.raises(CsvParseError, match="line 2"):
        read_pair_csv(["1,2", "3,abc"])
    with pytest.raises(CsvParseError, match="line 1"):
        read_pair_csv(["a,b"], "no")
    with pytest.raises(CsvParseError):
        read_pair_csv(["1,nan"])


def test_input_errors_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x1,x2\n1,2\n3\n")
    code, _, err = _run(capsys, "test", str(bad))
    assert code == 1 and "line 3" in err
    const = tmp_path / "const.csv"
    const.write_text("\n".join(f"1.0,{v!r}" for v in np.random.default_rng(0).standard_normal(64).tolist()))
    code, _, err = _run(capsys, "test", str(const))
    assert code == 1 and "constant" in err
    short = tmp_path / "short.csv"
    short.write_text("\n".join(f"{i},{i * i % 7}" for i in range(20)))
    code, _, err = _run(capsys, "test", str(short))
    assert code == 1 and "32" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--model", "arma", "--n", "64", "--seed", "1"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        main(["test", "x.csv", "--level", "1.5"])
    assert exc.value.code == 64


def test_simulate_deterministic(capsys, tmp_path):
    code, out1, _ = _run(capsys, "simulate", "--model", "ar1", "--n", "64", "--seed", "1")
    _, out2, _ = _run(capsys, "simulate", "--model", "ar1", "--n", "64", "--seed", "1")
    assert code == 0 and out1 == out2
    lines = out1.splitlines()
    assert lines[0] == "x1,x2" and len(lines) == 65
    target = tmp_path / "sim.csv"
    _run(capsys, "simulate", "--model", "ma1", "--n", "64", "--seed", "1", "--out", str(target),
         "--dist", "t5")
    assert read_pair_csv(target.read_text().splitlines()).shape == (64, 2)
    _, out3, _ = _run(capsys, "simulate", "--model", "ar1", "--n", "64", "--seed", "2")
    assert out3 != out1


def test_simulate_honours_alternative_three(capsys):
    # averaged over seeds, the lag-3 innovation correlation dominates the cross-correlogram
    cc = np.zeros(8)
    for seed in range(20):
        _, out, _ = _run(capsys, "simulate", "--model", "ma1", "--n", "1024", "--alt", "3",
                         "--seed", str(seed))
        X = read_pair_csv(out.splitlines())
        x1, x2 = X[:, 0] - X[:, 0].mean(), X[:, 1] - X[:, 1].mean()
        cc += [np.dot(x1[: 1024 - j], x2[j:]) / np.sqrt(np.dot(x1, x1) * np.dot(x2, x2))
               for j in range(8)]
    assert int(np.argmax(cc)) == 3


def test_replicate_smoke(capsys, tmp_path):
    args = ["replicate", "--table", "2", "--reps", "100", "--n", "64", "--model", "ar1",
            "--kernel", "bartlett", "--bw-exp", "0.2", "--out-dir", str(tmp_path / "a")]
    code, out, _ = _run(capsys, *args)
    assert code == 0 and "alternative 1" in out
    manifest = json.loads((tmp_path / "a" / "table2_ar1.manifest.json").read_text())
    assert [r["phase"] for r in manifest["runs"]] == ["critical_values", "power"]
    assert manifest["critical_value_reps"] == 100 and manifest["seed"] == 20240101
    # re-running from the manifest reproduces the outputs byte for byte
    argv = manifest["argv"]
    argv[argv.index("--out-dir") + 1] = str(tmp_path / "b")
    _run(capsys, *argv)
    for suffix in (".txt", ".csv"):
        a = (tmp_path / "a" / f"table2_ar1{suffix}").read_bytes()
        b = (tmp_path / "b" / f"table2_ar1{suffix}").read_bytes()
        assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "specindep", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "specindep" in proc.stdout
