import json
import math

import numpy as np
import pytest

from eqym.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, main
from eqym.io import RunConfig, dumps, read_csv, write_csv


def run(tmp_path, *argv):
    return main(list(argv) + ["--out", str(tmp_path)])


def load(tmp_path, name="summary.json"):
    return json.loads((tmp_path / name).read_text())


def test_classify_so5(tmp_path, capsys):
    assert run(tmp_path, "classify", "--group", "so", "--n", "5") == EXIT_OK
    assert "dimension" in capsys.readouterr().out
    s = load(tmp_path)
    assert s["passed"] and s["tool"] == "eqym"
    assert (tmp_path / "config.json").exists() and (tmp_path / "fixed_space.json").exists()


@pytest.mark.parametrize("argv", [
    ("classify", "--group", "so", "--n", "2"),
    ("classify", "--group", "so", "--n", "9"),
    ("verify", "--suite", "equivariance", "--case", "sopq4", "--pq", "x,y"),
    ("solve", "--case", "son", "--n", "5", "--rmin", "0.5"),
    ("evolve", "--cfl", "0.99", "--N", "64", "--T", "0.1"),
    ("energy", "--scale", "-1"),
])
def test_invalid_input_exits_two(tmp_path, argv):
    assert run(tmp_path, *argv) == EXIT_INVALID


def test_unknown_option_is_a_usage_error(tmp_path):
    assert run(tmp_path, "classify", "--group", "nope") == 2


def test_corrupted_ansatz_fails_acceptance(tmp_path):
    code = run(tmp_path, "verify", "--suite", "equivariance", "--case", "son", "--n", "5", "--samples", "5",
               "--corrupt")
    assert code == EXIT_NUMERIC
    assert load(tmp_path)["passed"] is False


def test_solve_writes_profile_columns(tmp_path):
    assert run(tmp_path, "solve", "--case", "son", "--n", "5", "--b", "1.0", "--rmax", "3") == EXIT_OK
    head, data = read_csv(tmp_path / "profile.csv")
    assert head[0] == "r" and "g" in head
    assert np.all(np.diff(data[:, 0]) > 0)


def test_evolve_outputs(tmp_path):
    assert run(tmp_path, "evolve", "--mode", "scalar", "--N", "128", "--T", "0.5",
               "--drift-tol", "1e-2") == EXIT_OK
    head, data = read_csv(tmp_path / "timeseries.csv")
    assert head[0] == "t" and data.shape[0] > 2
    assert sorted(p.name for p in tmp_path.glob("snapshot_*.csv"))


def test_runs_are_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["verify", "--suite", "projection", "--case", "son", "--n", "5", "--samples", "4",
                     "--out", str(out)]) == EXIT_OK
    assert (a / "summary.json").read_text() == (b / "summary.json").read_text()


def test_energy_scaling_ratio(tmp_path):
    assert run(tmp_path, "energy", "--scale", "2.0", "--n", "4", "--N", "801") == EXIT_OK


def test_json_maps_nan_to_null_and_sorts_keys():
    text = dumps({"b": float("nan"), "a": np.float64(1.5), "c": np.arange(2)})
    assert json.loads(text) == {"a": 1.5, "b": None, "c": [0, 1]}
    assert text.index('"a"') < text.index('"b"')


def test_csv_roundtrip_is_exact(tmp_path):
    vals = [[0.1, 1 / 3, math.pi], [1e-300, -2.5, 7.0]]
    write_csv(tmp_path / "x.csv", ["a", "b", "c"], vals)
    head, data = read_csv(tmp_path / "x.csv")
    assert head == ["a", "b", "c"] and np.array_equal(data, vals)


def test_run_config_guards():
    with pytest.raises(ValueError):
        RunConfig("", {}, 0, "out").validate()
    with pytest.raises(ValueError):
        RunConfig("classify", {}, -1, "out").validate()
