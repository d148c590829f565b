import csv
import math

import numpy as np
import pytest

from powerstreams.cli import SEED_ENV, main, parse_grid, parse_range


def read(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def manifest(path):
    with open(f"{path}.manifest") as fh:
        return dict(line.rstrip("\n").split("=", 1) for line in fh)


def test_parse_helpers():
    assert parse_range("27:33") == list(range(26, 33))
    assert parse_range("0:0") == []
    assert np.allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    assert np.allclose(parse_grid("0.5,2"), [0.5, 2])


def test_lattice_output_format(tmp_path):
    out = tmp_path / "lat.csv"
    assert main(["lattice", "--out", str(out), "--times", "0,2", "--trunc", "30"]) == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    header, rows = read(out)
    assert header == ["t", "site", "series"]
    assert len(rows) == 2 * 60
    at0 = np.array([float(r[2]) for r in rows[:60]])
    ind = np.zeros(60)
    ind[26:33] = 1
    assert np.array_equal(at0, ind)
    assert [int(r[1]) for r in rows[:60]] == list(range(1, 61))
    # values round-trip at 17 significant digits
    v = float(rows[60 + 29][2])
    assert rows[60 + 29][2] == format(v, ".17g")
    m = manifest(out)
    assert m["assumed.n_sites"] == "60"
    assert m["assumed.beta"] == "1.0"
    assert m["site_labels"] == "1-based"
    assert "tail.poisson@2" in m and "tail.bound@2" in m


def test_lattice_empty_init(tmp_path):
    out = tmp_path / "empty.csv"
    assert main(["lattice", "--out", str(out), "--init", "0:0", "--n-sites", "10", "--beta", "1"]) == 0
    _, rows = read(out)
    assert all(float(r[2]) == 0.0 for r in rows)


def test_lattice_ensemble_reproducible(tmp_path, monkeypatch):
    args = ["lattice", "--n-sites", "20", "--init", "8:12", "--beta", "1", "--times", "0,1",
            "--replicates", "40"]
    a, b, c = (tmp_path / f"{k}.csv" for k in "abc")
    monkeypatch.setenv(SEED_ENV, "7")
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert manifest(a)["seed"] == "7"
    assert main(args + ["--out", str(c), "--seed", "8"]) == 0
    assert a.read_bytes() != c.read_bytes()
    header, _ = read(a)
    assert header == ["t", "site", "series", "ensemble", "stderr"]


def test_bad_range_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["lattice", "--out", str(tmp_path / "x.csv"), "--init", "50:70"])
    assert exc.value.code == 2


def test_streams(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["streams", "--out", str(out), "--n-sites", "60", "--beta", "0.5,2",
                 "--site", "30", "--n-range", "0:40", "--t-grid", "0:3:7"]) == 0
    header, rows = read(out)
    assert header == ["beta", "n", "t", "value"]
    data = np.array(rows, dtype=float)
    for beta in (0.5, 2.0):
        sel = data[data[:, 0] == beta]
        n0 = sel[sel[:, 1] == 0]
        # site 30 is initially occupied: stream zero is the separated seed
        assert np.allclose(n0[:, 3], np.exp(-beta * n0[:, 2]), rtol=1e-14)
    # summed streams reproduce the solution for both beta values
    t3 = data[data[:, 2] == 3.0]
    sums = [t3[t3[:, 0] == b][:, 3].sum() for b in (0.5, 2.0)]
    assert sums[0] == pytest.approx(sums[1], abs=1e-9)


def test_ode_logistic(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["ode", "--model", "logistic", "--out", str(out), "--t-grid", "0:1.5:16"]) == 0
    header, rows = read(out)
    assert header == ["t", "series", "analytic", "abs_err"]
    assert float(rows[0][3]) == 0.0
    assert max(float(r[3]) for r in rows) < 1e-3
    assert manifest(out)["backend"].startswith("chebyshev")


def test_ode_square_blank_past_blowup(tmp_path):
    out = tmp_path / "sq.csv"
    with pytest.warns(UserWarning):
        assert main(["ode", "--model", "square", "--trunc", "5", "--beta", "1",
                     "--out", str(out), "--t-grid", "0,0.5,1,1.5"]) == 0
    _, rows = read(out)
    assert rows[2][1:] == ["", "", ""]
    assert rows[3][1] == ""
    assert manifest(out)["singular_rows"] == "2"


def test_pde_dirichlet_boundary(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["pde", "--model", "dirichlet", "--out", str(out), "--grid", "9",
                 "--beta", "1", "--times", "0,0.5"]) == 0
    _, rows = read(out)
    left = [float(r[2]) for r in rows if float(r[1]) == 0.0]
    assert left == [1.0, 1.0]


def test_pde_wave(tmp_path):
    out = tmp_path / "w.csv"
    assert main(["pde", "--model", "wave", "--out", str(out), "--grid", "16", "--times", "1"]) == 0
    _, rows = read(out)
    assert max(float(r[4]) for r in rows) < 1e-10
    assert math.isclose(float(rows[0][3]), math.sin(1.0), rel_tol=1e-15)


def test_pde_burgers_past_breakdown(tmp_path):
    out = tmp_path / "b.csv"
    with pytest.warns(UserWarning, match="crossing"):
        assert main(["pde", "--model", "burgers", "--trunc", "4", "--grid", "5",
                     "--times", "0.1,2.5", "--out", str(out)]) == 0
    _, rows = read(out)
    assert all(r[3] != "" for r in rows[:5])
    assert all(r[3] == "" and r[4] == "" for r in rows[5:])
    assert manifest(out)["breakdown_time"] == "2"
