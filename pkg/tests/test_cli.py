import json
import subprocess
import sys

import numpy as np
import pytest

from qlperception import normalize_frame, probabilities, product_state
from qlperception.cli import EXIT_DOMAIN, EXIT_USAGE, main

from conftest import REFERENCE_X

EQ_AMPS = [0.125, 0.385, 0.064, 0.196, 0.245, 0.755, 0.125, 0.385]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def json_rows(text, kind=None):
    rows = [json.loads(line) for line in text.splitlines()]
    return [r for r in rows if kind is None or r.get("kind") == kind]


class TestEncode:
    def test_normalized_input(self, capsys):
        code, out, _ = run(capsys, "encode", "--x", "0.8,0.3,0.7", "--format", "json-lines")
        assert code == 0
        amps = [r["amplitude"] for r in json_rows(out, "basis")]
        np.testing.assert_allclose(amps, EQ_AMPS, atol=1e-3)

    def test_raw_frame(self, capsys):
        code, out, _ = run(capsys, "encode", "--frame", "204,76,178", "--format", "json-lines")
        assert code == 0
        amps = [r["amplitude"] for r in json_rows(out, "basis")]
        expected = product_state([204 / 255, 76 / 255, 178 / 255]).amplitudes
        np.testing.assert_allclose(amps, expected, atol=1e-12)
        # 76/255 and 178/255 miss 0.3 and 0.7 by ~0.002, shifting amplitudes by up to ~0.0032
        np.testing.assert_allclose(amps, EQ_AMPS, atol=4e-3)

    def test_zero_frame(self, capsys):
        _, out, _ = run(capsys, "encode", "--frame", "0,0,0", "--format", "csv")
        lines = out.splitlines()
        assert lines[0] == "bitstring,amplitude,probability"
        assert lines[1] == "000,1.0,1.0"

    def test_round_trip(self, capsys):
        _, out, _ = run(capsys, "encode", "--frame", "17,200,93", "--format", "json-lines")
        state = product_state(normalize_frame((17, 200, 93), _rgb()))
        basis = json_rows(out, "basis")
        assert [r["state"] for r in basis] == [format(b, "03b") for b in range(8)]
        np.testing.assert_allclose([r["amplitude"] for r in basis], state.amplitudes, atol=1e-12)
        np.testing.assert_allclose([r["probability"] for r in basis], probabilities(state), atol=1e-12)
        qubits = json_rows(out, "qubit")
        assert [q["sensor"] for q in qubits] == ["R", "G", "B"]
        assert qubits[1]["bloch"][1] == 0.0

    def test_text(self, capsys):
        code, out, _ = run(capsys, "encode", "--x", "0.8,0.3,0.7")
        assert code == 0
        assert "|101>" in out and "57.01%" in out

    def test_frame_and_x_exclusive(self, capsys):
        code, _, _ = run(capsys, "encode", "--x", "0.1,0.2,0.3", "--frame", "1,2,3")
        assert code == EXIT_USAGE

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "encode", "--frame", "0,0,300")
        assert code == EXIT_DOMAIN
        assert "outside" in err

    def test_clamp(self, capsys):
        code, out, _ = run(capsys, "encode", "--frame", "0,0,300", "--clamp", "--format", "csv")
        assert code == 0
        assert out.splitlines()[5].startswith("100,1.0")

    def test_length_mismatch_is_usage(self, capsys):
        code, _, _ = run(capsys, "encode", "--frame", "1,2")
        assert code == EXIT_USAGE


def _rgb():
    from qlperception import default_config

    return default_config()


class TestQuery:
    def test_case_study_row(self, capsys):
        code, out, _ = run(
            capsys, "query", "--frame", "84,48,38", "--target", "132,35,107", "--format", "json-lines"
        )
        assert code == 0
        basis = json_rows(out, "basis")
        assert basis[0]["probability"] == pytest.approx(0.755, abs=3e-3)
        assert json_rows(out, "summary")[0]["distance"] == pytest.approx(85.05, abs=0.01)
        groups = {r["zeros"]: r["probability"] for r in json_rows(out, "group")}
        assert sum(groups.values()) == pytest.approx(1)

    def test_self(self, capsys):
        _, out, _ = run(capsys, "query", "--frame", "9,8,7", "--target", "9,8,7")
        assert "100.00%" in out and "d = 0.00" in out

    def test_sampled(self, capsys):
        _, out, _ = run(
            capsys, "query", "--frame", "102,18,124", "--target", "132,35,107",
            "--shots", "1000000", "--seed", "7", "--format", "csv",
        )
        lines = out.splitlines()
        assert lines[0] == "bitstring,probability,frequency"
        assert float(lines[1].split(",")[2]) == pytest.approx(0.945, abs=2e-3)

    def test_normalized_target(self, capsys):
        code, out, _ = run(capsys, "query", "--x", "0.2,0.4", "--target-x", "0.2,0.4", "--format", "csv")
        assert code == 0
        assert out.splitlines()[1] == "00,1.0"

    def test_missing_target(self, capsys):
        assert run(capsys, "query", "--frame", "1,2,3")[0] == EXIT_USAGE


class TestSample:
    def test_histogram_format(self, capsys):
        code, out, _ = run(capsys, "sample", "--x", "0.8,0.3,0.7", "--shots", "1000", "--seed", "42")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "bitstring,count,frequency"
        assert lines[6] == "101,560,0.56"
        assert sum(int(line.split(",")[1]) for line in lines[1:]) == 1000

    def test_deterministic(self, capsys):
        argv = ["sample", "--frame", "10,75,125", "--shots", "5000"]
        assert run(capsys, *argv)[1] == run(capsys, *argv)[1]

    def test_bad_seed(self, capsys):
        assert run(capsys, "sample", "--x", "0.1", "--seed", "-1")[0] == EXIT_USAGE


class TestSweep:
    def test_corners(self, capsys):
        code, out, _ = run(capsys, "sweep", "--step", "250")
        assert code == 0
        assert len(out.splitlines()) == 9

    def test_target_self_match(self, tmp_path, capsys):
        path = tmp_path / "q.csv"
        code, _, _ = run(capsys, "sweep", "--step", "5", "--target", "130,35,105", "-o", str(path))
        assert code == 0
        lines = path.read_text().splitlines()
        header = lines[0].split(",")
        row = next(line.split(",") for line in lines[1:] if line.startswith("130,35,105,"))
        assert float(row[header.index("g3")]) == 1.0
        meta = json.loads((tmp_path / "q.csv.meta.json").read_text())
        assert meta["spec"]["target"] == [130, 35, 105]

    def test_off_grid_target(self, capsys):
        # target (132,35,107) is not a grid point; its nearest neighbours score highest
        code, out, _ = run(capsys, "sweep", "--step", "5", "--target", "132,35,107")
        assert code == 0
        rows = [line.split(",") for line in out.splitlines()[1:]]
        best = max(rows, key=lambda r: float(r[12]))
        assert tuple(map(int, best[:3])) == (130, 35, 105)

    def test_sampled(self, capsys):
        code, out, _ = run(capsys, "sweep", "--step", "125", "--shots", "100", "--format", "json-lines")
        assert code == 0
        rows = json_rows(out)
        assert len(rows) == 27
        assert all(sum(r[f"p_{b:03b}"] for b in range(8)) == pytest.approx(1) for r in rows)

    @pytest.mark.parametrize("step", ["0", "abc", "300"])
    def test_bad_step(self, capsys, step):
        assert run(capsys, "sweep", "--step", step)[0] == EXIT_USAGE

    def test_bad_grid(self, capsys):
        assert run(capsys, "sweep", "--grid", "middle")[0] == EXIT_USAGE


class TestTable:
    def test_text(self, capsys):
        code, out, _ = run(capsys, "table", "--shots", "10000")
        assert code == 0
        assert "exact" in out and "sampled" in out
        assert "230.38" in out

    def test_single_row_json(self, capsys):
        code, out, _ = run(
            capsys, "table", "--frame", "36,101,84", "--target", "132,35,107",
            "--shots", "1000", "--format", "json-lines",
        )
        assert code == 0
        rows = json_rows(out)
        assert [r["source"] for r in rows] == ["exact", "sampled"]
        assert rows[0]["p_001"] == pytest.approx(0.257, abs=3e-3)
        assert rows[0]["distance"] == pytest.approx(118.75, abs=0.01)

    def test_csv(self, capsys):
        _, out, _ = run(capsys, "table", "--shots", "100", "--format", "csv")
        lines = out.splitlines()
        assert lines[0].startswith("input,target,source,p_000")
        assert len(lines) == 21

    def test_target_without_frame(self, capsys):
        assert run(capsys, "table", "--target", "1,2,3")[0] == EXIT_USAGE


def test_config_file(tmp_path, capsys):
    path = tmp_path / "two.toml"
    path.write_text('[[sensor]]\nname = "a"\nlower = 0\nupper = 10\n[[sensor]]\nname = "b"\nlower = 0\nupper = 10\n')
    code, out, _ = run(capsys, "encode", "--config", str(path), "--frame", "10,0", "--format", "csv")
    assert code == 0
    assert out.splitlines()[2].startswith("01,1.0")


def test_bad_config_file(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("[[sensor]\n")
    assert run(capsys, "encode", "--config", str(path), "--frame", "1")[0] == EXIT_USAGE


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qlperception.cli", "encode", "--x", "1", "--format", "csv"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout.splitlines()[2].startswith("1,1.0")
