import json

import numpy as np
import pytest

from isoquad import Quadrilateral, assemble, eigenvalues
from isoquad.cli import SEARCH_COLUMNS, TRACE_COLUMNS, main

STAR_ARGS = ["--star", "-0.2", "1.1", "1.2", "1.3"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eigs_human_output(capsys):
    code, out, _ = run(capsys, "eigs", "0", "1", "1", "1", "--scheme", "fd")
    assert code == 0
    assert "18.00 36.00 36.00 54.00" in out
    assert "area: 1.00" in out


def test_eigs_star_two_decimals(capsys):
    code, out, _ = run(capsys, "eigs", "--", "-0.2", "1.1", "1.2", "1.3")
    assert code == 0
    assert "12.52 24.63 25.98 38.05" in out


def test_eigs_json(capsys):
    code, out, _ = run(capsys, "eigs", "0", "1", "1", "1", "--json", "--scheme", "fd")
    assert code == 0
    doc = json.loads(out)
    assert doc["eigenvalues"] == [18.0, 36.0, 36.0, 54.0]
    assert doc["invariants"]["xi3"] == 144.0
    assert doc["area"] == 1.0


def test_eigs_vertex_input(capsys):
    code, out, _ = run(
        capsys, "eigs", "0", "0", "1", "0", "-0.2", "1.1", "1.2", "1.3", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["params"]["alpha"] == -0.2
    code, _, err = run(capsys, "eigs", "0.5", "0", "1", "0", "-0.2", "1.1", "1.2", "1.3")
    assert code == 2
    assert "V1" in err


def test_eigs_invalid_quadrilateral_exit_2(capsys):
    code, _, err = run(capsys, "eigs", "1.5", "1", "-0.5", "1")
    assert code == 2
    assert "InvalidQuadrilateral" in err


def test_search_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "hits.csv"
    code, _, _ = run(
        capsys, "search", *STAR_ARGS, "--l", "0.02", "--h", "0.01",
        "--eps", "2e-3", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == SEARCH_COLUMNS
    assert len(lines) > 1
    manifest = json.loads((tmp_path / "hits.csv.manifest.json").read_text())
    assert manifest["command"] == "search"
    assert manifest["config"]["search"]["epsilon"] == 2e-3
    assert manifest["diagnostics"]["n_accepted"] == len(lines) - 1


def test_search_rows_reevaluate(tmp_path, capsys):
    out = tmp_path / "hits.csv"
    run(
        capsys, "search", *STAR_ARGS, "--l", "0.02", "--h", "0.01",
        "--eps", "2e-3", "--out", str(out),
    )
    lines = out.read_text().splitlines()[1:]
    assert lines
    for line in lines:
        vals = [float(v) for v in line.split(",")]
        quad = Quadrilateral(*vals[:4])
        lam = eigenvalues(assemble(quad))
        assert np.allclose(lam, vals[5:9], atol=1e-9)


def test_search_tiny_epsilon_keeps_only_center(tmp_path, capsys):
    """Self-inclusion means a valid star can never produce an empty result:
    the tightest tolerance still accepts exactly the center row."""
    out = tmp_path / "tight.csv"
    code, _, _ = run(
        capsys, "search", "--star", "-0.2001", "1.1", "1.2", "1.3",
        "--l", "0.02", "--h", "0.01", "--eps", "1e-12", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == SEARCH_COLUMNS
    assert len(lines) == 2
    vals = [float(v) for v in lines[1].split(",")]
    assert vals[:4] == [-0.2001, 1.1, 1.2, 1.3]


def test_empty_csv_is_header_only(tmp_path):
    from isoquad.cli import _search_rows, _write_lines

    out = tmp_path / "empty.csv"
    _write_lines(out, [SEARCH_COLUMNS, *_search_rows([])])
    assert out.read_text() == SEARCH_COLUMNS + "\n"


def test_search_manifest_round_trip(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    run(
        capsys, "search", *STAR_ARGS, "--l", "0.02", "--h", "0.01",
        "--eps", "2e-3", "--out", str(out1),
    )
    manifest = tmp_path / "a.csv.manifest.json"
    out2 = tmp_path / "b.csv"
    code, _, _ = run(capsys, "search", "--config", str(manifest), "--out", str(out2))
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_search_byte_determinism(tmp_path, capsys):
    outs = []
    for name in ("r1.csv", "r2.csv"):
        out = tmp_path / name
        run(
            capsys, "search", *STAR_ARGS, "--l", "0.02", "--h", "0.01",
            "--eps", "2e-3", "--out", str(out),
        )
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_search_missing_star(tmp_path, capsys):
    code, _, err = run(capsys, "search", "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "reference quadrilateral" in err


def test_trace_csv(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, _, _ = run(
        capsys, "trace", *STAR_ARGS, "--method", "exact", "--T", "0.012",
        "--M", "6", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == TRACE_COLUMNS
    assert len(lines) == 14  # 2 M + 1 rows
    ts = [float(line.split(",")[0]) for line in lines[1:]]
    assert ts == sorted(ts)
    flags = {line.split(",")[-1] for line in lines[1:]}
    assert flags == {"0"}
    # c(0) = 1 exactly
    mid = lines[1 + 6].split(",")
    assert float(mid[0]) == 0.0
    assert float(mid[5]) == 1.0


def test_trace_from_square_truncates(tmp_path, capsys):
    out = tmp_path / "sq.csv"
    code, _, _ = run(
        capsys, "trace", "--star", "0", "1", "1", "1", "--T", "0.06",
        "--M", "10", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].endswith(",1")  # truncation flag set
    manifest = json.loads((tmp_path / "sq.csv.manifest.json").read_text())
    assert manifest["diagnostics"]["truncated_positive"]


def test_trace_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = {
        "star": {"alpha": -0.2, "beta": 1.1, "gamma": 1.2, "delta": 1.3},
        "trace": {"T": 0.012, "M": 3},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "trace", "--config", str(path), "--M", "2", "--out", str(out))
    assert code == 0
    assert len(out.read_text().splitlines()) == 6  # M=2 from the flag wins


def test_deform_outputs(tmp_path, capsys):
    out = tmp_path / "deform"
    code, _, _ = run(
        capsys, "deform", *STAR_ARGS, "--S", "4", "--T0", "0.06",
        "--M", "4", "--out", str(out),
    )
    assert code == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert len(summary) == 5
    t_col = [float(line.split(",")[6]) for line in summary[1:]]
    expected = [0.06 / (1 + 2 * j / 4) for j in range(4)]
    assert np.allclose(t_col, expected, rtol=1e-12)
    for j in range(4):
        step = out / f"step_{j:02d}.csv"
        assert step.exists()
        assert step.read_text().splitlines()[0] == TRACE_COLUMNS
    assert (out / "manifest.json").exists()


def test_reproduce_square_suite(capsys):
    code, out, _ = run(capsys, "reproduce", "--suite", "square")
    assert code == 0
    assert "3/3 checks passed" in out
    assert out.count("[PASS]") == 3


def test_threads_env_matches_sequential(tmp_path, capsys, monkeypatch):
    out1 = tmp_path / "seq.csv"
    run(
        capsys, "search", *STAR_ARGS, "--l", "0.04", "--h", "0.02",
        "--eps", "2e-3", "--out", str(out1),
    )
    monkeypatch.setenv("ISOQUAD_THREADS", "3")
    out2 = tmp_path / "par.csv"
    run(
        capsys, "search", *STAR_ARGS, "--l", "0.04", "--h", "0.02",
        "--eps", "2e-3", "--out", str(out2),
    )
    assert out1.read_bytes() == out2.read_bytes()
