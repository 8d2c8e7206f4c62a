"""Command-line behavior: parsing, outputs, exit codes, determinism."""

from __future__ import annotations

import argparse
import json

import pytest

from farey_spectrum import cli
from farey_spectrum.cli import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFY_FAILED,
    CliError,
    _parse_sizes,
    _parse_x_grid,
    main,
    parse_config,
)


def _run_to_file(tmp_path, name, argv):
    path = tmp_path / name
    code = main(argv + ["--output", str(path)])
    return code, path.read_text()


def test_entries_csv(tmp_path):
    code, text = _run_to_file(
        tmp_path, "m.csv", ["entries", "--q", "0.5", "--sign", "plus", "--size", "3"]
    )
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "# q = 0.5"
    assert lines[1] == "# sign = plus"
    assert lines[2] == "# N = 3"
    assert lines[3].startswith("# tool = farey-spectrum/")
    assert lines[4] == "n0,n1,n2"
    assert len(lines) == 8
    first_row = [float(v) for v in lines[5].split(",")]
    assert first_row[0] == 1.0
    assert first_row[1] == 0.5


def test_eigen_json(tmp_path):
    code, text = _run_to_file(
        tmp_path, "e.json", ["eigen", "--q", "0.5", "--sign", "plus", "--size", "20"]
    )
    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["converged"] is True
    assert payload["lambda"] == pytest.approx(1.365, abs=1e-2)
    assert payload["phi"][0] == 1.0
    assert len(payload["phi"]) == 20
    assert payload["tool"].startswith("farey-spectrum/")


def test_trunc_sweep_csv(tmp_path):
    code, text = _run_to_file(
        tmp_path,
        "t.csv",
        ["trunc-sweep", "--q", "0.5", "--sign", "plus", "--sizes", "2,4,8"],
    )
    assert code == EXIT_OK
    lines = text.splitlines()
    assert "# N = 2,4,8" in lines
    header = lines.index("parameter,lambda,bound,converged,iterations")
    data = lines[header + 1 :]
    assert len(data) == 3
    lams = [float(row.split(",")[1]) for row in data]
    assert lams == sorted(lams)


def test_trunc_sweep_range_syntax(tmp_path):
    code, text = _run_to_file(
        tmp_path,
        "t.csv",
        ["trunc-sweep", "--q", "0.5", "--sign", "plus", "--sizes", "1:5"],
    )
    assert code == EXIT_OK
    assert "# N = 1:5" in text.splitlines()
    assert len([ln for ln in text.splitlines() if not ln.startswith(("#", "parameter"))]) == 5


def test_q_sweep_csv(tmp_path):
    argv = [
        "q-sweep",
        "--q-min", "0.4",
        "--q-max", "0.6",
        "--q-step", "0.1",
        "--sign", "plus",
        "--size", "15",
    ]
    code, text = _run_to_file(tmp_path, "q.csv", argv)
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[0] == "# q = 0.4:0.6:0.1"
    data = [ln for ln in lines if not ln.startswith(("#", "parameter"))]
    assert len(data) == 3
    assert float(data[0].split(",")[0]) == 0.4


def test_norms_csv(tmp_path):
    code, text = _run_to_file(
        tmp_path, "n.csv", ["norms", "--q", "0.5", "--sign", "plus", "--sizes", "5,10"]
    )
    assert code == EXIT_OK
    lines = text.splitlines()
    header = lines.index("size,k,s")
    data = lines[header + 1 :]
    assert len(data) == 15
    assert data[0].startswith("5,0,")
    # partial sums never decrease within one curve
    s10 = [float(r.split(",")[2]) for r in data if r.startswith("10,")]
    assert s10 == sorted(s10)


def test_residual_csv(tmp_path):
    code, text = _run_to_file(
        tmp_path,
        "r.csv",
        [
            "residual",
            "--q", "0.5",
            "--sign", "plus",
            "--size", "30",
            "--x-grid", "0.25,0.5,0.75",
        ],
    )
    assert code == EXIT_OK
    lines = text.splitlines()
    header = lines.index("x,f_value,transfer_value,relative_residual")
    data = lines[header + 1 :]
    assert [float(r.split(",")[0]) for r in data] == [0.25, 0.5, 0.75]
    assert all(float(r.split(",")[3]) < 1e-4 for r in data)


def test_verify_passes(tmp_path):
    code, text = _run_to_file(tmp_path, "v.json", ["verify", "--q", "0.5", "--size", "30"])
    assert code == EXIT_OK
    payload = json.loads(text)
    assert payload["passed"] is True
    names = {c["name"] for c in payload["checks"]}
    assert "quadrature_exactness" in names
    assert "matrix_element_consistency_plus" in names
    assert all(c["passed"] for c in payload["checks"])


def test_verify_rejects_small_q(tmp_path, capsys):
    code = main(["verify", "--q", "0.4"])
    assert code == EXIT_USAGE
    assert "q >= 0.5" in capsys.readouterr().err


def test_repeated_runs_byte_identical(tmp_path):
    argv = ["eigen", "--q", "0.75", "--sign", "minus", "--size", "25"]
    _, first = _run_to_file(tmp_path, "a.json", argv)
    _, second = _run_to_file(tmp_path, "b.json", argv)
    assert first == second


def test_stdout_output(capsys):
    code = main(["entries", "--q", "0.5", "--sign", "plus", "--size", "2"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# q = 0.5")
    assert out.endswith("\n")


def test_entries_as_json(capsys):
    code = main(["entries", "--q", "0.5", "--sign", "plus", "--size", "2", "--format", "json"])
    assert code == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["entries"][0][0] == 1.0


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["no-such-command"],
        ["eigen", "--q", "0.5"],
        ["eigen", "--q", "0.5", "--sign", "up", "--size", "10"],
        ["trunc-sweep", "--q", "0.5", "--sign", "plus", "--sizes", "8,4"],
        ["trunc-sweep", "--q", "0.5", "--sign", "plus", "--sizes", "abc"],
        ["eigen", "--q", "0.5", "--sign", "plus", "--size", "10", "--tol", "1"],
        ["eigen", "--q", "0.5", "--sign", "plus", "--size", "10", "--format", "csv"],
        ["residual", "--q", "0.5", "--sign", "plus", "--size", "10", "--x-grid", "0,0.5"],
        ["eigen", "--q", "-0.5", "--sign", "plus", "--size", "10"],
        ["eigen", "--q", "0.5", "--sign", "plus", "--size", "500"],
    ],
)
def test_usage_errors_exit_one(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_non_convergence_exit_code(tmp_path, monkeypatch):
    def stalled(**params):
        return {"lambda": 1.0, "phi": [1.0], "converged": False, "note": "stalled"}

    monkeypatch.setitem(cli._LOCAL, "eigen", stalled)
    path = tmp_path / "stalled.json"
    code = main(["eigen", "--q", "0.5", "--sign", "plus", "--size", "10", "--output", str(path)])
    assert code == EXIT_NOT_CONVERGED
    # the payload is still written for inspection
    assert json.loads(path.read_text())["note"] == "stalled"


def test_verification_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setitem(
        cli._LOCAL, "verify", lambda **params: {"passed": False, "checks": []}
    )
    assert main(["verify"]) == EXIT_VERIFY_FAILED
    capsys.readouterr()


def test_server_dispatch(monkeypatch, capsys):
    seen = {}

    def fake_fetch(server, command, params):
        seen.update(server=server, command=command, params=params)
        return {"q": 0.5, "sign": "plus", "size": 2, "entries": [[1.0, 0.5], [0.5, 0.25]]}

    monkeypatch.setattr(cli, "_fetch_remote", fake_fetch)
    code = main(
        ["entries", "--q", "0.5", "--sign", "plus", "--size", "2", "--server", "http://h:1"]
    )
    assert code == EXIT_OK
    assert seen == {
        "server": "http://h:1",
        "command": "entries",
        "params": {"q": 0.5, "sign": "plus", "size": 2},
    }
    assert "n0,n1" in capsys.readouterr().out


def test_parse_sizes_forms():
    assert _parse_sizes("5") == [5]
    assert _parse_sizes("1:5") == [1, 2, 3, 4, 5]
    assert _parse_sizes("2,4,10:12") == [2, 4, 10, 11, 12]
    for bad in ("", "5,5", "9,3", "4:2", "x"):
        with pytest.raises(argparse.ArgumentTypeError):
            _parse_sizes(bad)


def test_parse_x_grid_forms():
    assert _parse_x_grid("0.25,0.5") == [0.25, 0.5]
    for bad in ("0,0.5", "1.0", "nope"):
        with pytest.raises(argparse.ArgumentTypeError):
            _parse_x_grid(bad)


def test_parse_config_defaults():
    config = parse_config(["residual", "--q", "0.5", "--sign", "plus", "--size", "10"])
    assert config.x_grid == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert config.tol == 1e-13
    assert config.output == "-"
    assert config.fmt is None
    config = parse_config(["verify"])
    assert config.q == 0.5
    assert config.size == 50


def test_parse_config_raises_cli_error():
    with pytest.raises(CliError) as info:
        parse_config(["eigen", "--q", "0.5", "--sign", "plus", "--size", "1", "--tol", "1e-20"])
    assert info.value.code == EXIT_USAGE


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("farey-spectrum/")


def test_unwritable_output(tmp_path, capsys):
    target = tmp_path / "missing-dir" / "out.csv"
    code = main(["entries", "--q", "0.5", "--sign", "plus", "--size", "2", "--output", str(target)])
    assert code == EXIT_USAGE
    assert "cannot write" in capsys.readouterr().err
