import json

import numpy as np
import pytest

import registry
from errors import EXIT_IO, EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION
from main import build_parser, config_from_args, main
from runner import ensure_commands, run

NON_SELF_MAP = json.dumps(
    {
        "variant": "polynomial",
        "dim": 1,
        "terms": [{"index": [0], "coeff": [0.6, 0.0]}, {"index": [1], "coeff": [0.6, 0.0]}],
    }
)


def _error(capsys) -> dict:
    line = capsys.readouterr().err.strip().splitlines()[-1]
    return json.loads(line)


def test_clark_report_written(tmp_path):
    out = tmp_path / "r.json"
    code = run({"command": "clark", "symbol": "half_plus_half_z", "alpha": "1", "out": str(out)})
    assert code == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["ok"] is True
    assert report["command"] == "clark"
    assert report["result"]["clark"]["total_mass"] == pytest.approx(3.0)
    assert report["result"]["clark"]["singular_mass"] == pytest.approx(2.0, abs=1e-8)
    meta = json.loads((tmp_path / "r.json.meta.json").read_text(encoding="utf-8"))
    assert meta["config_hash"] == report["config_hash"]


def test_reports_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert run({"command": "clark", "symbol": "z2", "alpha": "i", "out": str(path)}) == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_missing_symbol_is_io_error(capsys):
    assert run({"command": "clark", "symbol": "no_such_symbol", "alpha": "1"}) == EXIT_IO
    assert _error(capsys)["error_code"] == EXIT_IO


def test_validation_exits(capsys):
    assert run({"command": "clark", "symbol": "z", "alpha": "0.5"}) == EXIT_VALIDATION
    assert run({"command": "clark", "symbol": NON_SELF_MAP, "alpha": "1"}) == EXIT_VALIDATION
    envelope = _error(capsys)
    assert envelope["ok"] is False
    assert "validate_schwarz" in envelope["description"]


def test_unknown_command_and_missing_symbol(capsys):
    assert run({"command": "nope"}) == EXIT_VALIDATION
    assert run({"command": "clark"}) == EXIT_VALIDATION
    assert "needs --symbol" in _error(capsys)["description"]
    assert run({"command": "validate"}) == EXIT_VALIDATION
    assert "validate needs --symbol" in _error(capsys)["description"]


def test_csv_table(tmp_path):
    out = tmp_path / "masses.csv"
    code = run(
        {
            "command": "clark",
            "symbol": "half_plus_half_z",
            "alpha_nodes": 16,
            "format": "csv",
            "out": str(out),
        }
    )
    assert code == EXIT_OK
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "alpha_arg,total_mass,ac_mass,ac_mass_se,singular_mass"
    assert len(lines) == 17
    assert (tmp_path / "masses.csv.meta.json").exists()


def test_parser_collects_command_options():
    ensure_commands()
    ns = build_parser().parse_args(
        ["clark", "--symbol", "z", "--alpha", "i", "--radii", "0.5,0.9", "--identities", "3", "--seed", "4"]
    )
    config = config_from_args(ns)
    assert config["command"] == "clark"
    assert config["radii"] == [0.5, 0.9]
    assert config["seed"] == 4
    assert config["options"] == {"identities": 3, "slice_route": False}


def test_main_runs_clark(tmp_path):
    out = tmp_path / "m.json"
    assert main(["clark", "--symbol", "z3", "--alpha", "-1", "--out", str(out), "--quiet"]) == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert len(report["result"]["clark"]["atoms"]) == 3


def test_main_verify_quick_subset(tmp_path):
    out = tmp_path / "v.json"
    code = main(["verify", "--suite", "quick", "--only", "mass-budget", "--out", str(out)])
    assert code == EXIT_OK
    report = json.loads(out.read_text(encoding="utf-8"))
    assert list(report["result"]["checks"]) == ["mass-budget"]
    assert report["result"]["passed"] is True


def test_modelspace_member_for_singular_inner(tmp_path):
    symbol = json.dumps({"variant": "singular-inner", "atoms": [{"point": [1.0, 0.0], "mass": 1.0}]})
    out = tmp_path / "ms.json"
    assert main(["modelspace", "--symbol", symbol, "--member", "1", "--out", str(out), "--quiet"]) == EXIT_OK
    membership = json.loads(out.read_text(encoding="utf-8"))["result"]["membership"]
    assert membership["verdict"] == "not-member"


def test_rational_pole_inside_is_rejected(capsys):
    symbol = json.dumps(
        {
            "variant": "rational",
            "dim": 1,
            "numerator": [{"index": [0], "coeff": [0.1, 0.0]}],
            "denominator": [{"index": [0], "coeff": [1.0, 0.0]}, {"index": [1], "coeff": [-2.0, 0.0]}],
        }
    )
    assert run({"command": "clark", "symbol": symbol, "alpha": "1"}) == EXIT_VALIDATION
    assert "closed disk" in _error(capsys)["description"]


def test_unexpected_errors_use_numerical_exit(monkeypatch, capsys):
    ensure_commands()
    info = registry.get_registered_commands()["corpus"]

    def broken(config):
        raise np.linalg.LinAlgError("singular matrix")

    monkeypatch.setattr(info, "handler", broken)
    assert run({"command": "corpus"}) == EXIT_NUMERICAL
    envelope = _error(capsys)
    assert envelope["error_code"] == EXIT_NUMERICAL
    assert "LinAlgError: singular matrix" in envelope["description"]
