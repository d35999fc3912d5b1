import json

import pytest

from splitsolve.main import main, parse_alpha
from splitsolve.exceptions import ConfigurationError
from splitsolve.problems import import_problem


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_solve_example1(capsys):
    assert main(["solve", "--example", "1", "--m", "32", "--method", "tscsp", "--alpha", "0.46",
                 "--format", "json"]) == 0
    record = _json_out(capsys)
    assert record["method"] == "tscsp"
    assert record["n"] == 1024
    assert record["converged"] is True
    assert abs(record["iterations"] - 7) <= 1
    assert record["final_relres"] < 1e-6


def test_solve_example4_gsor(capsys):
    assert main(["solve", "--example", "4", "--n", "1024", "--method", "gsor", "--alpha", "0.425",
                 "--format", "json"]) == 0
    assert abs(_json_out(capsys)["iterations"] - 25) <= 2


def test_solve_squared_size_uses_tabulated_alpha(capsys):
    assert main(["solve", "--example", "4", "--n", "32^2", "--format", "json"]) == 0
    record = _json_out(capsys)
    assert record["alpha"] == 0.22
    assert record["n"] == 1024


def test_solve_keyword_selects_tabulated_value(capsys):
    assert main(["solve", "--example", "4", "--n", "32^2", "--alpha", "paper", "--format", "json"]) == 0
    record = _json_out(capsys)
    assert record["alpha"] == 0.22
    assert abs(record["iterations"] - 11) <= 2


def test_solve_all_methods_csv_with_history(capsys):
    assert main(["solve", "--example", "4", "--n", "64", "--method", "all", "--alpha", "0.3",
                 "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "example,method,alpha,n,iterations,converged,final_relres,seconds"
    assert len(lines) == 6

    assert main(["solve", "--example", "4", "--n", "64", "--alpha", "0.5", "--history",
                 "--format", "json"]) == 0
    record = _json_out(capsys)
    assert len(record["residual_history"]) == record["iterations"] + 1


def test_solve_markdown_to_file(tmp_path):
    out = tmp_path / "reports" / "solve.md"
    assert main(["solve", "--example", "1", "--m", "8", "--alpha", "0.5", "--out", str(out)]) == 0
    text = out.read_text()
    assert "## TSCSP on example 1 (n = 64)" in text
    assert "- converged: yes" in text


def test_spectrum_example4(capsys, tmp_path):
    curve = tmp_path / "rho.csv"
    assert main(["spectrum", "--example", "4", "--n", "64", "--format", "json",
                 "--grid", "0.05:1.0:0.05", "--curve", str(curve)]) == 0
    record = _json_out(capsys)
    assert record["alpha_opt_product"] == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < record["rho_opt"] < 1.0
    assert record["case"] == "straddling"

    lines = curve.read_text().strip().splitlines()
    assert lines[0] == "alpha,rho"
    assert len(lines) == 21


def test_spectrum_example1(capsys):
    assert main(["spectrum", "--example", "1", "--m", "16", "--format", "json"]) == 0
    record = _json_out(capsys)
    assert record["rho_opt"] < 1.0
    assert record["mu_min"] > 0.0


def test_tune_identical_synthetic(capsys, tmp_path):
    grid_out = tmp_path / "grid.csv"
    assert main(["tune", "--example", "synthetic", "--n", "12", "--identical", "--grid", "0.5:1.5:0.1",
                 "--format", "json", "--grid-out", str(grid_out)]) == 0
    record = _json_out(capsys)
    assert record["best_alpha"] == pytest.approx(1.0)
    assert record["best_iterations"] == 1
    assert record["grid_points"] == 11
    assert grid_out.read_text().splitlines()[0] == "alpha,iterations"


def test_reproduce_table_example1(capsys):
    assert main(["reproduce-table", "--example", "1", "--sizes", "32", "--format", "json"]) == 0
    table = _json_out(capsys)
    assert table["sizes"] == [32]
    assert len(table["cells"]) == 5
    tscsp = next(cell for cell in table["cells"] if cell["method"] == "tscsp")
    assert abs(tscsp["iterations"] - 7) <= 1
    assert tscsp["alpha_source"] == "table"


def test_reproduce_table_example3_gsor_markdown(capsys):
    assert main(["reproduce-table", "--example", "3", "--sizes", "32", "--method", "gsor"]) == 0
    text = capsys.readouterr().out
    assert "| GSOR | alpha | 0.776 |" in text
    iter_row = next(line for line in text.splitlines() if "| Iter |" in line)
    assert abs(int(iter_row.split("|")[3]) - 11) <= 2


def test_export_writes_matrix_market(tmp_path):
    out = tmp_path / "ex1"
    assert main(["export", "--example", "1", "--m", "8", "--out", str(out)]) == 0
    header = next(line for line in (out / "W.mtx").read_text().splitlines() if not line.startswith("%"))
    assert header.split()[:2] == ["64", "64"]
    assert import_problem(out).n == 64


def test_export_default_directory(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["export", "--example", "4", "--n", "16"]) == 0
    assert (tmp_path / "results" / "example-4-n16" / "problem.json").exists()


def test_config_file_overrides_tolerance(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"tolerance": 1e-2, "format": "json"}))
    assert main(["solve", "--example", "1", "--m", "16", "--alpha", "0.46", "--config", str(config)]) == 0
    assert _json_out(capsys)["final_relres"] < 1e-2

    config.write_text(json.dumps({"colour": "blue"}))
    assert main(["solve", "--example", "1", "--m", "16", "--config", str(config)]) == 1


def test_invalid_alpha_reports_json_error(capsys):
    assert main(["solve", "--example", "1", "--m", "8", "--alpha", "0", "--error-json"]) == 1
    error = _json_out(capsys)
    assert error["error"] == "ConfigurationError"
    assert "positive" in error["message"]


@pytest.mark.parametrize("argv", [
    ["reproduce-table", "--example", "1", "--sizes", ","],
    ["solve", "--example", "1", "--m", "300"],
    ["solve", "--example", "4", "--n", "70000"],
    ["solve", "--example", "1"],
    ["spectrum", "--example", "1", "--m", "32"],
    ["solve", "--example", "1", "--m", "8", "--grid", "2:1:0.1"],
])
def test_rejected_requests_exit_with_one(argv):
    assert main(argv) == 1


def test_export_to_unwritable_path(tmp_path):
    blocker = tmp_path / "file.txt"
    blocker.write_text("not a directory")
    assert main(["export", "--example", "4", "--n", "8", "--out", str(blocker / "sub")]) == 1


def test_parse_alpha():
    assert parse_alpha("paper") == "paper"
    assert parse_alpha("table") == "table"
    assert parse_alpha("grid") == "grid"
    assert parse_alpha("0.25") == 0.25
    for text in ("-1", "nan", "abc"):
        with pytest.raises(ConfigurationError):
            parse_alpha(text)


TUNE_IDENTICAL = ["tune", "--example", "synthetic", "--n", "12", "--identical", "--grid", "0.5:1.5:0.1",
                  "--format", "json"]


def test_tune_stores_result_unless_no_cache(capsys, isolated_cache):
    assert main(TUNE_IDENTICAL + ["--no-cache"]) == 0
    assert _json_out(capsys)["best_alpha"] == pytest.approx(1.0)
    assert not list(isolated_cache.glob("*.tune.json"))

    assert main(TUNE_IDENTICAL) == 0
    capsys.readouterr()
    assert len(list(isolated_cache.glob("*.tune.json"))) == 1


def test_clear_cache_flag(capsys, isolated_cache):
    assert main(TUNE_IDENTICAL) == 0
    capsys.readouterr()
    assert list(isolated_cache.glob("*.tune.json"))

    assert main(TUNE_IDENTICAL + ["--clear-cache", "--no-cache"]) == 0
    assert _json_out(capsys)["best_iterations"] == 1
    assert not list(isolated_cache.glob("*.tune.json"))
