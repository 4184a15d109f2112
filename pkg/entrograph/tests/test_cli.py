import json

import pytest

from entrograph.cli.main import main
from entrograph.core.config import settings
from entrograph.systems.catalog import system_names


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.parametrize("a,b,relation", [
    ("2*n+5", "n", "equivalent"),
    ("n^2", "n", "greater"),
    ("n", "2^n", "less"),
])
def test_orders_compare(capsys, a, b, relation):
    """Test the relation printed for two closed forms."""
    code, out, _ = run_cli(capsys, "orders", "compare", "--a", a, "--b", b)
    assert code == 0
    assert out.strip() == relation


def test_orders_project(capsys):
    """Test the polynomial projection of n^2."""
    code, out, _ = run_cli(capsys, "orders", "project", "--p", "n^2")
    assert code == 0
    assert float(out) == pytest.approx(2.0, abs=0.01)


def test_orders_project_overflowing_exponential(capsys):
    """Test the exponential projection of exp(3n), which overflows a float at N = 256."""
    code, out, _ = run_cli(capsys, "orders", "project", "--p", "exp(3*n)", "--kind", "exp")
    assert code == 0
    assert float(out) == pytest.approx(3.0, abs=1e-6)
    code, out, _ = run_cli(capsys, "orders", "classify", "--a", "exp(3*n)")
    assert code == 0
    assert out.startswith("exponential")


def test_orders_invariance_json(capsys):
    """Test 2^n is not linearly invariant, as JSON."""
    code, out, _ = run_cli(capsys, "orders", "invariance", "--a", "2^n", "--m", "2", "--json")
    assert code == 0
    assert json.loads(out)["invariant"] is False


def test_orders_sup_and_classify(capsys):
    """Test the sup of two sequences and a classification."""
    code, out, _ = run_cli(capsys, "orders", "sup", "n", "n^2")
    assert (code, out.strip()) == (0, "polynomial")
    code, out, _ = run_cli(capsys, "orders", "classify", "--a", "3*n+2")
    assert code == 0
    assert out.startswith("linear")


def test_orders_classify_csv(capsys, tmp_path):
    """Test classifying a column of a results CSV."""
    path = tmp_path / "entropy.csv"
    path.write_text("n,s\n" + "".join(f"{n},{n * n}\n" for n in range(1, 65)))
    code, out, _ = run_cli(capsys, "orders", "classify", "--csv", str(path), "--column", "s")
    assert code == 0
    assert out.startswith("polynomial")


def test_parse_error_points_at_token(capsys):
    """Test expression errors exit 4 with a caret under the bad token."""
    code, _, err = run_cli(capsys, "orders", "compare", "--a", "n +", "--b", "n")
    assert code == 4
    assert "^" in err


def test_bad_arguments_exit_two():
    """Test argparse rejects unknown choices."""
    with pytest.raises(SystemExit) as info:
        main(["orders", "project", "--p", "n", "--kind", "cubic"])
    assert info.value.code == 2


def test_unknown_system(capsys, tmp_path):
    """Test unknown catalog names exit 3."""
    code, _, err = run_cli(capsys, "entropy", "--system", "henon", "--horizon", "16", "--out", str(tmp_path))
    assert code == 3
    assert "henon" in err


def test_short_horizon(capsys, tmp_path):
    """Test horizons below 16 are input errors."""
    code, _, _ = run_cli(capsys, "entropy", "--system", "rotation", "--horizon", "8", "--out", str(tmp_path))
    assert code == 4


def test_entropy_run_writes_results(capsys, tmp_path):
    """Test a small rotation profile end to end."""
    code, out, _ = run_cli(
        capsys,
        "entropy", "--system", "rotation", "--param", "alpha=1/4", "--compact", "coarse",
        "--levels", "3,4", "--horizon", "16", "--out", str(tmp_path),
    )
    assert code == 0
    assert "aggregate: bounded (stable)" in out
    assert (tmp_path / "entropy.csv").exists()
    report = json.loads((tmp_path / "entropy.json").read_text())
    assert report["config"]["levels"] == [3, 4]
    assert report["config"]["params"] == {"alpha": "1/4"}


def test_entropy_run_from_config_file(capsys, tmp_path):
    """Test a key = value config file with a command-line override."""
    config = tmp_path / "rotation.conf"
    config.write_text("system = rotation\ncompact = coarse\nlevels = 3..4\nhorizon = 32\n" 'params = {"alpha": "1/4"}\n')
    code, out, _ = run_cli(capsys, "entropy", "--config", str(config), "--horizon", "16", "--out", str(tmp_path), "--json")
    assert code == 0
    assert json.loads(out)["config"]["horizon"] == 16


def test_coding_run(capsys, tmp_path):
    """Test the bundled interval family on the translation line."""
    code, out, _ = run_cli(
        capsys,
        "coding", "--system", "translation-line", "--family", "translation-line-interval",
        "--horizon", "16", "--out", str(tmp_path),
    )
    assert code == 0
    assert out.splitlines()[0].startswith("c(16) = 17 [exact]")
    assert "versus n: equivalent" in out
    assert "unit: wandering" in out
    assert (tmp_path / "coding.csv").exists()


def test_coding_needs_family(capsys, tmp_path):
    """Test coding without a family."""
    code, _, _ = run_cli(capsys, "coding", "--system", "translation-line", "--horizon", "16", "--out", str(tmp_path))
    assert code == 4


def test_coding_rejects_invalid_family(capsys, tmp_path):
    """Test family validation failures exit 5."""
    family = tmp_path / "square.json"
    family.write_text(json.dumps({"members": [{"label": "sq", "shape": {"rect": [0, 1, 0, 1]}}]}))
    code, _, _ = run_cli(
        capsys, "coding", "--system", "translation-line", "--family", str(family), "--horizon", "16", "--out", str(tmp_path)
    )
    assert code == 5


def test_systems_listing(capsys):
    """Test the catalog listing."""
    code, out, _ = run_cli(capsys, "systems", "--json")
    assert code == 0
    assert [row["system"] for row in json.loads(out)] == system_names()


def test_schema(capsys):
    """Test the report schema is printed as JSON."""
    code, out, _ = run_cli(capsys, "schema")
    assert code == 0
    assert "config_hash" in json.loads(out)["properties"]


def test_runs_are_recorded(capsys, tmp_path, monkeypatch):
    """Test a command lands in the run ledger."""
    monkeypatch.setattr(settings, "record_runs", True)
    code, _, _ = run_cli(
        capsys,
        "entropy", "--system", "rotation", "--param", "alpha=1/4", "--compact", "coarse",
        "--levels", "3,4", "--horizon", "16", "--out", str(tmp_path),
    )
    assert code == 0
    code, out, _ = run_cli(capsys, "runs", "--json")
    assert code == 0
    runs = json.loads(out)
    assert len(runs) == 1
    assert runs[0]["command"] == "entropy"
    assert runs[0]["status"] == "completed"
    assert runs[0]["system"] == "rotation"


def test_no_runs(capsys):
    """Test an empty ledger."""
    code, out, _ = run_cli(capsys, "runs")
    assert code == 0
    assert out.strip() == "no runs recorded"
