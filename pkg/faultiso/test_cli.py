import pandas as pd
import yaml

from faultiso.cli import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_PIPELINE_ERROR, build_parser, main


def test_parser_defaults():
    args = build_parser().parse_args(["run"])
    assert args.config == "scenario1"
    assert args.out is None and args.seed is None


def test_reference_config(capsys):
    assert main(["reference-config"]) == EXIT_OK
    document = yaml.safe_load(capsys.readouterr().out)
    assert document["L"] == 15


def test_run_writes_decisions(tmp_path):
    assert main(["run", "--config", "scenario1", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    decisions = pd.read_csv(tmp_path / "decisions.csv", keep_default_na=False)
    assert decisions.loc[100, "decision"] == "ambiguous(a1|s2)"
    assert decisions.loc[100, "truth"] == "a1"


def test_simulate_fit_classify(tmp_path):
    fitted = tmp_path / "fitted"
    classified = tmp_path / "classified"
    assert main(["simulate", "--out", str(fitted), "--quiet"]) == EXIT_OK
    assert main(["fit", "--out", str(fitted), "--quiet"]) == EXIT_OK
    assert (fitted / "filter.json").exists() and (fitted / "dictionaries.json").exists()

    code = main([
        "classify", "--trajectory", str(fitted / "trajectory.csv"),
        "--filter-dir", str(fitted), "--out", str(classified), "--quiet",
    ])
    assert code == EXIT_OK
    decisions = pd.read_csv(classified / "decisions.csv", keep_default_na=False)
    assert decisions.loc[20, "decision"] == "a1"
    assert "transient" in decisions.columns


def test_discern_report(tmp_path):
    assert main(["discern", "--out", str(tmp_path), "--quiet"]) == EXIT_OK
    assert (tmp_path / "discernibility.json").exists()


def test_invalid_config_exit_code(tmp_path):
    path = tmp_path / "bad.yaml"
    path.write_text("L: 1\n")
    assert main(["run", "--config", str(path), "--quiet"]) == EXIT_CONFIG_ERROR
    assert main(["run", "--seed", "-1", "--quiet"]) == EXIT_CONFIG_ERROR


def test_missing_config_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "missing.yaml"), "--quiet"]) == EXIT_PIPELINE_ERROR
