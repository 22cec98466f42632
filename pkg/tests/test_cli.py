"""Tests for the experiment runner."""

import json

import pytest

from periodlab.cli import ExperimentConfig, list_experiments, main, run


class TestCatalog:
    def test_size(self):
        assert len(list_experiments()) == 9

    def test_entries_documented(self):
        catalog = list_experiments()
        assert "kuznecov" in catalog
        assert "linear growth" in catalog["kuznecov"]["claim"]
        assert "hyperbolic-lemma" in catalog
        assert "critical" in catalog["hyperbolic-lemma"]["claim"]
        for info in catalog.values():
            assert info["claim"]
            assert "," in info["columns"]


class TestRunner:
    def test_bounds_outputs(self, tmp_path):
        out = str(tmp_path / "bounds")
        cfg = ExperimentConfig(experiment="bounds", lambda_max=20.0, out=out)
        table = run(cfg)
        assert table.all_passed
        lines = open(out + ".csv").read().splitlines()
        meta = [l for l in lines if l.startswith("#")]
        assert any("experiment: bounds" in l for l in meta)
        header = [l for l in lines if not l.startswith("#")][0]
        assert header == "j,lambda,a_j,abs_a_j"
        data = [l for l in lines if not l.startswith("#")][1:]
        assert all(len(l.split(",")) == 4 for l in data)
        side = json.load(open(out + ".json"))
        assert side["all_passed"] is True
        assert "slope" in side["fits"]
        assert all(set(c) >= {"name", "value", "threshold", "passed"}
                   for c in side["criteria"])

    def test_byte_identical_rerun(self, tmp_path):
        out1 = str(tmp_path / "a")
        out2 = str(tmp_path / "b")
        run(ExperimentConfig(experiment="kuznecov", grid=(5.0, 10.0, 15.0),
                             out=out1))
        run(ExperimentConfig(experiment="kuznecov", grid=(5.0, 10.0, 15.0),
                             out=out2))
        csv1 = open(out1 + ".csv").read().replace(out1, "X")
        csv2 = open(out2 + ".csv").read().replace(out2, "X")
        assert csv1 == csv2

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ValueError):
            run(ExperimentConfig(experiment="nope"))


class TestMainEntry:
    def test_usage_error_exit_code(self, capsys):
        assert main(["bogus-experiment"]) == 1

    def test_bad_flag_value(self, tmp_path):
        assert main(["bounds", "--lambda-max", "-3",
                     "--out", str(tmp_path / "x")]) == 1

    def test_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "kuznecov" in out and "columns:" in out

    def test_pass_run(self, tmp_path, capsys):
        code = main(["kuznecov", "--grid", "10,20,30",
                     "--out", str(tmp_path / "k")])
        out = capsys.readouterr().out
        assert code == 0
        assert "[PASS]" in out

    def test_failing_criterion_exit_code(self, tmp_path, capsys):
        # the restriction experiment carries the documented red clause
        code = main(["restriction", "--grid", "50,100,144,200",
                     "--out", str(tmp_path / "r")])
        out = capsys.readouterr().out
        assert code == 2
        assert "[FAIL] restriction/zonal_decrease" in out
        side = json.load(open(str(tmp_path / "r") + ".json"))
        assert side["all_passed"] is False

    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfgfile = tmp_path / "cfg"
        cfgfile.write_text("grid = 10,20\nout = {}\n".format(tmp_path / "c1"))
        code = main(["kuznecov", "--config", str(cfgfile),
                     "--grid", "10,20,30"])
        assert code == 0
        side = json.load(open(str(tmp_path / "c1") + ".json"))
        assert side["config"]["grid"] == [10.0, 20.0, 30.0]
