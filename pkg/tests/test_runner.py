"""Tests for the experiment registry, report formats, and the CLI."""

import json

import pytest

from chslab.cli import load_config, main
from chslab.errors import ConfigInvalid
from chslab.registry import (
    ExperimentConfig,
    REGISTRY,
    SUITES,
    derive_seed,
    report_to_csv_rows,
    report_to_json,
    run,
    run_suite,
    suite_experiments,
)

REPORT_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["experiment", "params", "seed", "checks", "toolchain",
                     "passed"],
        "properties": {
            "experiment": {"type": "string"},
            "seed": {"type": "integer"},
            "passed": {"type": "boolean"},
            "toolchain": {"type": "object"},
            "checks": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["name", "value", "reference", "mode",
                                 "passed", "runtime_ms"],
                    "properties": {
                        "mode": {"enum": ["exact", "sampled"]},
                        "passed": {"type": "boolean"},
                    },
                },
            },
        },
    },
}


class TestRegistry:
    def test_every_experiment_belongs_to_a_suite(self):
        for name, entry in REGISTRY.items():
            assert entry.suites, name
            assert all(s in SUITES for s in entry.suites)
            assert entry.encodes

    def test_suite_membership(self):
        assert suite_experiments("all") == list(REGISTRY)
        for suite in ("lemmas", "bounds", "montecarlo"):
            names = suite_experiments(suite)
            assert names
            assert all(suite in REGISTRY[n].suites for n in names)

    def test_unknown_suite(self):
        with pytest.raises(ConfigInvalid):
            suite_experiments("nope")

    def test_run_unknown_experiment(self):
        with pytest.raises(ConfigInvalid):
            run(ExperimentConfig("missing"))

    def test_run_unknown_parameter(self):
        with pytest.raises(ConfigInvalid):
            run(ExperimentConfig("kneser", {"vv": 5}))

    def test_kneser_experiment_passes(self):
        report = run(ExperimentConfig("kneser", {"v": 5, "k": 2}, seed=1))
        assert report.passed
        by_name = {c.name: c for c in report.checks}
        assert by_name["one-norm-vs-formula"].value == pytest.approx(16.0)
        assert by_name["one-norm-vs-formula"].reference == pytest.approx(16.0)

    def test_tolerance_override_can_fail_a_check(self):
        report = run(ExperimentConfig("kneser", {"v": 5, "k": 2},
                                      tolerances={"kneser": -1.0}))
        assert not report.passed

    def test_prs_hybrid_records_bound_and_contracts(self):
        report = run(ExperimentConfig("prs-hybrid",
                                      {"lam": 2, "n": 2, "ell": 1, "t": 1}))
        assert report.passed
        names = [c.name for c in report.checks]
        assert "trace-distance" in names
        assert "keyed-trace" in names

    def test_deterministic_reports(self):
        a = run(ExperimentConfig("good-type-prob", {"trials": 20000}, seed=7))
        b = run(ExperimentConfig("good-type-prob", {"trials": 20000}, seed=7))
        for ca, cb in zip(a.checks, b.checks):
            assert repr(ca.value) == repr(cb.value)
            assert ca.passed == cb.passed

    def test_seed_changes_sampled_values(self):
        a = run(ExperimentConfig("good-type-prob", {"trials": 20000}, seed=7))
        b = run(ExperimentConfig("good-type-prob", {"trials": 20000}, seed=8))
        va = [c.value for c in a.checks if c.name == "mc-estimate"]
        vb = [c.value for c in b.checks if c.name == "mc-estimate"]
        assert va != vb

    def test_derive_seed_stable(self):
        assert derive_seed(0, 3) == derive_seed(0, 3)
        assert derive_seed(0, 3) != derive_seed(0, 4)
        assert derive_seed(0, 3) != derive_seed(1, 3)


class TestSuiteRun:
    def test_lemmas_suite_green(self):
        reports = run_suite("lemmas", seed=5)
        assert all(r.passed for r in reports)

    def test_parallel_matches_serial(self):
        # identical modulo runtime_ms, which is wall-clock metadata
        serial = run_suite("lemmas", seed=5, jobs=1)
        parallel = run_suite("lemmas", seed=5, jobs=2)
        def strip(reports):
            return [
                (r.experiment, r.seed,
                 [(c.name, repr(c.value), repr(c.reference), c.mode, c.passed)
                  for c in r.checks])
                for r in reports
            ]
        assert strip(serial) == strip(parallel)


class TestReportFormats:
    def test_json_schema_valid(self):
        jsonschema = pytest.importorskip("jsonschema")
        reports = run_suite("lemmas", seed=2)
        payload = json.loads(report_to_json(reports))
        jsonschema.validate(payload, REPORT_SCHEMA)

    def test_csv_rows(self):
        report = run(ExperimentConfig("kneser", {"v": 5, "k": 2}))
        rows = report_to_csv_rows(report)
        assert rows[0][0] == "experiment"
        assert len(rows) == 1 + len(report.checks)


class TestCli:
    def write_config(self, tmp_path, body):
        cfg = tmp_path / "exp.ini"
        cfg.write_text(body)
        return str(cfg)

    def test_run_config(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, """
[experiment]
name = kneser
seed = 11

[params]
v = 5
k = 2

[output]
path = {out}
format = json
""".format(out=tmp_path / "kneser.json"))
        code = main(["run", cfg])
        assert code == 0
        payload = json.loads((tmp_path / "kneser.json").read_text())
        assert payload[0]["experiment"] == "kneser"
        assert payload[0]["passed"] is True
        out = capsys.readouterr().out
        assert "one-norm-vs-formula" in out and "pass" in out

    def test_run_with_list_params(self, tmp_path):
        cfg = self.write_config(tmp_path, """
[experiment]
name = prs-decay

[params]
lams = 2,3
""")
        assert main(["--out", str(tmp_path / "d.json"), "run", cfg]) == 0

    def test_seed_override_and_csv(self, tmp_path):
        cfg = self.write_config(tmp_path, """
[experiment]
name = kneser
""")
        out = tmp_path / "k.csv"
        assert main(["--seed", "3", "--format", "csv", "--out", str(out),
                     "run", cfg]) == 0
        assert out.read_text().startswith("experiment,seed,check")

    def test_failing_check_exits_one(self, tmp_path):
        cfg = self.write_config(tmp_path, """
[experiment]
name = kneser

[tolerances]
kneser = -1
""")
        assert main(["--out", str(tmp_path / "f.json"), "run", cfg]) == 1

    def test_unknown_experiment_exits_two(self, tmp_path):
        cfg = self.write_config(tmp_path, """
[experiment]
name = not-an-experiment
""")
        assert main(["--out", str(tmp_path / "x.json"), "run", cfg]) == 2

    def test_missing_config_exits_two(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.ini")]) == 2

    def test_suite_and_outdir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("CHSLAB_OUTDIR", str(tmp_path / "reports"))
        assert main(["--seed", "4", "suite", "lemmas"]) == 0
        written = list((tmp_path / "reports").glob("suite-lemmas-4.json"))
        assert len(written) == 1

    def test_list_command(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "kneser" in out and "rank-attack" in out

    def test_load_config_validation(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[params]\nv = 5\n")
        with pytest.raises(ConfigInvalid):
            load_config(str(bad))
