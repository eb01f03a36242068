import subprocess
import sys

import pytest

from approvalrobust import Rule, committee_difference, compute_committee, load_election
from approvalrobust.cli import main

from test_elections import WITNESS_K2_TEXT

AFTER_TEXT = "m 4\n1: 0 2\n1: 0 3\n1: 1 2\n1: 1 3\n1: 2\n"

EXPERIMENT_CFG = (
    "rules = av, greedypav\n"
    "ops = remove\n"
    "p = 0.3\n"
    "phi = 1\n"
    "levels = 0, 0.2\n"
    "elections_per_cell = 4\n"
    "m = 8\n"
    "n = 8\n"
    "k = 2\n"
)


@pytest.fixture
def witness_file(tmp_path):
    path = tmp_path / "before.appel"
    path.write_text(WITNESS_K2_TEXT)
    return str(path)


@pytest.fixture
def after_file(tmp_path):
    path = tmp_path / "after.appel"
    path.write_text(AFTER_TEXT)
    return str(path)


class TestCompute:
    def test_greedycc_committee(self, witness_file, capsys):
        assert main(["compute", "--rule", "greedycc", "--k", "2", "--election", witness_file]) == 0
        assert capsys.readouterr().out == "0 1\n"

    def test_phragmen_trace_shows_exact_times(self, after_file, capsys):
        rc = main(["compute", "--rule", "phragmen", "--k", "2", "--election", after_file, "--trace"])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "2 3"
        assert out[1] == "purchase 2 1/3"
        assert out[2] == "purchase 3 1/2"

    def test_greedy_trace_shows_marginals(self, after_file, capsys):
        rc = main(["compute", "--rule", "greedypav", "--k", "2", "--election", after_file, "--trace"])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert out[1] == "select 2 3"
        assert out[2] == "select 3 2"

    def test_k_exceeding_m_is_domain_error(self, witness_file, capsys):
        assert main(["compute", "--rule", "av", "--k", "5", "--election", witness_file]) == 2
        assert "exceeds m" in capsys.readouterr().err

    def test_tie_order_flag_overrides(self, witness_file, capsys):
        rc = main(
            ["compute", "--rule", "av", "--k", "2", "--election", witness_file,
             "--tie-order", "3,2,1,0"]
        )
        assert rc == 0
        assert capsys.readouterr().out == "2 3\n"

    def test_missing_file_is_domain_error(self, tmp_path):
        assert main(["compute", "--rule", "av", "--k", "2", "--election", str(tmp_path / "x")]) == 2


class TestRadius:
    def test_yes_with_witness_edit(self, witness_file, capsys):
        rc = main(
            ["radius", "--rule", "av", "--op", "add", "--budget", "1", "--k", "2",
             "--election", witness_file]
        )
        assert rc == 0
        assert capsys.readouterr().out == "yes\n4 2\n"

    def test_budget_zero_is_no(self, witness_file, capsys):
        rc = main(
            ["radius", "--rule", "av", "--op", "add", "--budget", "0", "--k", "2",
             "--election", witness_file]
        )
        assert rc == 0
        assert capsys.readouterr().out == "no\n"

    def test_minimize_reports_radius(self, witness_file, capsys):
        rc = main(
            ["radius", "--rule", "greedycc", "--op", "add", "--budget", "2", "--k", "2",
             "--election", witness_file, "--minimize"]
        )
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "yes"
        assert out[1] == "radius 1"

    def test_cap_refusal_exit_code(self, witness_file, capsys):
        rc = main(
            ["radius", "--rule", "av", "--op", "add", "--budget", "3", "--k", "2",
             "--election", witness_file, "--cap", "10"]
        )
        assert rc == 3
        assert "refused" in capsys.readouterr().err


class TestWitness:
    def test_writes_pair_with_disjoint_committees(self, tmp_path, capsys):
        out_dir = tmp_path / "w"
        rc = main(["witness", "--rule", "phragmen", "--k", "3", "--out-dir", str(out_dir)])
        assert rc == 0
        assert capsys.readouterr().out == "before 0 1 2\nafter 3 4 5\n"
        before = load_election(out_dir / "before.appel")
        after = load_election(out_dir / "after.appel")
        cb = compute_committee(before, Rule.PHRAGMEN, 3)
        ca = compute_committee(after, Rule.PHRAGMEN, 3)
        assert committee_difference(cb, ca) == 3
        assert (out_dir / "witness.txt").exists()

    def test_k1_is_domain_error(self, tmp_path):
        assert main(["witness", "--rule", "greedycc", "--k", "1", "--out-dir", str(tmp_path)]) == 2


class TestReduce:
    def test_sidecar_states_committee_and_budget(self, tmp_path, capsys):
        rx3c = tmp_path / "inst.rx3c"
        rx3c.write_text(
            "n 2\nS1: 0 1 3\nS2: 0 1 2\nS3: 3 4 5\nS4: 0 2 4\nS5: 1 2 5\nS6: 3 4 5\n"
        )
        out_dir = tmp_path / "red"
        rc = main(
            ["reduce", "--rule", "greedycc", "--op", "add", "--rx3c", str(rx3c),
             "--out-dir", str(out_dir), "--scaled", "600:18"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "k 7" in out and "budget 2" in out
        sidecar = (out_dir / "reduction.txt").read_text()
        assert "k 7" in sidecar
        assert "budget 2" in sidecar
        assert "T 600" in sidecar and "t 18" in sidecar
        assert "constants_ok true" in sidecar
        election = load_election(out_dir / "election.appel")
        assert election.num_candidates == 8

    def test_invalid_instance_is_domain_error(self, tmp_path, capsys):
        rx3c = tmp_path / "bad.rx3c"
        rx3c.write_text("n 1\nS1: 0 1 2\nS2: 0 1 2\nS3: 0 1 1\n")
        rc = main(
            ["reduce", "--rule", "phragmen", "--op", "add", "--rx3c", str(rx3c),
             "--out-dir", str(tmp_path / "o")]
        )
        assert rc == 2


class TestPerturb:
    def test_output_parses_and_is_deterministic(self, witness_file, capsys):
        args = ["perturb", "--op", "add", "--level", "0.5", "--seed", "9",
                "--election", witness_file]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first
        from approvalrobust import parse_election

        parse_election(first)

    def test_weighted_election_is_domain_error(self, tmp_path):
        path = tmp_path / "w.appel"
        path.write_text("m 2\n3: 0\n")
        rc = main(["perturb", "--op", "add", "--level", "0.5", "--seed", "1",
                   "--election", str(path)])
        assert rc == 2


class TestExperiment:
    def test_csv_identical_across_runs_and_workers(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(EXPERIMENT_CFG)
        outs = []
        for name, workers in (("a.csv", "1"), ("b.csv", "1"), ("c.csv", "2")):
            out = tmp_path / name
            rc = main(["experiment", "--config", str(cfg), "--out", str(out),
                       "--seed", "42", "--workers", workers])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_missing_seed_is_domain_error(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text(EXPERIMENT_CFG)
        rc = main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "o.csv")])
        assert rc == 2


class TestUsageErrors:
    def test_missing_required_flag(self, capsys):
        assert main(["compute", "--rule", "av", "--k", "2"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_unknown_command(self):
        assert main(["frobnicate"]) == 1

    def test_unknown_rule_is_domain_error(self, witness_file):
        assert main(["compute", "--rule", "stv", "--k", "2", "--election", witness_file]) == 2


def test_console_entry_point_runs(tmp_path):
    path = tmp_path / "e.appel"
    path.write_text(WITNESS_K2_TEXT)
    proc = subprocess.run(
        [sys.executable, "-m", "approvalrobust.cli", "compute", "--rule", "phragmen",
         "--k", "2", "--election", str(path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "0 1\n"
