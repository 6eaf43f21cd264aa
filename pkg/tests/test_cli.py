"""Harness and command-line tests: CSV schema, determinism, solve output."""
import subprocess
import sys

import numpy as np
import pytest

from spzf.channels import sample_rayleigh, substream
from spzf.cli import main
from spzf.harness import (
    CSV_HEADER,
    ExperimentConfig,
    load_complex_vector,
    run_experiment,
    solve_once,
    write_csv,
)


def write_vector(path, h):
    with open(path, "w") as f:
        f.write("# channel entries\n")
        for z in h:
            f.write(f"{z.real} {z.imag}\n")


def feasible_instance(seed=80, n=9, m=3):
    from spzf.beamforming import spzf_two_user
    from spzf.partition import random_partition

    for k in range(200):
        rng = substream(seed, k)
        h1 = sample_rayleigh(n, 1.0, rng)
        h2 = sample_rayleigh(n, 1.0, rng)
        if spzf_two_user(h1, h2, random_partition(n, m, substream(0))).success:
            return h1, h2
    raise AssertionError("no feasible instance found")


class TestHarness:
    def test_outage_rows_and_schema(self, tmp_path):
        cfg = ExperimentConfig(
            experiment="outage", n=[12], m=[3, 4], algos=["random-fc"],
            trials=400, seed=1, out=str(tmp_path / "o.csv"),
        )
        rows = run_experiment(cfg)
        assert len(rows) == 6  # 2 cells x 3 metrics
        write_csv(rows, cfg.out)
        lines = open(cfg.out).read().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 7
        cells = lines[1].split(",")
        assert cells[0] == "1" and cells[1] == "outage" and cells[2] == "random-fc"

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        outs = []
        for threads in (1, 8):
            cfg = ExperimentConfig(
                experiment="outage", n=[16], m=[4], algos=["random-fc", "iterative"],
                trials=300, seed=5, threads=threads, out=str(tmp_path / f"t{threads}.csv"),
            )
            write_csv(run_experiment(cfg), cfg.out)
            outs.append(open(cfg.out, "rb").read())
        assert outs[0] == outs[1]

    def test_fray_rows(self, tmp_path):
        cfg = ExperimentConfig(experiment="fray", m=[1, 3], trials=2000, seed=2,
                               out=str(tmp_path / "f.csv"))
        rows = run_experiment(cfg)
        metrics = {(r.m, r.metric): r.value for r in rows}
        assert metrics[(1, "fray")] == 1.0
        assert 0 < metrics[(3, "fray")] < 1
        assert metrics[(3, "fray_approx")] > 0

    def test_min_outage_rows(self):
        cfg = ExperimentConfig(experiment="min-outage", n=[9], algos=["random-fc"],
                               trials=300, seed=3)
        rows = run_experiment(cfg)
        assert len(rows) == 1 and rows[0].m == 3

    def test_runtime_ordering(self):
        cfg = ExperimentConfig(
            experiment="runtime", n=[20], m=[4],
            algos=["random", "iterative", "iterative-fc", "genetic"],
            trials=300, seed=4,
        )
        rows = {r.algo: r.value for r in run_experiment(cfg)}
        assert rows["random"] < rows["iterative"] < rows["genetic"]
        assert rows["random"] < rows["iterative-fc"] < rows["genetic"]
        ratio = rows["iterative"] / rows["iterative-fc"]
        assert 1 / 5 < ratio < 5  # the two local searches are comparable

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            run_experiment(ExperimentConfig(experiment="nope"))
        with pytest.raises(ValueError):
            run_experiment(ExperimentConfig(experiment="outage", trials=0))

    def test_secrecy_rows(self):
        cfg = ExperimentConfig(
            experiment="secrecy", n=[9], algos=["random-fc"], trials=100,
            seed=6, snr_db=[10.0], n_e=2, m=[3],
        )
        rows = run_experiment(cfg)
        metrics = {r.metric for r in rows}
        assert {"rate_user1", "rate_user2", "rate_min", "pr_outage"} <= metrics
        for r in rows:
            assert r.snr_db == 10.0 and r.n_e == 2


class TestVectorFiles:
    def test_round_trip(self, tmp_path):
        h = sample_rayleigh(5, 1.0, substream(81))
        path = tmp_path / "h.txt"
        write_vector(path, h)
        back = load_complex_vector(str(path))
        assert np.allclose(back, h)

    def test_parse_errors(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("1.0\n")
        with pytest.raises(ValueError):
            load_complex_vector(str(bad))
        empty = tmp_path / "empty.txt"
        empty.write_text("# nothing\n")
        with pytest.raises(ValueError):
            load_complex_vector(str(empty))


class TestSolveOnce:
    def test_feasible_instance(self, tmp_path):
        h1, h2 = feasible_instance()
        p1, p2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        write_vector(p1, h1)
        write_vector(p2, h2)
        report = solve_once(str(p1), str(p2), "iterative", 3, seed=0)
        if report["outcome"] == "success":
            assert np.all(report["residuals"] <= 1e-9)
            assert np.max(np.abs(np.abs(report["w"]) - 1)) < 1e-12
        else:
            assert report["failing_stage"] in (1, 2)

    def test_dominant_entry_reports_stage_one(self, tmp_path):
        h1 = np.array([50.0, 1.0, 1.0, 1.0, 1.0, 1.0], dtype=complex)
        h2 = np.ones(6, dtype=complex)
        p1, p2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        write_vector(p1, h1)
        write_vector(p2, h2)
        report = solve_once(str(p1), str(p2), "iterative", 2, seed=0)
        assert report["outcome"] == "e1"
        assert report["failing_stage"] == 1

    def test_length_mismatch_raises(self, tmp_path):
        p1, p2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        write_vector(p1, np.ones(4, dtype=complex))
        write_vector(p2, np.ones(5, dtype=complex))
        with pytest.raises(ValueError):
            solve_once(str(p1), str(p2), "iterative", 2, seed=0)


class TestCommandLine:
    def test_outage_command_writes_csv(self, tmp_path):
        out = tmp_path / "res.csv"
        code = main(["outage", "--n", "12", "--m", "3", "--algo", "random-fc",
                     "--trials", "200", "--seed", "1", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[0] == CSV_HEADER

    def test_repeat_run_identical_bytes(self, tmp_path):
        blobs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            assert main(["outage", "--n", "12", "--m", "3,4", "--algo",
                         "random-fc,iterative", "--trials", "200", "--seed", "9",
                         "--out", str(out)]) == 0
            blobs.append(out.read_bytes())
        assert blobs[0] == blobs[1]

    def test_config_file_with_cli_override(self, tmp_path):
        cfgfile = tmp_path / "exp.cfg"
        cfgfile.write_text("n = 12\nm = 3\nalgo = random-fc\ntrials = 100\nseed = 4\n")
        out = tmp_path / "c.csv"
        code = main(["outage", "--config", str(cfgfile), "--trials", "150",
                     "--out", str(out)])
        assert code == 0
        row = out.read_text().splitlines()[1].split(",")
        assert row[11] == "150"  # CLI trials wins over the config file
        assert row[4] == "12"    # n comes from the config file

    def test_solve_command_reports_failure_structurally(self, tmp_path, capsys):
        h1 = np.array([50.0, 1.0, 1.0, 1.0], dtype=complex)
        p1, p2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        write_vector(p1, h1)
        write_vector(p2, np.ones(4, dtype=complex))
        code = main(["solve", "--h1", str(p1), "--h2", str(p2), "--m", "2"])
        assert code == 0
        assert "outcome: e1" in capsys.readouterr().out

    def test_mismatched_lengths_exit_nonzero(self, tmp_path):
        p1, p2 = tmp_path / "h1.txt", tmp_path / "h2.txt"
        write_vector(p1, np.ones(4, dtype=complex))
        write_vector(p2, np.ones(5, dtype=complex))
        code = main(["solve", "--h1", str(p1), "--h2", str(p2), "--m", "2"])
        assert code == 2

    def test_unwritable_output_exits_nonzero(self, tmp_path):
        code = main(["outage", "--n", "12", "--m", "3", "--trials", "50",
                     "--out", str(tmp_path / "no" / "dir" / "x.csv")])
        assert code == 2

    def test_entry_point_subprocess(self, tmp_path):
        out = tmp_path / "sp.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "spzf.cli", "fray", "--m", "1,2",
             "--trials", "500", "--seed", "0", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert out.exists()

    def test_threads_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SPZF_THREADS", "2")
        out = tmp_path / "env.csv"
        assert main(["outage", "--n", "12", "--m", "3", "--trials", "100",
                     "--seed", "2", "--out", str(out)]) == 0
