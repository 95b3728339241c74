import pytest

from rankpc.cli import (
    cmd_experiment,
    cmd_oracle_check,
    cmd_plotdata,
    cmd_simulate,
    main,
)
from rankpc.correlation import Dataset
from rankpc.experiment import ExperimentConfig, records_from_csv
from rankpc.graph import pdag_from_text
from rankpc.simulate import sem_from_text


SIM_TEXT = """
[experiment]
p = 10
n = 100
degree = 3
regimes = normal
replicates = 2
"""

EXP_TEXT = """
[experiment]
p = 5
n = 60
degree = 2
regimes = normal
methods = spearman
alpha_log10 = -2 -1
replicates = 2
seed = 7
"""


def test_oracle_check_exact_on_random_dags():
    report = cmd_oracle_check(6, 200, 42)
    assert report.trials == 200
    assert report.exact == 200
    assert report.within_degree
    assert report.failures == []
    assert report.message() == "200/200 exact, max |S| <= degree in all trials"


def test_oracle_check_degenerate_inputs():
    empty = cmd_oracle_check(6, 0, 0)
    assert (empty.trials, empty.exact, empty.failures) == (0, 0, [])
    single = cmd_oracle_check(1, 20, 3)
    assert single.exact == 20


def test_oracle_check_argument_validation():
    with pytest.raises(ValueError):
        cmd_oracle_check(0, 10, 0)
    with pytest.raises(ValueError):
        cmd_oracle_check(9, 10, 0)
    with pytest.raises(ValueError):
        cmd_oracle_check(6, -1, 0)


def test_main_oracle_check(capsys):
    assert main(["oracle-check", "--p-max", "4", "--trials", "20", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "20/20 exact" in out


def test_cmd_simulate_file_contract(tmp_path):
    config = ExperimentConfig(p_values=(10,), n_values=(100,), degree=3.0, replicates=2)
    written = cmd_simulate(config, tmp_path)
    assert len(written) == 5  # 2 datasets + 2 models + manifest
    names = sorted(path.name for path in written)
    assert names == [
        "data_normal_p10_n100_r0.csv",
        "data_normal_p10_n100_r1.csv",
        "manifest.txt",
        "model_normal_p10_n100_r0.txt",
        "model_normal_p10_n100_r1.txt",
    ]
    data = Dataset.from_csv(tmp_path / "data_normal_p10_n100_r0.csv")
    assert data.values.shape == (100, 10)
    model = sem_from_text((tmp_path / "model_normal_p10_n100_r0.txt").read_text())
    assert model.dag.p == 10


def test_cmd_simulate_manifest_contents(tmp_path):
    config = ExperimentConfig(p_values=(4,), n_values=(50,), degree=2.0, replicates=1, seed=5)
    cmd_simulate(config, tmp_path)
    lines = (tmp_path / "manifest.txt").read_text().splitlines()
    assert lines[0] == "[config]"
    assert "seed=5" in lines
    assert "[replicate normal_p4_n50_r0]" in lines
    fields = {}
    for ln in lines[lines.index("[replicate normal_p4_n50_r0]") + 1 :]:
        key, _, value = ln.partition("=")
        fields[key] = value
    assert fields["dataset"] == "data_normal_p4_n50_r0.csv"
    assert fields["model"] == "model_normal_p4_n50_r0.txt"
    assert fields["noise"] == "standard_normal"
    assert fields["transform"] == "identity"
    assert int(fields["seed"]) >= 0
    truth = pdag_from_text(fields["cpdag"].replace(";", "\n") + "\n")
    assert truth.p == 4


def test_cmd_simulate_reruns_are_byte_identical(tmp_path):
    config = ExperimentConfig(p_values=(6,), n_values=(40,), degree=2.0, replicates=2, seed=3)
    first = tmp_path / "a"
    second = tmp_path / "b"
    paths_a = cmd_simulate(config, first)
    paths_b = cmd_simulate(config, second)
    assert [p.name for p in paths_a] == [p.name for p in paths_b]
    for pa, pb in zip(paths_a, paths_b):
        assert pa.read_bytes() == pb.read_bytes()


def test_main_simulate_with_seed_override(tmp_path):
    cfg = tmp_path / "sim.ini"
    cfg.write_text(SIM_TEXT)
    out = tmp_path / "out"
    assert main(["simulate", "--config", str(cfg), "--out", str(out), "--seed", "11"]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert len(files) == 5
    baseline = tmp_path / "base"
    assert main(["simulate", "--config", str(cfg), "--out", str(baseline)]) == 0
    original = (baseline / "data_normal_p10_n100_r0.csv").read_bytes()
    overridden = (out / "data_normal_p10_n100_r0.csv").read_bytes()
    assert original != overridden  # the seed flag replaces the config seed


def test_main_experiment_end_to_end(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(EXP_TEXT)
    out = tmp_path / "out"
    assert main(["experiment", "--config", str(cfg), "--out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "wrote 4 records" in stdout
    assert "mean shd" in stdout
    records = records_from_csv(out / "records.csv")
    assert len(records) == 4  # 1 cell x 2 alphas x 2 replicates
    summary_lines = (out / "summary.csv").read_text().splitlines()
    assert summary_lines[0] == "p,n,d,regime,method,best_alpha,mean_shd,replicates"
    assert len(summary_lines) == 2
    assert not (out / "failures.txt").exists()


def test_main_experiment_max_cond_override(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(EXP_TEXT)
    out = tmp_path / "out"
    assert main(["experiment", "--config", str(cfg), "--out", str(out), "--max-cond", "0"]) == 0
    records = records_from_csv(out / "records.csv")
    assert all(r.max_cond_used == 0 for r in records)


def test_cmd_experiment_reports_no_failures(tmp_path):
    config = ExperimentConfig(
        p_values=(4,),
        n_values=(40,),
        degree=1.5,
        methods=("spearman",),
        alpha_log10=(-1.0,),
        replicates=1,
    )
    info = cmd_experiment(config, tmp_path)
    assert info["failures"] is None
    assert info["n_records"] == 1
    assert len(info["rows"]) == 1


def test_main_plotdata(tmp_path, capsys):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(EXP_TEXT)
    run_dir = tmp_path / "run"
    main(["experiment", "--config", str(cfg), "--out", str(run_dir)])
    capsys.readouterr()
    plot_dir = tmp_path / "plots"
    records = run_dir / "records.csv"
    assert main(["plotdata", "--records", str(records), "--out", str(plot_dir)]) == 0
    assert "wrote 1 plot files" in capsys.readouterr().out
    paths = cmd_plotdata(records, tmp_path / "plots2")
    assert [p.name for p in paths] == ["plot_normal_d2_p5.dat"]
    lines = paths[0].read_text().splitlines()
    assert lines[0] == "# n method mean_shd"
    assert len(lines) == 2  # one method at one sample size


def test_main_rejects_bad_usage():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["oracle-check", "--no-such-flag"])
