import csv
import io
import json
import math

import numpy as np
import pytest

from replaylearn import cli
from replaylearn.experiments import (
    CSV_COLUMNS,
    WORKERS_ENV,
    ExperimentConfig,
    InvalidTranscriptError,
    ResultRow,
    convex_counts,
    convex_scaling,
    general_adaptive,
    intclosed_adaptive,
    judge,
    overall_status,
    reproduce_table1,
    rows_to_csv,
    separation_demo,
    stochastic_lower_bound,
    thresholds_adaptive,
    thresholds_stochastic_upper,
)


def test_judge():
    assert judge(5.0, 0.1, 4.0, 8.0) == "pass"
    assert judge(5.0, 0.5, 4.0, 8.0) == "inconclusive"
    assert judge(9.5, 0.1, 4.0, 8.0) == "fail"
    assert judge(8.1, 0.1, 4.0, 8.0) == "inconclusive"
    assert judge(3.0, 0.0, 3.0, 3.0) == "pass"
    assert judge(1.2, 0.3, 1.0, math.inf) == "pass"


def test_result_row_mean_recomputable():
    r = ResultRow("x", "c", "l", "a", 3, 10, [1, 2, 3, 4], 2.0, 1.0, 4.0)
    assert r.mean == 2.5
    assert r.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)


def test_overall_status():
    rows = [ResultRow("x", "c", "l", "a", 1, 1, [1], 1, 1, 1)]
    assert overall_status(rows) == "pass"
    rows.append(ResultRow("x", "c", "l", "a", 1, 1, [5], 1, 0, 1))
    assert overall_status(rows) == "fail"


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig("table1", trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig("table1", format="xml")


def test_stochastic_lower_bound():
    assert stochastic_lower_bound(3, 128) == 1.0
    assert stochastic_lower_bound(1024, 1024) == 5 / 3


def test_thresholds_adaptive_example():
    r = thresholds_adaptive(16, 64)
    assert r.counts == [16] and r.passed


def test_intclosed_adaptive_example():
    r = intclosed_adaptive("thresholds:10", 50)
    assert r.counts == [10] and r.bound == 10 and r.passed


def test_general_adaptive_example():
    smart, naive = general_adaptive("blowup:4", 50)
    assert smart.passed and smart.counts[0] <= smart.bound
    assert naive.counts[0] > 3 and naive.passed


def test_separation_example():
    rows = {r.experiment: r for r in separation_demo(12, 200)}
    assert rows["separation-proper"].counts[0] >= 45
    assert rows["separation-improper"].counts[0] <= 13
    assert rows["separation-halving"].counts == [1]
    assert rows["separation-intclosed"].passed


def test_unknown_row():
    with pytest.raises(ValueError):
        reproduce_table1("nope")


def test_csv_layout_and_determinism():
    a = rows_to_csv([thresholds_stochastic_upper(64, 64, trials=20, seed=7)])
    b = rows_to_csv([thresholds_stochastic_upper(64, 64, trials=20, seed=7)])
    c = rows_to_csv([thresholds_stochastic_upper(64, 64, trials=20, seed=8)])
    assert a == b and a != c
    reader = list(csv.reader(io.StringIO(a)))
    assert tuple(reader[0]) == CSV_COLUMNS
    assert len(reader) == 21


def test_workers_do_not_change_results(monkeypatch):
    seq = thresholds_stochastic_upper(64, 64, trials=6, seed=3).counts
    monkeypatch.setenv(WORKERS_ENV, "2")
    par = thresholds_stochastic_upper(64, 64, trials=6, seed=3).counts
    assert seq == par


def test_convex_counts_shape_and_monotone():
    counts = convex_counts(2, (16, 64, 256), trials=5, seed=1)
    assert counts.shape == (5, 3)
    assert (np.diff(counts, axis=1) >= 0).all()
    assert (counts[:, 0] >= 3).all()


def test_convex_scaling_d1_small():
    rows = convex_scaling(1, (64, 256, 1024), trials=30, seed=2)
    fit = rows[-1]
    assert fit.estimate is not None and fit.estimate < 1


def test_cli_dims(capsys):
    assert cli.main(["dims", "--class", "thresholds:5", "--which", "vc,tdim"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["vc"] == 1 and data["tdim"]["value"] == 5


def test_cli_game(tmp_path, capsys):
    out = tmp_path / "t.json"
    code = cli.main(["game", "--class", "thresholds:6", "--learner", "closure", "--adversary", "descending",
                     "--rounds", "10", "--seed", "1", "--out", str(out)])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["mistakes"] == 6
    assert json.loads(out.read_text())["mistakes"] == 6


def test_cli_experiment_pass_and_files(tmp_path):
    out = tmp_path / "r.csv"
    code = cli.main(["experiment", "table1", "--row", "thresholds-adaptive", "--class", "thresholds:8",
                     "--out", str(out)])
    assert code == 0
    first = out.read_bytes()
    cli.main(["experiment", "table1", "--row", "thresholds-adaptive", "--class", "thresholds:8",
              "--out", str(out)])
    assert out.read_bytes() == first
    jout = tmp_path / "r.json"
    assert cli.main(["experiment", "separation", "--format", "json", "--out", str(jout)]) == 0
    assert len(json.loads(jout.read_text())) == 4


def test_cli_exit_codes(monkeypatch):
    def failing(*a, **k):
        return [ResultRow("x", "c", "l", "a", 1, 1, [9], 1, 0, 1)]

    def noisy(*a, **k):
        return [ResultRow("x", "c", "l", "a", 1, 1, [1, 9], 1, 0, 10)]

    def invalid(*a, **k):
        raise InvalidTranscriptError("bad replay")

    for fn, code in ((failing, 1), (noisy, 2), (invalid, 3)):
        monkeypatch.setattr(cli, "reproduce_table1", fn)
        assert cli.main(["experiment", "table1", "--row", "thresholds-adaptive"]) == code
