import json

import numpy as np
import pytest

from maxrank.cli import main
from maxrank.ranking import read_scores

GRAPH = "4 5\n0 1\n0 2\n1 2\n2 0\n3 0\n"
LABELS = "0 spam train\n1 nonspam train\n2 spam test\n3 nonspam test\n"


@pytest.fixture
def inputs(tmp_path):
    graph = tmp_path / "graph.txt"
    labels = tmp_path / "labels.txt"
    graph.write_text(GRAPH)
    labels.write_text(LABELS)
    return graph, labels


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_maxrank_run_writes_all_artifacts(tmp_path, inputs, capsys):
    graph, labels = inputs
    out = tmp_path / "run"
    code, stdout, _ = run(capsys, "maxrank", "--graph", graph,
                          "--labels", labels, "--out-dir", out)
    assert code == 0
    for name in ("bias.txt", "stationary.txt", "policy.txt",
                 "run_summary.json"):
        assert (out / name).exists()

    summary = json.loads(stdout)
    assert summary["subcommand"] == "maxrank"
    assert summary["converged"] is True
    assert summary["residual"] < 1e-8
    assert summary["teleport_count"] == 4
    assert summary["config"]["gamma"] == 4.0
    assert json.loads((out / "run_summary.json").read_text()) == summary

    bias = read_scores(out / "bias.txt")
    stationary = read_scores(out / "stationary.txt")
    assert len(bias) == 4 and len(stationary) == 4
    assert abs(stationary.sum() - 1.0) < 1e-9

    lines = (out / "policy.txt").read_text().splitlines()
    assert len(lines) == 4
    for i, line in enumerate(lines):
        fields = line.split()
        assert int(fields[0]) == i
        assert int(fields[1]) == len(fields) - 2


def test_pagerank_two_cycle_exact_bytes(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    graph.write_text("2 2\n0 1\n1 0\n")
    code, _, _ = run(capsys, "pagerank", "--graph", graph,
                     "--out-dir", tmp_path)
    assert code == 0
    assert (tmp_path / "pagerank.txt").read_bytes() == b"0 0.5\n1 0.5\n"


def test_trustrank_and_antitrustrank_outputs(tmp_path, inputs, capsys):
    graph, labels = inputs
    for sub in ("trustrank", "antitrustrank"):
        code, stdout, _ = run(capsys, sub, "--graph", graph,
                              "--labels", labels, "--out-dir", tmp_path)
        assert code == 0
        scores = read_scores(tmp_path / f"{sub}.txt")
        assert abs(scores.sum() - 1.0) < 1e-9
        assert json.loads(stdout)["sweeps"] >= 1


def test_missing_seed_is_an_input_error(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    labels = tmp_path / "l.txt"
    graph.write_text("2 2\n0 1\n1 0\n")
    labels.write_text("0 spam train\n")
    code, _, err = run(capsys, "trustrank", "--graph", graph,
                       "--labels", labels, "--out-dir", tmp_path)
    assert code == 3
    assert "nonspam" in err


def test_artifacts_are_byte_identical_across_reruns(tmp_path, inputs, capsys):
    graph, labels = inputs
    runs = []
    for sub, extra in (("a", []), ("b", []),
                       ("c", ["--mode", "jacobi", "--threads", "3"]),
                       ("d", ["--mode", "jacobi", "--threads", "1"])):
        out = tmp_path / sub
        code, _, _ = run(capsys, "maxrank", "--graph", graph, "--labels",
                         labels, "--out-dir", out, *extra)
        assert code == 0
        runs.append(out)
    for name in ("bias.txt", "stationary.txt", "policy.txt"):
        assert (runs[0] / name).read_bytes() == (runs[1] / name).read_bytes()
        assert (runs[2] / name).read_bytes() == (runs[3] / name).read_bytes()
    # policy artifacts agree across modes as well
    assert (runs[0] / "policy.txt").read_bytes() == \
        (runs[2] / "policy.txt").read_bytes()


def test_config_file_defaults_and_flag_precedence(tmp_path, inputs, capsys):
    graph, labels = inputs
    config = tmp_path / "run.conf"
    config.write_text("# solver settings\nalpha = 0.5\ngamma = 0\n")
    code, stdout, _ = run(capsys, "maxrank", "--graph", graph, "--labels",
                          labels, "--out-dir", tmp_path / "x",
                          "--config", config)
    assert code == 0
    cfg = json.loads(stdout)["config"]
    assert cfg["alpha"] == 0.5
    assert cfg["gamma"] == 0.0

    code, stdout, _ = run(capsys, "maxrank", "--graph", graph, "--labels",
                          labels, "--out-dir", tmp_path / "y",
                          "--config", config, "--alpha", "0.7")
    assert json.loads(stdout)["config"]["alpha"] == 0.7


def test_config_file_rejects_unknown_keys(tmp_path, inputs, capsys):
    graph, labels = inputs
    config = tmp_path / "run.conf"
    config.write_text("alpa = 0.5\n")
    with pytest.raises(SystemExit) as info:
        run(capsys, "maxrank", "--graph", graph, "--labels", labels,
            "--config", config)
    assert info.value.code == 2


def test_usage_errors_exit_2(tmp_path, inputs, capsys):
    graph, labels = inputs
    with pytest.raises(SystemExit) as info:
        run(capsys, "maxrank", "--graph", graph, "--no-such-flag")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run(capsys, "maxrank", "--graph", graph, "--labels", labels,
            "--mode", "chaotic")
    assert info.value.code == 2
    # out-of-range parameter values are usage errors too
    code, _, err = run(capsys, "maxrank", "--graph", graph, "--labels",
                       labels, "--alpha", "1.5", "--out-dir", tmp_path)
    assert code == 2
    assert "alpha" in err


def test_input_errors_exit_3(tmp_path, inputs, capsys):
    _, labels = inputs
    code, _, err = run(capsys, "maxrank", "--graph", tmp_path / "absent.txt",
                       "--labels", labels, "--out-dir", tmp_path)
    assert code == 3

    bad = tmp_path / "bad.txt"
    bad.write_text("2 1\n0 5\n")
    code, _, err = run(capsys, "pagerank", "--graph", bad,
                       "--out-dir", tmp_path)
    assert code == 3
    assert "line 2" in err


def test_nonconvergence_exits_4_but_writes_artifacts(tmp_path, inputs,
                                                     capsys):
    graph, labels = inputs
    out = tmp_path / "run"
    code, stdout, err = run(capsys, "maxrank", "--graph", graph, "--labels",
                            labels, "--out-dir", out, "--max-iters", "1",
                            "--eps", "1e-15")
    assert code == 4
    assert "residual" in err
    summary = json.loads(stdout)
    assert summary["converged"] is False
    assert (out / "bias.txt").exists()
    assert (out / "policy.txt").exists()


def test_eval_writes_curves_and_demotion_tables(tmp_path, inputs, capsys):
    graph, labels = inputs
    run(capsys, "pagerank", "--graph", graph, "--out-dir", tmp_path)
    run(capsys, "maxrank", "--graph", graph, "--labels", labels,
        "--out-dir", tmp_path)
    code, stdout, _ = run(
        capsys, "eval",
        "--scores", tmp_path / "bias.txt", tmp_path / "pagerank.txt",
        "--labels", labels, "--out-dir", tmp_path / "eval",
        "--demote-against", tmp_path / "pagerank.txt")
    assert code == 0
    for name in ("bias_curve.csv", "pagerank_curve.csv",
                 "bias_demotion_raw.csv", "bias_demotion_norm.csv"):
        assert (tmp_path / "eval" / name).exists()
    summary = json.loads(stdout)
    assert len(summary["curves"]) == 2
    for entry in summary["curves"]:
        assert 0.0 <= entry["auc"] <= 1.0
    header = (tmp_path / "eval" / "bias_curve.csv").read_bytes().split(b"\n")[0]
    assert header == b"threshold,precision,recall"


def test_eval_rejects_mismatched_score_files(tmp_path, inputs, capsys):
    graph, labels = inputs
    run(capsys, "pagerank", "--graph", graph, "--out-dir", tmp_path)
    short = tmp_path / "short.txt"
    short.write_text("0 0.5\n1 0.5\n")
    code, _, err = run(capsys, "eval", "--scores", tmp_path / "pagerank.txt",
                       short, "--labels", labels, "--out-dir", tmp_path)
    assert code == 3
    assert "expected 4 pages" in err


def test_oracle_subcommand_reports_best_lambda(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    labels = tmp_path / "l.txt"
    graph.write_text("2 2\n0 1\n1 0\n")
    labels.write_text("0 spam train\n")
    code, stdout, _ = run(capsys, "oracle", "--graph", graph, "--labels",
                          labels, "--gamma", "12", "--teleport-fraction",
                          "0.5", "--mc-page", "0", "--walks", "2000",
                          "--rng-seed", "7")
    assert code == 0
    payload = json.loads(stdout)
    assert len(payload["policy"]) == 2
    assert payload["monte_carlo"]["walks"] == 2000
    assert payload["monte_carlo"]["stderr"] > 0
    # keep-all at gamma 12: lambda = (1-a) * v1 with v = (1, 0) costs
    a = 0.85
    want = (1 - a) * a / (1 - a * a)
    assert payload["best_lambda"] == pytest.approx(want, abs=1e-9)


def test_threads_env_fallback(tmp_path, inputs, capsys, monkeypatch):
    graph, labels = inputs
    monkeypatch.setenv("MAXRANK_THREADS", "3")
    code, stdout, _ = run(capsys, "maxrank", "--graph", graph, "--labels",
                          labels, "--out-dir", tmp_path / "env")
    assert code == 0
    assert json.loads(stdout)["config"]["threads"] == 3


def test_scores_survive_a_round_trip_through_eval_inputs(tmp_path, inputs,
                                                         capsys):
    graph, labels = inputs
    run(capsys, "maxrank", "--graph", graph, "--labels", labels,
        "--out-dir", tmp_path)
    bias = read_scores(tmp_path / "bias.txt")
    assert np.all(np.isfinite(bias))
