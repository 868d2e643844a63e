"""CLI subcommands driven end to end through the in-process service."""

import pytest

from edgewatch.bench import DiffResult
from edgewatch.cli import build_parser, main
from edgewatch.workload import WorkloadParams, write_workload


@pytest.fixture(scope="module")
def cli_workload(tmp_path_factory):
    out = tmp_path_factory.mktemp("cliwl")
    return write_workload(
        str(out),
        WorkloadParams(
            num_queries=8,
            avg_size=3,
            selectivity=0.5,
            overlap=0.25,
            num_edges=150,
            label_alphabet_size=6,
            seed=13,
        ),
    )


def test_gen_command(tmp_path, capsys):
    code = main(
        [
            "gen",
            "--out",
            str(tmp_path / "w"),
            "--num-queries",
            "10",
            "--avg-size",
            "3",
            "--selectivity",
            "0.3",
            "--overlap",
            "0.2",
            "--edges",
            "120",
            "--alphabet",
            "8",
            "--seed",
            "2",
            "--measure",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "queries:" in out
    assert "planted queries: 3" in out
    assert "achieved selectivity:" in out
    assert (tmp_path / "w" / "stream.txt").exists()


def test_run_command(cli_workload, tmp_path, capsys):
    code = main(
        [
            "run",
            "--engine",
            "tric",
            "--queries",
            cli_workload["queries"],
            "--stream",
            cli_workload["stream"],
            "--output",
            str(tmp_path / "lat.csv"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "tric mode=homomorphism" in out
    assert "mean=" in out
    assert "examined=" in out
    assert (tmp_path / "lat.csv").exists()


def test_diff_command_identical(cli_workload, capsys):
    code = main(
        [
            "diff",
            "--engines",
            "tric,inv,oracle",
            "--queries",
            cli_workload["queries"],
            "--stream",
            cli_workload["stream"],
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "identical" in out


def test_diff_command_divergence_exit_1(cli_workload, capsys, monkeypatch):
    import importlib

    # the service package re-exports ``app``, shadowing the submodule name
    app_module = importlib.import_module("edgewatch.service.app")

    def fake_diff(engines, qf, sf, mode="homomorphism"):
        return DiffResult(
            identical=False,
            engines=list(engines),
            counts={e: 1 for e in engines},
            divergence={
                "engine": engines[1],
                "baseline": engines[0],
                "line": 0,
                "expected": "a",
                "got": "b",
            },
        )

    monkeypatch.setattr(app_module, "diff_files", fake_diff)
    code = main(
        [
            "diff",
            "--engines",
            "tric,inv",
            "--queries",
            cli_workload["queries"],
            "--stream",
            cli_workload["stream"],
        ]
    )
    out = capsys.readouterr().out
    assert code == 1
    assert "MISMATCH" in out


def test_diff_needs_two_engines(cli_workload, capsys):
    code = main(
        [
            "diff",
            "--engines",
            "tric",
            "--queries",
            cli_workload["queries"],
            "--stream",
            cli_workload["stream"],
        ]
    )
    assert code == 2
    assert "at least two" in capsys.readouterr().err


def test_trend_command(capsys):
    code = main(
        [
            "trend",
            "--param",
            "num_edges",
            "--values",
            "80,160",
            "--engines",
            "tric",
            "--num-queries",
            "6",
            "--avg-size",
            "2",
            "--edges",
            "80",
            "--alphabet",
            "5",
            "--seed",
            "3",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "engine" in out
    assert out.count("tric") == 2


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args(["run", "--engine", "tric"])  # missing files
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        build_parser().parse_args(["run", "--engine", "bogus"])


def test_request_error_exit_2(tmp_path, capsys):
    code = main(
        [
            "gen",
            "--out",
            str(tmp_path / "w"),
            "--num-queries",
            "50",
            "--avg-size",
            "5",
            "--selectivity",
            "1.0",
            "--overlap",
            "0.2",
            "--edges",
            "10",
        ]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err
