"""Command-line interface: exit codes, report shape, cache workflow."""

import json

import pytest
from click.testing import CliRunner

from tautring.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, args, **kw):
    result = runner.invoke(main, args, catch_exceptions=False, **kw)
    return result


def report_of(result):
    return json.loads(result.output)


def test_xn_check_passes(runner):
    result = invoke(runner, ["--format", "json", "xn", "check", "--n", "3"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["schema"] == "tautring-report-1"
    assert report["summary"]["status"] == "pass"
    assert report["summary"]["hilbert"] == [1, 6, 6, 1]
    assert all(c["status"] == "pass" for c in report["checks"])


def test_usage_error_exits_two(runner):
    result = runner.invoke(main, ["xn", "check", "--n", "0"])
    assert result.exit_code == 2


def test_size_guard_exits_three(runner):
    result = invoke(
        runner,
        ["--format", "json", "--size-ceiling", "100", "xn", "check", "--n", "4"],
    )
    assert result.exit_code == 3
    report = report_of(result)
    assert report["summary"]["status"] == "size-guard"
    assert report["checks"][0]["name"] == "size-guard"
    assert report["checks"][0]["ceiling"] == 100


def test_check_failure_exits_one(runner, monkeypatch):
    from tautring import cli as cli_module
    from tautring.xn import a_poly

    monkeypatch.setattr(
        cli_module.xn_mod, "verify_faber_relation", lambda: a_poly(1)
    )
    result = invoke(runner, ["--format", "json", "xn", "faber-relation"])
    assert result.exit_code == 1
    assert report_of(result)["summary"]["status"] == "fail"


def test_faber_relation_report(runner):
    result = invoke(runner, ["--format", "json", "xn", "faber-relation"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["summary"]["reduced"] == "-2*a1*b(2,3) + 2*b(1,2)*b(1,3)"


def test_derive_six_point_passes(runner):
    result = invoke(runner, ["--format", "json", "xn", "derive-six-point"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["checks"][0]["status"] == "pass"
    assert report["checks"][0]["term_count"] == 15


def test_matching_gram_reports_rank(runner):
    result = invoke(runner, ["--format", "json", "xn", "matching-gram", "--m", "3"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["summary"]["rank"] == 14
    assert report["summary"]["size"] == 15


def test_hodge_eval(runner):
    result = invoke(
        runner, ["--format", "json", "hodge", "eval", "--g", "2", "--alphas", "1,1"]
    )
    assert result.exit_code == 0
    assert report_of(result)["summary"]["value"] == "1/960"


def test_hodge_eval_rejects_bad_exponents(runner):
    result = runner.invoke(
        main, ["hodge", "eval", "--g", "2", "--alphas", "0,2"]
    )
    assert result.exit_code == 2


def test_bridge_command(runner):
    result = invoke(runner, ["--format", "json", "bridge", "--n", "2"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["summary"]["lhs"] == "1/960"
    assert report["summary"]["constant"] == "1/5760"


def test_fm_check_blocks(runner):
    result = invoke(
        runner, ["--format", "json", "fm", "check", "--n", "3", "--mode", "blocks"]
    )
    assert result.exit_code == 0
    report = report_of(result)
    assert report["summary"]["rank_sums"] == [1, 7, 7, 1]
    names = {c["name"] for c in report["checks"]}
    assert "filtration-vanishing" in names
    assert "sign-rule-and-triangularity" in names


def test_fm_check_full(runner):
    result = invoke(
        runner, ["--format", "json", "fm", "check", "--n", "3", "--mode", "full"]
    )
    assert result.exit_code == 0
    assert report_of(result)["summary"]["hilbert"] == [1, 7, 7, 1]


def test_fm_standard_and_dual(runner):
    result = invoke(
        runner, ["--format", "json", "fm", "standard", "--n", "3", "--degree", "2"]
    )
    assert result.exit_code == 0
    assert report_of(result)["summary"]["count"] == 7

    result = invoke(
        runner,
        ["--format", "json", "fm", "dual", "--monomial",
         '{"n": 3, "D": [[[1, 2, 3], 1]]}'],
    )
    assert result.exit_code == 0
    assert report_of(result)["summary"]["dual"] == {
        "A": [1], "B": [], "D": [[[1, 2, 3], 1]],
    }


def test_fm_dual_requires_a_ground_size(runner):
    result = runner.invoke(
        main, ["fm", "dual", "--monomial", '{"D": [[[1, 2, 3], 1]]}']
    )
    assert result.exit_code == 2


def test_fm_presentation_summary(runner):
    result = invoke(runner, ["--format", "json", "fm", "presentation", "--n", "3"])
    assert result.exit_code == 0
    report = report_of(result)
    assert report["summary"]["generators"] == 7
    assert report["summary"]["relations"] == 24


def test_cache_flow_and_warm_rerun_is_byte_identical(runner, tmp_path):
    cache_dir = str(tmp_path / "cache")
    args = ["--format", "json", "--cache-dir", cache_dir, "xn", "check", "--n", "3"]

    def body(result):
        report = report_of(result)
        report.pop("timing")
        return json.dumps(report, indent=2, sort_keys=True)

    cold = invoke(runner, args)
    assert cold.exit_code == 0
    warm1 = invoke(runner, args)
    warm2 = invoke(runner, args)
    assert body(warm1) == body(warm2)
    assert report_of(warm1)["cache"]["entry_count"] > 0

    stats = invoke(
        runner, ["--format", "json", "--cache-dir", cache_dir, "cache", "stats"]
    )
    assert stats.exit_code == 0
    entry_count = report_of(stats)["summary"]["entries"]
    assert len(entry_count) >= 4  # bases for degrees 0..3 at least

    cleared = invoke(
        runner, ["--format", "json", "--cache-dir", cache_dir, "cache", "clear"]
    )
    assert cleared.exit_code == 0
    assert report_of(cleared)["summary"]["removed"] >= 4

    stats2 = invoke(
        runner, ["--format", "json", "--cache-dir", cache_dir, "cache", "stats"]
    )
    assert report_of(stats2)["summary"]["entries"] == []


def test_cache_command_requires_directory(runner):
    result = runner.invoke(main, ["cache", "stats"], env={"TAUTRING_CACHE_DIR": ""})
    assert result.exit_code == 2


def test_cache_dir_environment_variable(runner, tmp_path):
    cache_dir = str(tmp_path / "envcache")
    result = invoke(
        runner,
        ["--format", "json", "xn", "hilbert", "--n", "2"],
        env={"TAUTRING_CACHE_DIR": cache_dir},
    )
    assert result.exit_code == 0
    assert report_of(result)["cache"]["entry_count"] > 0


def test_table_format_renders(runner):
    result = invoke(runner, ["xn", "hilbert", "--n", "2"])
    assert result.exit_code == 0
    assert "hilbert" in result.output
    assert "summary" in result.output
