import json

import pytest

from fbas_rewards import gen_symmetric, parse_fbas, serialize_fbas
from fbas_rewards.cli import main, parse_count, parse_range

from helpers import disjoint_groups, five_node


@pytest.fixture
def write(tmp_path):
    def _write(fbas, name="fbas.json"):
        path = tmp_path / name
        path.write_text(serialize_fbas(fbas))
        return str(path)
    return _write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def usage_error(capsys, *argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    capsys.readouterr()
    return info.value.code


@pytest.mark.parametrize("text,value", [("100000", 100000), ("1e5", 100000), ("10^5", 100000), ("0", 0)])
def test_parse_count(text, value):
    assert parse_count(text) == value


def test_parse_range():
    assert parse_range("3..6") == [3, 4, 5, 6]
    assert parse_range("5,20") == [5, 20]
    assert parse_range("1e3,1e4") == [1000, 10000]


class TestAnalyze:
    def test_five_node_text(self, capsys, write):
        code, out, _ = run(capsys, "analyze", "-i", write(five_node()), "--format", "text")
        assert code == 0
        assert out.splitlines() == [
            "node_count: 5",
            "minimal_quorums: [[0,1,2],[0,3,4]]",
            "top_tier: [0,1,2,3,4]",
            "quorum_intersection: true",
        ]

    def test_five_node_json(self, capsys, write):
        code, out, _ = run(capsys, "analyze", "-i", write(five_node()))
        assert json.loads(out)["minimal_quorums"] == [[0, 1, 2], [0, 3, 4]]

    def test_empty_document(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        code, out, _ = run(capsys, "analyze", "-i", str(path))
        assert code == 0
        doc = json.loads(out)
        assert doc["minimal_quorums"] == [] and doc["quorum_intersection"] is False

    def test_disjoint_is_informational(self, capsys, write):
        code, out, _ = run(capsys, "analyze", "-i", write(disjoint_groups()))
        assert code == 0 and json.loads(out)["quorum_intersection"] is False

    def test_stdin(self, capsys, monkeypatch):
        import io
        import sys
        monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(serialize_fbas(five_node()).encode())))
        code, out, _ = run(capsys, "analyze")
        assert code == 0 and json.loads(out)["node_count"] == 5

    def test_parse_error(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[{")
        code, _, err = run(capsys, "analyze", "-i", str(path))
        assert code == 2 and "error" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "analyze", "-i", str(tmp_path / "nope.json"))
        assert code == 2


class TestRank:
    def test_five_node_exact_csv(self, capsys, write):
        code, out, _ = run(capsys, "rank", "-i", write(five_node()), "--method", "exact", "--format", "csv")
        assert code == 0
        assert out.splitlines()[1:] == ["0,n0,7,15,exact,,"] + [f"{i},n{i},2,15,exact,," for i in range(1, 5)]

    def test_symmetric_ten_approx(self, capsys, write):
        code, out, _ = run(capsys, "rank", "-i", write(gen_symmetric(10)), "--method", "approx",
                           "-m", "1e5", "--seed", "42")
        assert code == 0
        nodes = json.loads(out)["nodes"]
        assert all(abs(n["value"] - 0.1) <= 0.01 for n in nodes)

    def test_output_file_byte_identical(self, capsys, write, tmp_path):
        src = write(gen_symmetric(8))
        outs = []
        for k in range(2):
            target = tmp_path / f"out{k}.csv"
            assert run(capsys, "rank", "-i", src, "--method", "approx", "-m", "5000",
                       "--seed", "3", "--format", "csv", "-o", str(target))[0] == 0
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_disjoint_refused(self, capsys, write):
        code, _, err = run(capsys, "rank", "-i", write(disjoint_groups()))
        assert code == 3 and "refused" in err

    def test_disjoint_with_flag(self, capsys, write):
        code, _, _ = run(capsys, "rank", "-i", write(disjoint_groups()), "--ignore-quorum-intersection")
        assert code == 0

    def test_no_quorums_refused(self, capsys, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]")
        assert run(capsys, "rank", "-i", str(path))[0] == 3

    def test_cap_exceeded(self, capsys, write):
        code, _, err = run(capsys, "rank", "-i", write(gen_symmetric(6)), "--method", "exact", "--cap", "5")
        assert code == 4 and "approx" in err

    def test_auto_switches_to_sampling(self, capsys, write):
        src = write(gen_symmetric(16))
        assert usage_error(capsys, "rank", "-i", src) == 2
        code, out, _ = run(capsys, "rank", "-i", src, "--seed", "1", "-m", "1000")
        assert code == 0 and json.loads(out)["method"] == "approximate"

    @pytest.mark.parametrize("argv", [
        ["--method", "exact", "-m", "100"],
        ["--method", "approx"],
        ["--method", "approx", "--seed", "-1"],
        ["--method", "approx", "--seed", "1", "-m", "0"],
        ["--method", "bogus"],
    ])
    def test_usage_errors(self, capsys, write, argv):
        assert usage_error(capsys, "rank", "-i", write(five_node()), *argv) == 2


class TestGen:
    def test_symmetric_four(self, capsys):
        code, out, _ = run(capsys, "gen", "--kind", "symmetric", "-n", "4")
        assert code == 0
        assert {q.threshold for q in parse_fbas(out).quorum_sets} == {3}

    def test_single_organization(self, capsys):
        code, out, _ = run(capsys, "gen", "--kind", "organizational", "--orgs", "1")
        f = parse_fbas(out)
        assert len(f) == 3 and f.quorum_sets[0].inner_sets[0].threshold == 2

    @pytest.mark.parametrize("argv", [
        ["--kind", "symmetric", "-n", "0"],
        ["--kind", "symmetric"],
        ["--kind", "organizational", "-n", "3"],
        ["--kind", "symmetric", "-n", "3..5"],
    ])
    def test_usage_errors(self, capsys, argv):
        assert usage_error(capsys, "gen", *argv) == 2


class TestExperiments:
    def test_accuracy_csv(self, capsys):
        code, out, _ = run(capsys, "accuracy", "-n", "4", "-m", "100", "--reps", "2", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "kind,n,m,reps,base_seed,mmpe"
        assert lines[1].startswith("symmetric,4,100,2,0,")

    def test_accuracy_reps_zero(self, capsys):
        assert usage_error(capsys, "accuracy", "-n", "4", "--reps", "0") == 2

    def test_accuracy_above_cap(self, capsys):
        assert run(capsys, "accuracy", "-n", "6", "-m", "10", "--reps", "1", "--cap", "5")[0] == 4

    def test_accuracy_needs_sizes(self, capsys):
        assert usage_error(capsys, "accuracy") == 2

    def test_bench_exact_nodes(self, capsys):
        code, out, _ = run(capsys, "bench", "--method", "exact", "-n", "3..8", "--reps", "3", "--format", "json")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [r["n"] for r in rows] == [3, 4, 5, 6, 7, 8]
        assert all(r["method"] == "exact" and r["median_seconds"] > 0 for r in rows)

    def test_bench_orgs_both_kinds(self, capsys):
        code, out, _ = run(capsys, "bench", "--kind", "organizational", "--orgs", "1,2",
                           "-m", "10", "--reps", "1", "--format", "csv")
        assert code == 0
        rows = [line.split(",")[:4] for line in out.splitlines()[1:]]
        assert rows == [["organizational", "3", "exact", ""], ["organizational", "3", "approximate", "10"],
                        ["organizational", "6", "exact", ""], ["organizational", "6", "approximate", "10"]]

    def test_bench_exact_with_samples_rejected(self, capsys):
        assert usage_error(capsys, "bench", "--method", "exact", "-n", "3", "-m", "10") == 2


def test_no_subcommand(capsys):
    assert usage_error(capsys) == 2
